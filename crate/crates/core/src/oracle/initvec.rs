//! Transport-table seeding: the value of each component of `Q` at a
//! chosen parameter point, computed offline by quadrature.
//!
//! A component is indexed by a derivative multi-index over the system
//! variables `(xi_1..xi_n, z_1..z_N)`. Transform-variable derivatives
//! reduce to analytic monomial weights under the integral sign, so they
//! cost nothing in accuracy; parameter derivatives fall back to
//! Richardson-extrapolated central differences of the quadrature value,
//! refined until two step sizes agree.

use crate::models::StateSpaceModel;
use crate::pfaffian::PfaffianSystem;

use super::transform::weighted_moments;
use super::{OracleError, QuadratureConfig, Result, StepData};

/// Relative agreement required between two finite-difference step sizes.
const FD_RTOL: f64 = 1e-7;
/// Base step is `FD_BASE_STEP * max(1, |z_j|)` for each variable.
const FD_BASE_STEP: f64 = 1e-3;
const FD_MAX_HALVINGS: usize = 5;

/// Compute `Q(0, z_init)` for every monomial of `sys`.
pub fn initial_vector(
    model: &dyn StateSpaceModel,
    sys: &PfaffianSystem,
    z_init: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let n = model.state_dim();
    let (r, m) = (model.output_dim(), model.input_dim());
    assert_eq!(
        sys.num_transform_vars(),
        n,
        "system transform variables must match the state dimension"
    );
    assert_eq!(
        sys.vars().len(),
        n + StepData::z_len(r, m, n),
        "system variables must be (xi, z)"
    );

    let mut out = Vec::with_capacity(sys.dim());
    for mono in sys.monomials() {
        let xi_part: Vec<u32> = mono[0..n].to_vec();
        let z_part: Vec<u32> = mono[n..].to_vec();
        let z_order: u32 = z_part.iter().sum();

        // Phi weighted by x^xi_part, as a function of z.
        let value_at = |z: &[f64]| -> Result<f64> {
            let step = StepData::from_z(r, m, n, z)?;
            Ok(weighted_moments(model, &step, std::slice::from_ref(&xi_part), cfg)?[0])
        };

        let value = match z_order {
            0 => value_at(z_init)?,
            1 => {
                let j = z_part.iter().position(|&e| e == 1).expect("order one");
                fd_refine(|h| fd_first(&value_at, z_init, n + j, h), scale(z_init[j]))?
            }
            2 => {
                let nonzero: Vec<(usize, u32)> = z_part
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| (j, e))
                    .collect();
                match nonzero.as_slice() {
                    [(j, 2)] => {
                        let j = *j;
                        fd_refine(|h| fd_second(&value_at, z_init, n + j, h), scale(z_init[j]))?
                    }
                    [(i, 1), (j, 1)] => {
                        let (i, j) = (*i, *j);
                        let hs = scale(z_init[i]).min(scale(z_init[j]));
                        fd_refine(|h| fd_mixed(&value_at, z_init, n + i, n + j, h), hs)?
                    }
                    _ => unreachable!("order-two index"),
                }
            }
            _ => return Err(OracleError::UnsupportedMonomial { index: mono.clone() }),
        };
        out.push(value);
    }
    Ok(out)
}

fn scale(z: f64) -> f64 {
    FD_BASE_STEP * z.abs().max(1.0)
}

/// Richardson-extrapolate a 4th-order stencil and halve the step until
/// two consecutive extrapolations agree.
fn fd_refine(stencil: impl Fn(f64) -> Result<f64>, h0: f64) -> Result<f64> {
    let richardson = |h: f64| -> Result<f64> {
        let d_h = stencil(h)?;
        let d_half = stencil(h / 2.0)?;
        Ok((16.0 * d_half - d_h) / 15.0)
    };
    let mut prev = richardson(h0)?;
    let mut h = h0 / 2.0;
    for _ in 0..FD_MAX_HALVINGS {
        let cur = richardson(h)?;
        if (cur - prev).abs() <= FD_RTOL * cur.abs().max(prev.abs()).max(1.0) {
            return Ok(cur);
        }
        prev = cur;
        h /= 2.0;
    }
    Err(OracleError::FiniteDifferenceFailure { previous: prev, last: richardson(h)? })
}

fn shifted(z: &[f64], idx: usize, delta: f64) -> Vec<f64> {
    let mut out = z.to_vec();
    out[idx] += delta;
    out
}

/// `(-g(+2h) + 8g(+h) - 8g(-h) + g(-2h)) / 12h`
fn fd_first(g: &impl Fn(&[f64]) -> Result<f64>, z: &[f64], idx: usize, h: f64) -> Result<f64> {
    Ok((-g(&shifted(z, idx, 2.0 * h))? + 8.0 * g(&shifted(z, idx, h))?
        - 8.0 * g(&shifted(z, idx, -h))?
        + g(&shifted(z, idx, -2.0 * h))?)
        / (12.0 * h))
}

/// `(-g(+2h) + 16g(+h) - 30g(0) + 16g(-h) - g(-2h)) / 12h^2`
fn fd_second(g: &impl Fn(&[f64]) -> Result<f64>, z: &[f64], idx: usize, h: f64) -> Result<f64> {
    Ok((-g(&shifted(z, idx, 2.0 * h))? + 16.0 * g(&shifted(z, idx, h))? - 30.0 * g(z)?
        + 16.0 * g(&shifted(z, idx, -h))?
        - g(&shifted(z, idx, -2.0 * h))?)
        / (12.0 * h * h))
}

/// Nested 4th-order first-derivative stencils for a mixed partial.
fn fd_mixed(
    g: &impl Fn(&[f64]) -> Result<f64>,
    z: &[f64],
    idx_i: usize,
    idx_j: usize,
    h: f64,
) -> Result<f64> {
    let inner = |delta_i: f64| -> Result<f64> {
        let base = shifted(z, idx_i, delta_i);
        fd_first(g, &base, idx_j, h)
    };
    Ok((-inner(2.0 * h)? + 8.0 * inner(h)? - 8.0 * inner(-h)? + inner(-2.0 * h)?) / (12.0 * h))
}
