//! Joint density, exp-weighted transform, and moment integrals by
//! Gaussian quadrature.

use nalgebra::{DMatrix, DVector};

use crate::models::{GaussianDensity, StateSpaceModel};

use super::quadrature::gaussian_expectation_vec;
use super::{MomentVector, OracleError, QuadratureConfig, Result, StepData};

/// The state marginal of the one-step joint: exact for linear-in-state
/// transitions, a quadrature mean/covariance fit otherwise (used only to
/// center grids in that case).
struct Marginal {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol_l: DMatrix<f64>,
    exact: bool,
}

fn marginal(model: &dyn StateSpaceModel, step: &StepData, order: usize) -> Result<Marginal> {
    let n = model.state_dim();
    let prior_l = step
        .prior_cov
        .clone()
        .cholesky()
        .ok_or(OracleError::NonPositiveDefinite)?
        .l();
    if model.linear_in_state() {
        let f = model.transition_jacobian(&step.prior_mean, &step.u);
        let mean = &f * &step.prior_mean + model.input_offset(&step.u);
        let cov = &f * &step.prior_cov * f.transpose() + model.process_noise_cov();
        let chol_l = cov.clone().cholesky().ok_or(OracleError::NonPositiveDefinite)?.l();
        return Ok(Marginal { mean, cov, chol_l, exact: true });
    }
    // Mean and covariance of f(x-, u) under the prior, plus process noise.
    let mut out = vec![0.0; n + n * n];
    gaussian_expectation_vec(&step.prior_mean, &prior_l, order, &mut out, |xp, acc| {
        let fx = model.transition(xp, &step.u);
        for i in 0..n {
            acc[i] = fx[i];
            for j in 0..n {
                acc[n + i * n + j] = fx[i] * fx[j];
            }
        }
    });
    let mean = DVector::from_column_slice(&out[0..n]);
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            cov[(i, j)] = out[n + i * n + j] - mean[i] * mean[j];
        }
    }
    cov = (&cov + cov.transpose()) * 0.5 + model.process_noise_cov();
    let chol_l = cov.clone().cholesky().ok_or(OracleError::NonPositiveDefinite)?.l();
    Ok(Marginal { mean, cov, chol_l, exact: false })
}

fn observation_density(model: &dyn StateSpaceModel) -> Result<GaussianDensity> {
    Ok(GaussianDensity::new(
        DVector::zeros(model.output_dim()),
        model.observation_noise_cov().clone(),
    )?)
}

fn monomial_value(x: &DVector<f64>, exps: &[u32]) -> f64 {
    x.iter().zip(exps).map(|(v, &e)| v.powi(e as i32)).product()
}

/// Accept a family of values only when doubling the rule order
/// reproduces every one of them within tolerance, doubling again up to
/// `refinement_max` times before giving up.
fn refine_vec(
    cfg: &QuadratureConfig,
    mut eval: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let rounds = cfg.refinement_max.max(1);
    let mut order = cfg.hermite_order;
    let mut coarse = eval(order)?;
    for round in 0..rounds {
        let refined_order = order * 2;
        let refined = eval(refined_order)?;
        let disagreement = coarse
            .iter()
            .zip(&refined)
            .find(|(a, b)| (**a - **b).abs() > cfg.tolerance * a.abs().max(b.abs()).max(1.0))
            .map(|(a, b)| (*a, *b));
        match disagreement {
            None => return Ok(refined),
            Some((a, b)) if round + 1 == rounds => {
                return Err(OracleError::RefinementFailure {
                    order,
                    coarse: a,
                    refined_order,
                    refined: b,
                });
            }
            Some(_) => {
                coarse = refined;
                order = refined_order;
            }
        }
    }
    unreachable!("refinement loop always returns")
}

/// `Phi` weighted by the state monomials in `weights`, all from one grid
/// pass per refinement level.
pub fn weighted_moments(
    model: &dyn StateSpaceModel,
    step: &StepData,
    weights: &[Vec<u32>],
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let obs = observation_density(model)?;
    refine_vec(cfg, |order| {
        let marg = marginal(model, step, order)?;
        let mut out = vec![0.0; weights.len()];
        if marg.exact {
            gaussian_expectation_vec(&marg.mean, &marg.chol_l, order, &mut out, |x, acc| {
                let lik = obs.pdf(&(&step.y - model.observation(x))).unwrap_or(0.0);
                for (k, w) in weights.iter().enumerate() {
                    acc[k] = monomial_value(x, w) * lik;
                }
            });
        } else {
            // Nested rule: outer over the previous state, inner over the
            // process noise around f(x-, u).
            let prior_l = step
                .prior_cov
                .clone()
                .cholesky()
                .ok_or(OracleError::NonPositiveDefinite)?
                .l();
            let w_l = model
                .process_noise_cov()
                .clone()
                .cholesky()
                .ok_or(OracleError::NonPositiveDefinite)?
                .l();
            gaussian_expectation_vec(&step.prior_mean, &prior_l, order, &mut out, |xp, acc| {
                let fx = model.transition(xp, &step.u);
                gaussian_expectation_vec(&fx, &w_l, order, acc, |x, inner| {
                    let lik = obs.pdf(&(&step.y - model.observation(x))).unwrap_or(0.0);
                    for (k, w) in weights.iter().enumerate() {
                        inner[k] = monomial_value(x, w) * lik;
                    }
                });
            });
        }
        Ok(out)
    })
}

/// The three moment integrals via analytic monomial weights on a shared
/// grid.
pub fn moments(
    model: &dyn StateSpaceModel,
    step: &StepData,
    cfg: &QuadratureConfig,
) -> Result<MomentVector> {
    let n = model.state_dim();
    let mut weights: Vec<Vec<u32>> = vec![vec![0; n]];
    for i in 0..n {
        let mut w = vec![0; n];
        w[i] = 1;
        weights.push(w);
    }
    for i in 0..n {
        for j in i..n {
            let mut w = vec![0; n];
            w[i] += 1;
            w[j] += 1;
            weights.push(w);
        }
    }
    let vals = weighted_moments(model, step, &weights, cfg)?;
    let phi0 = vals[0];
    let phi1 = DVector::from_column_slice(&vals[1..1 + n]);
    let mut phi2 = DMatrix::zeros(n, n);
    let mut k = 1 + n;
    for i in 0..n {
        for j in i..n {
            phi2[(i, j)] = vals[k];
            phi2[(j, i)] = vals[k];
            k += 1;
        }
    }
    Ok(MomentVector { phi0, phi1, phi2 })
}

/// The exp-weighted transform at frequency `xi`. The exponential factor
/// is folded analytically: under a Gaussian `N(m, V)`,
/// `E[exp(xi'x) g(x)] = exp(xi'm + xi'V xi/2) E_{N(m + V xi, V)}[g]`,
/// which keeps the quadrature grid matched to the integrand for any xi.
pub fn transform_value(
    model: &dyn StateSpaceModel,
    step: &StepData,
    xi: &DVector<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let obs = observation_density(model)?;
    let vals = refine_vec(cfg, |order| {
        let marg = marginal(model, step, order)?;
        let mut out = vec![0.0];
        if marg.exact {
            let shift = &marg.mean + &marg.cov * xi;
            let factor = (xi.dot(&marg.mean) + 0.5 * (xi.transpose() * &marg.cov * xi)[(0, 0)]).exp();
            gaussian_expectation_vec(&shift, &marg.chol_l, order, &mut out, |x, acc| {
                acc[0] = obs.pdf(&(&step.y - model.observation(x))).unwrap_or(0.0);
            });
            out[0] *= factor;
        } else {
            let prior_l = step
                .prior_cov
                .clone()
                .cholesky()
                .ok_or(OracleError::NonPositiveDefinite)?
                .l();
            let w_cov = model.process_noise_cov();
            let w_l = w_cov.clone().cholesky().ok_or(OracleError::NonPositiveDefinite)?.l();
            let quad_term = 0.5 * (xi.transpose() * w_cov * xi)[(0, 0)];
            gaussian_expectation_vec(&step.prior_mean, &prior_l, order, &mut out, |xp, acc| {
                let fx = model.transition(xp, &step.u);
                let shift = &fx + w_cov * xi;
                let factor = (xi.dot(&fx) + quad_term).exp();
                let mut inner = [0.0];
                gaussian_expectation_vec(&shift, &w_l, order, &mut inner, |x, v| {
                    v[0] = obs.pdf(&(&step.y - model.observation(x))).unwrap_or(0.0);
                });
                acc[0] = factor * inner[0];
            });
        }
        Ok(out)
    })?;
    Ok(vals[0])
}

/// Pointwise value of the unnormalized joint density of `(x, y)` given
/// the step data.
pub fn joint_density(
    model: &dyn StateSpaceModel,
    step: &StepData,
    x: &DVector<f64>,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let obs = observation_density(model)?;
    let lik = obs.pdf(&(&step.y - model.observation(x)))?;
    if model.linear_in_state() {
        let marg = marginal(model, step, cfg.hermite_order)?;
        let gauss = GaussianDensity::new(marg.mean, marg.cov)?;
        return Ok(lik * gauss.pdf(x)?);
    }
    let w_density = GaussianDensity::new(
        DVector::zeros(model.state_dim()),
        model.process_noise_cov().clone(),
    )?;
    let prior_l = step
        .prior_cov
        .clone()
        .cholesky()
        .ok_or(OracleError::NonPositiveDefinite)?
        .l();
    let vals = refine_vec(cfg, |order| {
        let mut out = vec![0.0];
        gaussian_expectation_vec(&step.prior_mean, &prior_l, order, &mut out, |xp, acc| {
            let fx = model.transition(xp, &step.u);
            acc[0] = w_density.pdf(&(x - fx)).unwrap_or(0.0);
        });
        Ok(out)
    })?;
    Ok(lik * vals[0])
}

/// Composite-Simpson evaluation of a scalar-state moment integral over
/// `marginal mean +/- truncation_sigmas * sigma`; a deliberately
/// different integration rule for cross-checking the Hermite path.
pub fn phi_by_simpson(
    model: &dyn StateSpaceModel,
    step: &StepData,
    weight: &[u32],
    cfg: &QuadratureConfig,
    intervals: usize,
) -> Result<f64> {
    assert_eq!(model.state_dim(), 1, "Simpson cross-check is one-dimensional");
    let intervals = intervals + intervals % 2;
    let marg = marginal(model, step, cfg.hermite_order)?;
    let sigma = marg.cov[(0, 0)].sqrt();
    let lo = marg.mean[0] - cfg.truncation_sigmas * sigma;
    let hi = marg.mean[0] + cfg.truncation_sigmas * sigma;
    let h = (hi - lo) / intervals as f64;
    let mut acc = 0.0;
    for i in 0..=intervals {
        let x = DVector::from_element(1, lo + i as f64 * h);
        let g = monomial_value(&x, weight) * joint_density(model, step, &x, cfg)?;
        let c = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += c * g;
    }
    Ok(acc * h / 3.0)
}
