//! State-space models, Gaussian density utilities, and simulation.

mod builtin;
mod density;
pub mod rng;
mod sim;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use builtin::{LinearGaussian, Nonlinear1d};
pub use density::{scalar_log_pdf, GaussianDensity};
pub use sim::{input_signal, simulate, trajectory_from_csv, trajectory_to_csv, Trajectory};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("noise variances must be positive (got var_w = {var_w}, var_v = {var_v})")]
    NonPositiveVariance { var_w: f64, var_v: f64 },
    #[error("covariance is not positive definite")]
    SingularCovariance,
    #[error("covariance asymmetry {defect:e} exceeds tolerance")]
    AsymmetricCovariance { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Discrete-time stochastic system
///
/// ```text
/// x_k = f(x_{k-1}, u_k) + w_k,    w ~ N(0, process_noise_cov)
/// y_k = h(x_k) + v_k,             v ~ N(0, observation_noise_cov)
/// ```
///
/// Implementations are immutable and shareable across threads.
pub trait StateSpaceModel: Send + Sync {
    fn name(&self) -> &str;

    fn state_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn input_dim(&self) -> usize;

    fn transition(&self, x_prev: &DVector<f64>, u: &DVector<f64>) -> DVector<f64>;
    fn transition_jacobian(&self, x_prev: &DVector<f64>, u: &DVector<f64>) -> DMatrix<f64>;

    fn observation(&self, x: &DVector<f64>) -> DVector<f64>;
    fn observation_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;

    fn process_noise_cov(&self) -> &DMatrix<f64>;
    fn observation_noise_cov(&self) -> &DMatrix<f64>;

    /// True when `f(x, u) = F x + g(u)` exactly, in which case the
    /// one-step state marginal of a Gaussian prior stays Gaussian.
    fn linear_in_state(&self) -> bool;

    /// `g(u)` of a linear-in-state transition.
    fn input_offset(&self, u: &DVector<f64>) -> DVector<f64> {
        self.transition(&DVector::zeros(self.state_dim()), u)
    }
}

/// Check analytic Jacobians against Richardson-extrapolated central
/// differences at random points; a test- and validation-time guard.
pub fn validate_jacobians(
    model: &dyn StateSpaceModel,
    points: usize,
    tol: f64,
    rng: &mut impl rand::Rng,
) -> Result<()> {
    let n = model.state_dim();
    for _ in 0..points {
        let x = DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-3.0..3.0)));
        let u = DVector::from_iterator(
            model.input_dim(),
            (0..model.input_dim()).map(|_| rng.random_range(-1.0..1.0)),
        );

        let jf = model.transition_jacobian(&x, &u);
        let jh = model.observation_jacobian(&x);
        for j in 0..n {
            let shift = |delta: f64| {
                let mut xs = x.clone();
                xs[j] += delta;
                (model.transition(&xs, &u), model.observation(&xs))
            };
            let h = 1e-5;
            let (fp, hp) = shift(h);
            let (fm, hm) = shift(-h);
            let (fp2, hp2) = shift(h / 2.0);
            let (fm2, hm2) = shift(-h / 2.0);
            let col_f = (4.0 * (fp2 - fm2) / h - (fp - fm) / (2.0 * h)) / 3.0;
            let col_h = (4.0 * (hp2 - hm2) / h - (hp - hm) / (2.0 * h)) / 3.0;
            let df = (jf.column(j) - col_f).amax();
            let dh = (jh.column(j) - col_h).amax();
            if df > tol || dh > tol {
                return Err(ModelError::DimensionMismatch(format!(
                    "jacobian defect at x = {x:?}: transition {df:e}, observation {dh:e}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn builtin_jacobians_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let nl = Nonlinear1d::new();
        validate_jacobians(&nl, 100, 1e-6, &mut rng).unwrap();
        let lin = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        validate_jacobians(&lin, 100, 1e-6, &mut rng).unwrap();
    }

    #[test]
    fn transition_density_factorization() {
        // p(x | x-; u) = p_w(x - f(x-, u)) must equal a Gaussian in x
        // centered at f(x-, u); exact by construction, checked on a grid.
        let m = Nonlinear1d::new();
        let w = GaussianDensity::scalar(0.0, 1.0).unwrap();
        for (xp, u, x) in [(0.3, 0.5, 1.0), (-1.2, 0.0, 0.4), (2.0, -0.7, 2.2)] {
            let xp = DVector::from_element(1, xp);
            let u = DVector::from_element(1, u);
            let x = DVector::from_element(1, x);
            let f = m.transition(&xp, &u);
            let lhs = w.log_pdf(&(&x - &f)).unwrap();
            let centered = GaussianDensity::new(f, m.process_noise_cov().clone()).unwrap();
            let rhs = centered.log_pdf(&x).unwrap();
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }
}
