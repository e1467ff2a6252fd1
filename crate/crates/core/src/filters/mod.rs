//! Filtering: the transport-based step, the quadrature-oracle step, and
//! the KF/EKF/UKF/PF baselines, all producing Gaussian beliefs.

mod hgm_filter;
mod kalman;
mod oracle_filter;
mod particle;
mod runner;
mod table;
mod unscented;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::hgm::HgmError;
use crate::models::{GaussianDensity, ModelError};
use crate::oracle::{OracleError, StepData};
use crate::pfaffian::PfaffianError;
use crate::ratfun::RatfunError;

pub use hgm_filter::{hgm_moments, hgm_step, HgmFilterAssets};
pub use kalman::{ekf_step, kf_step};
pub use oracle_filter::oracle_step;
pub use particle::{init_particles, pf_step, ParticleSet};
pub use runner::{AnyFilter, FilterKind, FilterState};
pub use table::{build_grid_table, InitialPointTable};
pub use unscented::{ukf_step, UkfParams};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("covariance is not positive definite")]
    SingularCovariance,
    #[error("belief contains non-finite values")]
    NonFiniteBelief,
    #[error("evidence integral is not positive ({value})")]
    NonPositiveEvidence { value: f64 },
    #[error("covariance repair would need jitter {needed:e}, above the {allowed:e} budget")]
    CovarianceRepairExceeded { needed: f64, allowed: f64 },
    #[error("initial-point table is empty")]
    EmptyTable,
    #[error("table csv: {0}")]
    TableFormat(String),
    #[error(transparent)]
    Hgm(#[from] HgmError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
}

pub type Result<T> = std::result::Result<T, FilterError>;

/// Minimum eigenvalue enforced by covariance repair.
const MIN_EIGENVALUE: f64 = 1e-10;
/// Repair budget as a fraction of the trace.
const MAX_JITTER_FRACTION: f64 = 1e-4;

/// Gaussian posterior belief. Construct results through [`GaussianBelief::repaired`],
/// which symmetrizes and restores positive definiteness within a budget.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBelief {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        GaussianBelief { mean, cov }
    }

    pub fn scalar(mean: f64, var: f64) -> Self {
        GaussianBelief::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, var))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Symmetrize, then push eigenvalues up to the floor via diagonal
    /// jitter. Fails if the belief is non-finite or the required jitter
    /// exceeds the trace-relative budget. Returns the applied jitter.
    pub fn repaired(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<(Self, f64)> {
        if mean.iter().any(|v| !v.is_finite()) || cov.iter().any(|v| !v.is_finite()) {
            return Err(FilterError::NonFiniteBelief);
        }
        let mut sym = (&cov + cov.transpose()) * 0.5;
        let eigmin = sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        let mut jitter = 0.0;
        if eigmin < MIN_EIGENVALUE {
            jitter = MIN_EIGENVALUE - eigmin;
            // Restoring the floor itself is always allowed; anything
            // beyond floor scale must stay small relative to the trace.
            let allowed = (MAX_JITTER_FRACTION * sym.trace().abs()).max(2.0 * MIN_EIGENVALUE);
            if jitter > allowed {
                return Err(FilterError::CovarianceRepairExceeded { needed: jitter, allowed });
            }
            for i in 0..sym.nrows() {
                sym[(i, i)] += jitter;
            }
        }
        Ok((GaussianBelief { mean, cov: sym }, jitter))
    }

    pub fn to_density(&self) -> Result<GaussianDensity> {
        Ok(GaussianDensity::new(self.mean.clone(), self.cov.clone())?)
    }
}

/// Per-step filter input: observation, input, and the previous posterior.
#[derive(Debug, Clone)]
pub struct FilterStepInput {
    pub y: DVector<f64>,
    pub u: DVector<f64>,
    pub prior: GaussianBelief,
}

impl FilterStepInput {
    pub fn new(y: DVector<f64>, u: DVector<f64>, prior: GaussianBelief) -> Self {
        FilterStepInput { y, u, prior }
    }

    pub fn to_step_data(&self) -> StepData {
        StepData::new(
            self.y.clone(),
            self.u.clone(),
            self.prior.mean.clone(),
            self.prior.cov.clone(),
        )
    }

    /// Flattened step data `(y, u, mean, vech(cov))`.
    pub fn z_vector(&self) -> DVector<f64> {
        self.to_step_data().z_vector()
    }
}

/// Negative log-likelihood of the true state under the belief; the
/// experiment's accuracy metric (lower is better).
pub fn nll(belief: &GaussianBelief, x_true: &DVector<f64>) -> Result<f64> {
    Ok(-belief.to_density()?.log_pdf(x_true)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nll_of_standard_normal() {
        let b = GaussianBelief::scalar(0.0, 1.0);
        let at = |x: f64| nll(&b, &DVector::from_element(1, x)).unwrap();
        assert!((at(0.0) - 0.9189385332046727).abs() < 1e-12);
        assert!((at(2.0) - (0.9189385332046727 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn overconfident_wrong_belief_scores_worse() {
        let wide = GaussianBelief::scalar(0.0, 1.0);
        let narrow = GaussianBelief::scalar(0.0, 0.01);
        let x = DVector::from_element(1, 1.0);
        let expected_narrow = 50.0 + 0.5 * (2.0 * std::f64::consts::PI * 0.01).ln();
        assert!((nll(&narrow, &x).unwrap() - expected_narrow).abs() < 1e-9);
        assert!(nll(&narrow, &x).unwrap() > nll(&wide, &x).unwrap());
    }

    #[test]
    fn repair_symmetrizes_and_floors() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 3e-5, 1e-5, 1.0]);
        let (b, jitter) = GaussianBelief::repaired(DVector::zeros(2), cov).unwrap();
        assert_eq!(b.cov[(0, 1)], b.cov[(1, 0)]);
        assert_eq!(jitter, 0.0);

        let negative = DMatrix::from_row_slice(1, 1, &[-1e-12]);
        let (b, jitter) = GaussianBelief::repaired(DVector::zeros(1), negative).unwrap();
        assert!(jitter > 0.0);
        assert!(b.cov[(0, 0)] >= MIN_EIGENVALUE * 0.999);
    }

    #[test]
    fn repair_refuses_large_defects() {
        let bad = DMatrix::from_row_slice(1, 1, &[-0.5]);
        assert!(matches!(
            GaussianBelief::repaired(DVector::zeros(1), bad),
            Err(FilterError::CovarianceRepairExceeded { .. })
        ));
    }

    #[test]
    fn non_finite_belief_is_rejected() {
        let bad = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(
            GaussianBelief::repaired(DVector::zeros(1), bad),
            Err(FilterError::NonFiniteBelief)
        ));
    }
}
