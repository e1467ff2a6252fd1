//! Direct numerical evaluation of the step integrals: the ground-truth
//! engine.
//!
//! Everything here computes the same objects the path-transport filter
//! obtains from a Pfaffian system, but by explicit Gaussian quadrature:
//! the joint density of (state, output) given the step data, its
//! exp-weighted transform, the moment integrals, and the initial vectors
//! that seed transport tables. Quadrature results are accepted only when
//! doubling the rule order reproduces them within tolerance.

mod annihilator;
mod brute;
mod initvec;
mod quadrature;
mod transform;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::models::ModelError;
use crate::ratfun::RatfunError;

pub use annihilator::{annihilator_residual, numeric_partial, DifferentialOperator};
pub use brute::{importance_posterior_mean, ImportanceEstimate};
pub use initvec::initial_vector;
pub use quadrature::{gaussian_expectation, hermite_rule, HermiteRule};
pub use transform::{joint_density, moments, phi_by_simpson, transform_value, weighted_moments};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("refinement failed: order {order} gave {coarse}, order {refined_order} gave {refined}")]
    RefinementFailure { order: usize, coarse: f64, refined_order: usize, refined: f64 },
    #[error("prior covariance is not positive definite")]
    NonPositiveDefinite,
    #[error("monomial {index:?} mixes more than two parameter derivatives")]
    UnsupportedMonomial { index: Vec<u32> },
    #[error("finite differences did not stabilize: {last} vs {previous}")]
    FiniteDifferenceFailure { previous: f64, last: f64 },
    #[error("{0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Quadrature controls. `hermite_order` is the base rule; results must
/// survive order doubling (up to `refinement_max` doublings) within
/// `tolerance`. `truncation_sigmas` bounds the range of the secondary
/// Simpson integrator used for cross-checks.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub hermite_order: usize,
    pub truncation_sigmas: f64,
    pub tolerance: f64,
    pub refinement_max: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        // refinement_max of 6 lets the ladder reach order 4096. Rational
        // observation maps have complex poles near the real axis, which
        // caps Gauss-Hermite at exp(-c sqrt(order)) convergence; the
        // benchmark model needs order ~1024 before doubling agrees at
        // 1e-10.
        QuadratureConfig {
            hermite_order: 64,
            truncation_sigmas: 8.0,
            tolerance: 1e-10,
            refinement_max: 6,
        }
    }
}

impl QuadratureConfig {
    pub fn validated(self) -> Result<Self> {
        if self.hermite_order < 8 {
            return Err(OracleError::InvalidConfig(format!(
                "hermite_order {} below the minimum of 8",
                self.hermite_order
            )));
        }
        if self.truncation_sigmas < 4.0 {
            return Err(OracleError::InvalidConfig(format!(
                "truncation_sigmas {} below the minimum of 4",
                self.truncation_sigmas
            )));
        }
        Ok(self)
    }
}

/// One filtering step's data: output, input, and the previous posterior.
/// Its flattened form is the parameter point the transport systems move
/// through.
#[derive(Debug, Clone)]
pub struct StepData {
    pub y: DVector<f64>,
    pub u: DVector<f64>,
    pub prior_mean: DVector<f64>,
    pub prior_cov: DMatrix<f64>,
}

impl StepData {
    pub fn new(
        y: DVector<f64>,
        u: DVector<f64>,
        prior_mean: DVector<f64>,
        prior_cov: DMatrix<f64>,
    ) -> Self {
        StepData { y, u, prior_mean, prior_cov }
    }

    /// Length of the flattened vector for dimensions `(r, m, n)`:
    /// `r + m + n + n(n+1)/2`.
    pub fn z_len(r: usize, m: usize, n: usize) -> usize {
        r + m + n + n * (n + 1) / 2
    }

    /// Flatten as `(y, u, mean, vech(cov))` with `vech` the column-stacked
    /// lower triangle. This ordering is fixed; tables and fixtures depend
    /// on it.
    pub fn z_vector(&self) -> DVector<f64> {
        let n = self.prior_mean.len();
        let mut out = Vec::with_capacity(Self::z_len(self.y.len(), self.u.len(), n));
        out.extend(self.y.iter());
        out.extend(self.u.iter());
        out.extend(self.prior_mean.iter());
        for j in 0..n {
            for i in j..n {
                out.push(self.prior_cov[(i, j)]);
            }
        }
        DVector::from_vec(out)
    }

    /// Rebuild from a flattened vector.
    pub fn from_z(
        r: usize,
        m: usize,
        n: usize,
        z: &[f64],
    ) -> std::result::Result<Self, ModelError> {
        if z.len() != Self::z_len(r, m, n) {
            return Err(ModelError::DimensionMismatch(format!(
                "z has {} entries, expected {}",
                z.len(),
                Self::z_len(r, m, n)
            )));
        }
        let y = DVector::from_column_slice(&z[0..r]);
        let u = DVector::from_column_slice(&z[r..r + m]);
        let mean = DVector::from_column_slice(&z[r + m..r + m + n]);
        let mut cov = DMatrix::zeros(n, n);
        let mut k = r + m + n;
        for j in 0..n {
            for i in j..n {
                cov[(i, j)] = z[k];
                cov[(j, i)] = z[k];
                k += 1;
            }
        }
        Ok(StepData { y, u, prior_mean: mean, prior_cov: cov })
    }
}

/// The three step integrals: mass, first moments, second moments of the
/// unnormalized joint density over the state.
#[derive(Debug, Clone)]
pub struct MomentVector {
    pub phi0: f64,
    pub phi1: DVector<f64>,
    pub phi2: DMatrix<f64>,
}

impl MomentVector {
    /// Posterior mean `phi1/phi0`.
    pub fn mean(&self) -> DVector<f64> {
        &self.phi1 / self.phi0
    }

    /// Posterior covariance `phi2/phi0 - mean mean'`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mu = self.mean();
        &self.phi2 / self.phi0 - &mu * mu.transpose()
    }
}
