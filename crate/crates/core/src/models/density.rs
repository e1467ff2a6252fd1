//! Gaussian densities with validated covariance.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{ModelError, Result};

/// Mean and symmetric positive definite covariance.
#[derive(Debug, Clone)]
pub struct GaussianDensity {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: Cholesky<f64, nalgebra::Dyn>,
}

impl GaussianDensity {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(ModelError::DimensionMismatch(format!(
                "mean has {n} entries, covariance is {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-12 * cov.amax().max(1.0) {
            return Err(ModelError::AsymmetricCovariance { defect: asym });
        }
        let chol = cov.clone().cholesky().ok_or(ModelError::SingularCovariance)?;
        Ok(GaussianDensity { mean, cov, chol })
    }

    pub fn scalar(mean: f64, var: f64) -> Result<Self> {
        Self::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, var))
    }

    pub fn standard(n: usize) -> Self {
        Self::new(DVector::zeros(n), DMatrix::identity(n, n)).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower Cholesky factor of the covariance.
    pub fn chol_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `-(n log 2pi + log det S + (x-m)' S^-1 (x-m)) / 2`
    pub fn log_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(ModelError::DimensionMismatch(format!(
                "point has {} entries, density has {}",
                x.len(),
                self.dim()
            )));
        }
        let n = self.dim() as f64;
        let diff = x - &self.mean;
        let solved = self.chol.solve(&diff);
        let quad = diff.dot(&solved);
        let logdet = 2.0 * self.chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(-0.5 * (n * (2.0 * std::f64::consts::PI).ln() + logdet + quad))
    }

    pub fn pdf(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }
}

/// Standalone scalar Gaussian log-density, used in inner loops where
/// building a [`GaussianDensity`] per call would be wasteful.
pub fn scalar_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + d * d / var)
}
