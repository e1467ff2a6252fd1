//! Built-in example systems.

use nalgebra::{DMatrix, DVector};

use super::{ModelError, Result, StateSpaceModel};

/// Scalar system with linear dynamics and a saturating rational
/// observation:
///
/// ```text
/// x = 4/5 x- + u + w,   y = 2x / (1 + x^2) + v
/// ```
///
/// with unit-variance Gaussian noises. The observation slope flips sign
/// at |x| = 1, which is what breaks simple linearization.
#[derive(Debug, Clone)]
pub struct Nonlinear1d {
    sigma_w: DMatrix<f64>,
    sigma_v: DMatrix<f64>,
}

impl Nonlinear1d {
    pub fn new() -> Self {
        Nonlinear1d {
            sigma_w: DMatrix::from_element(1, 1, 1.0),
            sigma_v: DMatrix::from_element(1, 1, 1.0),
        }
    }
}

impl Default for Nonlinear1d {
    fn default() -> Self {
        Self::new()
    }
}

impl StateSpaceModel for Nonlinear1d {
    fn name(&self) -> &'static str {
        "nonlinear1d"
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn transition(&self, x_prev: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, 0.8 * x_prev[0] + u[0])
    }

    fn transition_jacobian(&self, _x_prev: &DVector<f64>, _u: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 0.8)
    }

    fn observation(&self, x: &DVector<f64>) -> DVector<f64> {
        let v = x[0];
        DVector::from_element(1, 2.0 * v / (1.0 + v * v))
    }

    fn observation_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let v = x[0];
        let d = 1.0 + v * v;
        DMatrix::from_element(1, 1, 2.0 * (1.0 - v * v) / (d * d))
    }

    fn process_noise_cov(&self) -> &DMatrix<f64> {
        &self.sigma_w
    }

    fn observation_noise_cov(&self) -> &DMatrix<f64> {
        &self.sigma_v
    }

    fn linear_in_state(&self) -> bool {
        true
    }
}

/// Scalar linear-Gaussian system `x = a x- + u + w`, `y = c x + v`;
/// the Kalman filter is exact here, which makes it the validation model.
#[derive(Debug, Clone)]
pub struct LinearGaussian {
    a: f64,
    c: f64,
    sigma_w: DMatrix<f64>,
    sigma_v: DMatrix<f64>,
}

impl LinearGaussian {
    pub fn new(a: f64, c: f64, var_w: f64, var_v: f64) -> Result<Self> {
        if var_w <= 0.0 || var_v <= 0.0 {
            return Err(ModelError::NonPositiveVariance { var_w, var_v });
        }
        Ok(LinearGaussian {
            a,
            c,
            sigma_w: DMatrix::from_element(1, 1, var_w),
            sigma_v: DMatrix::from_element(1, 1, var_v),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl StateSpaceModel for LinearGaussian {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn output_dim(&self) -> usize {
        1
    }

    fn input_dim(&self) -> usize {
        1
    }

    fn transition(&self, x_prev: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, self.a * x_prev[0] + u[0])
    }

    fn transition_jacobian(&self, _x_prev: &DVector<f64>, _u: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.a)
    }

    fn observation(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, self.c * x[0])
    }

    fn observation_jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.c)
    }

    fn process_noise_cov(&self) -> &DMatrix<f64> {
        &self.sigma_w
    }

    fn observation_noise_cov(&self) -> &DMatrix<f64> {
        &self.sigma_v
    }

    fn linear_in_state(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v1(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    #[test]
    fn nonlinear_transition_and_observation_values() {
        let m = Nonlinear1d::new();
        assert!((m.transition(&v1(1.0), &v1(0.0))[0] - 0.8).abs() < 1e-15);
        assert!((m.observation(&v1(1.0))[0] - 1.0).abs() < 1e-15);
        assert_eq!(m.observation(&v1(0.0))[0], 0.0);
        assert_eq!(m.observation_jacobian(&v1(0.0))[(0, 0)], 2.0);
    }

    #[test]
    fn linear_model_values() {
        let m = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        assert!((m.transition(&v1(1.0), &v1(0.0))[0] - 0.8).abs() < 1e-15);
        assert_eq!(m.observation(&v1(2.0))[0], 2.0);
        assert_eq!(m.transition_jacobian(&v1(5.0), &v1(0.0))[(0, 0)], 0.8);
        assert_eq!(m.observation_jacobian(&v1(5.0))[(0, 0)], 1.0);
    }

    #[test]
    fn zero_variance_is_rejected() {
        assert!(matches!(
            LinearGaussian::new(0.8, 1.0, 1.0, 0.0),
            Err(ModelError::NonPositiveVariance { .. })
        ));
    }
}
