//! Kalman and extended Kalman steps (predict + update in one call).

use nalgebra::{DMatrix, DVector};

use crate::models::StateSpaceModel;

use super::{FilterError, FilterStepInput, GaussianBelief, Result};

fn joseph_update(
    m_pred: DVector<f64>,
    p_pred: DMatrix<f64>,
    h_mat: &DMatrix<f64>,
    innovation: &DVector<f64>,
    r_cov: &DMatrix<f64>,
) -> Result<GaussianBelief> {
    let s = h_mat * &p_pred * h_mat.transpose() + r_cov;
    let chol = s.cholesky().ok_or(FilterError::SingularCovariance)?;
    let ph_t = &p_pred * h_mat.transpose();
    let gain = chol.solve(&ph_t.transpose()).transpose();
    let mean = m_pred + &gain * innovation;
    let n = p_pred.nrows();
    let i_kh = DMatrix::identity(n, n) - &gain * h_mat;
    let cov = &i_kh * p_pred * i_kh.transpose() + &gain * r_cov * gain.transpose();
    Ok(GaussianBelief::repaired(mean, cov)?.0)
}

/// Exact Kalman step for linear models, using the Jacobians at the
/// origin as the system matrices (`f(x,u) = F x + g(u)`, `h(x) = H x + h0`).
pub fn kf_step(model: &dyn StateSpaceModel, input: &FilterStepInput) -> Result<GaussianBelief> {
    let zero = DVector::zeros(model.state_dim());
    let f_mat = model.transition_jacobian(&zero, &input.u);
    let m_pred = &f_mat * &input.prior.mean + model.input_offset(&input.u);
    let p_pred = &f_mat * &input.prior.cov * f_mat.transpose() + model.process_noise_cov();

    let h_mat = model.observation_jacobian(&zero);
    let h0 = model.observation(&zero);
    let innovation = &input.y - (&h_mat * &m_pred + h0);
    joseph_update(m_pred, p_pred, &h_mat, &innovation, model.observation_noise_cov())
}

/// Extended Kalman step: linearize the transition at the prior mean and
/// the observation at the predicted mean.
pub fn ekf_step(model: &dyn StateSpaceModel, input: &FilterStepInput) -> Result<GaussianBelief> {
    let f_mat = model.transition_jacobian(&input.prior.mean, &input.u);
    let m_pred = model.transition(&input.prior.mean, &input.u);
    let p_pred = &f_mat * &input.prior.cov * f_mat.transpose() + model.process_noise_cov();

    let h_mat = model.observation_jacobian(&m_pred);
    let innovation = &input.y - model.observation(&m_pred);
    joseph_update(m_pred, p_pred, &h_mat, &innovation, model.observation_noise_cov())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::LinearGaussian;

    fn input(y: f64, u: f64, mean: f64, var: f64) -> FilterStepInput {
        FilterStepInput::new(
            DVector::from_element(1, y),
            DVector::from_element(1, u),
            GaussianBelief::scalar(mean, var),
        )
    }

    #[test]
    fn kf_matches_scalar_closed_form() {
        let model = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        let inp = input(0.9, 0.3, -0.4, 1.7);
        let out = kf_step(&model, &inp).unwrap();

        let m_pred = 0.8 * -0.4 + 0.3;
        let p_pred = 0.64 * 1.7 + 1.0;
        let s = p_pred + 1.0;
        let k = p_pred / s;
        let mu = m_pred + k * (0.9 - m_pred);
        let var = (1.0 - k) * p_pred;
        assert!((out.mean[0] - mu).abs() < 1e-14);
        assert!((out.cov[(0, 0)] - var).abs() < 1e-14);
    }

    #[test]
    fn ekf_equals_kf_on_linear_model() {
        let model = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        let inp = input(-1.2, 0.5, 0.7, 0.9);
        let kf = kf_step(&model, &inp).unwrap();
        let ekf = ekf_step(&model, &inp).unwrap();
        assert!((kf.mean[0] - ekf.mean[0]).abs() < 1e-14);
        assert!((kf.cov[(0, 0)] - ekf.cov[(0, 0)]).abs() < 1e-14);
    }
}
