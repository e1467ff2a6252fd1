//! Unscented Kalman step with scaled symmetric sigma points.

use nalgebra::{DMatrix, DVector};

use crate::models::StateSpaceModel;

use super::{FilterError, FilterStepInput, GaussianBelief, Result};

/// Sigma-point scaling parameters `(alpha, beta, kappa)`.
#[derive(Debug, Clone, Copy)]
pub struct UkfParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UkfParams {
    fn default() -> Self {
        UkfParams { alpha: 1.0, beta: 2.0, kappa: 0.0 }
    }
}

struct SigmaPoints {
    points: Vec<DVector<f64>>,
    w_mean0: f64,
    w_cov0: f64,
    w_i: f64,
}

fn sigma_points(mean: &DVector<f64>, cov: &DMatrix<f64>, p: &UkfParams) -> Result<SigmaPoints> {
    let n = mean.len();
    let nf = n as f64;
    let lambda = p.alpha * p.alpha * (nf + p.kappa) - nf;
    let gamma = (nf + lambda).sqrt();
    let l = cov.clone().cholesky().ok_or(FilterError::SingularCovariance)?.l();

    let mut points = Vec::with_capacity(2 * n + 1);
    points.push(mean.clone());
    for i in 0..n {
        let col = gamma * l.column(i);
        points.push(mean + &col);
        points.push(mean - &col);
    }
    Ok(SigmaPoints {
        points,
        w_mean0: lambda / (nf + lambda),
        w_cov0: lambda / (nf + lambda) + (1.0 - p.alpha * p.alpha + p.beta),
        w_i: 0.5 / (nf + lambda),
    })
}

fn weighted_mean(sp: &SigmaPoints, mapped: &[DVector<f64>]) -> DVector<f64> {
    let mut m = sp.w_mean0 * &mapped[0];
    for pt in &mapped[1..] {
        m += sp.w_i * pt;
    }
    m
}

fn weighted_cov(
    sp: &SigmaPoints,
    a: &[DVector<f64>],
    a_mean: &DVector<f64>,
    b: &[DVector<f64>],
    b_mean: &DVector<f64>,
) -> DMatrix<f64> {
    let d0a = &a[0] - a_mean;
    let d0b = &b[0] - b_mean;
    let mut cov = sp.w_cov0 * &d0a * d0b.transpose();
    for (pa, pb) in a[1..].iter().zip(&b[1..]) {
        cov += sp.w_i * (pa - a_mean) * (pb - b_mean).transpose();
    }
    cov
}

/// One UKF predict + update. Sigma points are redrawn from the predicted
/// belief before the observation update.
pub fn ukf_step(
    model: &dyn StateSpaceModel,
    input: &FilterStepInput,
    params: &UkfParams,
) -> Result<GaussianBelief> {
    let sp = sigma_points(&input.prior.mean, &input.prior.cov, params)?;
    let propagated: Vec<DVector<f64>> =
        sp.points.iter().map(|x| model.transition(x, &input.u)).collect();
    let m_pred = weighted_mean(&sp, &propagated);
    let mut p_pred = weighted_cov(&sp, &propagated, &m_pred, &propagated, &m_pred);
    p_pred += model.process_noise_cov();
    p_pred = (&p_pred + p_pred.transpose()) * 0.5;

    let sp2 = sigma_points(&m_pred, &p_pred, params)?;
    let observed: Vec<DVector<f64>> = sp2.points.iter().map(|x| model.observation(x)).collect();
    let y_pred = weighted_mean(&sp2, &observed);
    let mut s = weighted_cov(&sp2, &observed, &y_pred, &observed, &y_pred);
    s += model.observation_noise_cov();
    let cross = weighted_cov(&sp2, &sp2.points, &m_pred, &observed, &y_pred);

    let chol = s.clone().cholesky().ok_or(FilterError::SingularCovariance)?;
    let gain = chol.solve(&cross.transpose()).transpose();
    let mean = &m_pred + &gain * (&input.y - y_pred);
    let cov = p_pred - &gain * s * gain.transpose();
    Ok(GaussianBelief::repaired(mean, cov)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::kf_step;
    use crate::models::LinearGaussian;

    #[test]
    fn ukf_equals_kf_on_linear_model() {
        // Linear maps make the unscented transform exact for any scaling.
        let model = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
        for (y, u, m, v) in [(0.9, 0.3, -0.4, 1.7), (-2.0, 0.0, 1.2, 0.4)] {
            let input = FilterStepInput::new(
                DVector::from_element(1, y),
                DVector::from_element(1, u),
                GaussianBelief::scalar(m, v),
            );
            let kf = kf_step(&model, &input).unwrap();
            let ukf = ukf_step(&model, &input, &UkfParams::default()).unwrap();
            assert!((kf.mean[0] - ukf.mean[0]).abs() < 1e-9);
            assert!((kf.cov[(0, 0)] - ukf.cov[(0, 0)]).abs() < 1e-9);
        }
    }
}
