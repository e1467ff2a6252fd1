//! Cross-validation of the quadrature engine: closed forms, symmetry,
//! finite differences, an independent integration rule, and Monte Carlo.

use hgf_core::models::{LinearGaussian, Nonlinear1d, StateSpaceModel};
use hgf_core::oracle::{
    importance_posterior_mean, joint_density, moments, phi_by_simpson, transform_value,
    weighted_moments, QuadratureConfig, StepData,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn step1(y: f64, u: f64, mean: f64, var: f64) -> StepData {
    StepData::new(
        DVector::from_element(1, y),
        DVector::from_element(1, u),
        DVector::from_element(1, mean),
        DMatrix::from_element(1, 1, var),
    )
}

fn random_step(rng: &mut ChaCha8Rng) -> StepData {
    step1(
        rng.random_range(-2.0..2.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(0.3..3.0),
    )
}

/// One exact Kalman step (predict + update) for the scalar linear model.
fn kalman_step(a: f64, c: f64, qw: f64, rv: f64, step: &StepData) -> (f64, f64) {
    let m_pred = a * step.prior_mean[0] + step.u[0];
    let p_pred = a * a * step.prior_cov[(0, 0)] + qw;
    let s = c * c * p_pred + rv;
    let k = p_pred * c / s;
    let mu = m_pred + k * (step.y[0] - c * m_pred);
    let var = (1.0 - k * c) * p_pred;
    (mu, var)
}

fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-0.5 * (x - mean) * (x - mean) / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

#[test]
fn state_marginal_of_benchmark_model() {
    // Prior N(0,1), u = 0: the state marginal is N(0, 0.8^2 + 1) and the
    // joint factorizes against it pointwise.
    let model = Nonlinear1d::new();
    let step = step1(0.4, 0.0, 0.0, 1.0);
    for x in [-1.3, 0.0, 0.7, 2.1] {
        let xv = DVector::from_element(1, x);
        let j = joint_density(&model, &step, &xv, &cfg()).unwrap();
        let h = 2.0 * x / (1.0 + x * x);
        let expected = normal_pdf(step.y[0], h, 1.0) * normal_pdf(x, 0.0, 1.64);
        assert!((j - expected).abs() <= 1e-12 * expected.max(1e-3), "x = {x}: {j} vs {expected}");
    }
}

#[test]
fn joint_density_tail_is_negligible() {
    let model = Nonlinear1d::new();
    let step = step1(0.0, 0.0, 0.0, 1.0);
    // 12 marginal standard deviations out.
    let x = DVector::from_element(1, 12.0 * 1.64f64.sqrt());
    let j = joint_density(&model, &step, &x, &cfg()).unwrap();
    assert!(j < 1e-30, "tail value {j}");
}

#[test]
fn phi0_equals_innovation_likelihood_on_linear_model() {
    let (a, c, qw, rv) = (0.8, 1.0, 1.0, 1.0);
    let model = LinearGaussian::new(a, c, qw, rv).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let step = random_step(&mut rng);
        let mom = moments(&model, &step, &cfg()).unwrap();
        let m_pred = a * step.prior_mean[0] + step.u[0];
        let p_pred = a * a * step.prior_cov[(0, 0)] + qw;
        let expected = normal_pdf(step.y[0], c * m_pred, c * c * p_pred + rv);
        assert!((mom.phi0 - expected).abs() <= 1e-9 * expected, "{} vs {expected}", mom.phi0);
    }
}

#[test]
fn transform_at_zero_is_phi0() {
    let model = Nonlinear1d::new();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..5 {
        let step = random_step(&mut rng);
        let t0 = transform_value(&model, &step, &DVector::zeros(1), &cfg()).unwrap();
        let mom = moments(&model, &step, &cfg()).unwrap();
        assert!((t0 - mom.phi0).abs() <= 1e-11 * mom.phi0.max(1.0));
    }
}

#[test]
fn transform_matches_linear_closed_form() {
    // T(xi) = N(y; c m, c^2 V + r) * exp(xi mu* + xi^2 s*^2 / 2) with the
    // posterior mean and variance completing the square.
    let (a, c, qw, rv) = (0.8, 1.0, 1.0, 1.0);
    let model = LinearGaussian::new(a, c, qw, rv).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..10 {
        let step = random_step(&mut rng);
        let (mu_star, var_star) = kalman_step(a, c, qw, rv, &step);
        let m_pred = a * step.prior_mean[0] + step.u[0];
        let p_pred = a * a * step.prior_cov[(0, 0)] + qw;
        let evidence = normal_pdf(step.y[0], c * m_pred, c * c * p_pred + rv);
        for xi in [-0.8, -0.2, 0.0, 0.3, 1.1] {
            let got =
                transform_value(&model, &step, &DVector::from_element(1, xi), &cfg()).unwrap();
            let expected = evidence * (xi * mu_star + 0.5 * xi * xi * var_star).exp();
            assert!(
                (got - expected).abs() <= 1e-9 * expected,
                "xi = {xi}: {got} vs {expected}"
            );
        }
    }
}

#[test]
fn transform_is_even_for_symmetric_step() {
    // y = 0, u = 0, centered prior: the integrand is even because the
    // observation map is odd.
    let model = Nonlinear1d::new();
    let step = step1(0.0, 0.0, 0.0, 1.0);
    let plus = transform_value(&model, &step, &DVector::from_element(1, 0.3), &cfg()).unwrap();
    let minus = transform_value(&model, &step, &DVector::from_element(1, -0.3), &cfg()).unwrap();
    assert!((plus - minus).abs() <= 1e-10 * plus.max(1.0), "{plus} vs {minus}");
}

#[test]
fn odd_symmetry_zeroes_the_first_moment() {
    let model = Nonlinear1d::new();
    let step = step1(0.0, 0.0, 0.0, 1.0);
    let mom = moments(&model, &step, &cfg()).unwrap();
    assert!(mom.phi0 > 0.0);
    assert!(mom.phi1[0].abs() <= 1e-14, "phi1 = {}", mom.phi1[0]);
}

#[test]
fn posterior_moments_match_kalman_on_linear_model() {
    let (a, c, qw, rv) = (0.8, 1.0, 1.0, 1.0);
    let model = LinearGaussian::new(a, c, qw, rv).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..20 {
        let step = random_step(&mut rng);
        let mom = moments(&model, &step, &cfg()).unwrap();
        let (mu, var) = kalman_step(a, c, qw, rv, &step);
        assert!((mom.mean()[0] - mu).abs() <= 1e-9 * mu.abs().max(1.0));
        assert!((mom.covariance()[(0, 0)] - var).abs() <= 1e-9 * var.max(1.0));
        assert!(mom.phi0 > 0.0);
    }
}

#[test]
fn analytic_weights_agree_with_xi_finite_differences() {
    // d/dxi and d^2/dxi^2 of the transform at xi = 0 are the first and
    // second moment integrals; 50 random steps on both builtin models.
    let linear: Box<dyn StateSpaceModel> = Box::new(LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap());
    let bench: Box<dyn StateSpaceModel> = Box::new(Nonlinear1d::new());
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for model in [&linear, &bench] {
        for _ in 0..25 {
            let step = random_step(&mut rng);
            let mom = moments(model.as_ref(), &step, &cfg()).unwrap();
            let t = |xi: f64| {
                transform_value(model.as_ref(), &step, &DVector::from_element(1, xi), &cfg())
                    .unwrap()
            };
            let h = 1e-4;
            let d1 = (t(h) - t(-h)) / (2.0 * h);
            let d1h = (t(h / 2.0) - t(-h / 2.0)) / h;
            let fd1 = (4.0 * d1h - d1) / 3.0;
            let fd2 = (t(h) - 2.0 * t(0.0) + t(-h)) / (h * h);
            let scale1 = fd1.abs().max(mom.phi1[0].abs()).max(1e-3);
            assert!(
                (fd1 - mom.phi1[0]).abs() <= 1e-6 * scale1,
                "{}: phi1 {} vs fd {fd1}",
                model.name(),
                mom.phi1[0]
            );
            let scale2 = fd2.abs().max(mom.phi2[(0, 0)].abs()).max(1e-3);
            assert!(
                (fd2 - mom.phi2[(0, 0)]).abs() <= 1e-6 * scale2.max(1.0),
                "{}: phi2 {} vs fd {fd2}",
                model.name(),
                mom.phi2[(0, 0)]
            );
        }
    }
}

#[test]
fn simpson_rule_reproduces_hermite_moments() {
    let model = Nonlinear1d::new();
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..5 {
        let step = random_step(&mut rng);
        let mom = moments(&model, &step, &cfg()).unwrap();
        for (weight, expected) in
            [(vec![0u32], mom.phi0), (vec![1], mom.phi1[0]), (vec![2], mom.phi2[(0, 0)])]
        {
            let simpson = phi_by_simpson(&model, &step, &weight, &cfg(), 4000).unwrap();
            let scale = expected.abs().max(1e-3);
            assert!(
                (simpson - expected).abs() <= 1e-8 * scale,
                "weight {weight:?}: simpson {simpson} vs hermite {expected}"
            );
        }
    }
}

#[test]
fn importance_sampling_confirms_posterior_mean() {
    let model = Nonlinear1d::new();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for trial in 0..10 {
        let step = random_step(&mut rng);
        let mom = moments(&model, &step, &cfg()).unwrap();
        let mut is_rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let est = importance_posterior_mean(&model, &step, 1_000_000, &mut is_rng).unwrap();
        let diff = (est.mean[0] - mom.mean()[0]).abs();
        assert!(
            diff <= 3.0 * est.standard_error[0],
            "trial {trial}: |{} - {}| = {diff} > 3 * {}",
            est.mean[0],
            mom.mean()[0],
            est.standard_error[0]
        );
    }
}

/// Wrapper that hides linearity, forcing the nested-quadrature route.
struct OpaqueLinear(LinearGaussian);

impl StateSpaceModel for OpaqueLinear {
    fn name(&self) -> &str {
        "opaque-linear"
    }
    fn state_dim(&self) -> usize {
        self.0.state_dim()
    }
    fn output_dim(&self) -> usize {
        self.0.output_dim()
    }
    fn input_dim(&self) -> usize {
        self.0.input_dim()
    }
    fn transition(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        self.0.transition(x, u)
    }
    fn transition_jacobian(&self, x: &DVector<f64>, u: &DVector<f64>) -> DMatrix<f64> {
        self.0.transition_jacobian(x, u)
    }
    fn observation(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.observation(x)
    }
    fn observation_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.0.observation_jacobian(x)
    }
    fn process_noise_cov(&self) -> &DMatrix<f64> {
        self.0.process_noise_cov()
    }
    fn observation_noise_cov(&self) -> &DMatrix<f64> {
        self.0.observation_noise_cov()
    }
    fn linear_in_state(&self) -> bool {
        false
    }
}

#[test]
fn nested_route_agrees_with_closed_form_marginal_route() {
    let inner = LinearGaussian::new(0.8, 1.0, 1.0, 1.0).unwrap();
    let opaque = OpaqueLinear(inner.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(38);
    for _ in 0..5 {
        let step = random_step(&mut rng);
        let direct = moments(&inner, &step, &cfg()).unwrap();
        let nested = moments(&opaque, &step, &cfg()).unwrap();
        assert!((direct.phi0 - nested.phi0).abs() <= 1e-9 * direct.phi0);
        assert!((direct.phi1[0] - nested.phi1[0]).abs() <= 1e-9 * direct.phi1[0].abs().max(1e-3));
        assert!(
            (direct.phi2[(0, 0)] - nested.phi2[(0, 0)]).abs()
                <= 1e-9 * direct.phi2[(0, 0)].abs().max(1e-3)
        );
        let xi = DVector::from_element(1, 0.4);
        let td = transform_value(&inner, &step, &xi, &cfg()).unwrap();
        let tn = transform_value(&opaque, &step, &xi, &cfg()).unwrap();
        assert!((td - tn).abs() <= 1e-9 * td.max(1e-3));
    }
}

#[test]
fn weighted_moments_share_one_refined_pass() {
    let model = Nonlinear1d::new();
    let step = step1(0.5, -0.3, 0.7, 1.2);
    let vals =
        weighted_moments(&model, &step, &[vec![0], vec![1], vec![2], vec![3]], &cfg()).unwrap();
    assert_eq!(vals.len(), 4);
    assert!(vals[0] > 0.0);
    // Third absolute moment bound: E[x^2]^(3/4) * E[x^4]^(1/4) >= |E[x^3]| sanity.
    assert!(vals[3].abs() < 1e3);
}
