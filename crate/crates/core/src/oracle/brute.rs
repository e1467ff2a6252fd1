//! Monte-Carlo cross-check with an error mechanism unrelated to
//! quadrature.
//!
//! The state marginal can be sampled exactly for any model by the
//! two-stage draw `x- ~ prior`, `x ~ N(f(x-, u), process noise)`; the
//! observation likelihood then acts as an importance weight, giving a
//! self-normalized estimate of the posterior mean.

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;

use crate::models::{GaussianDensity, StateSpaceModel};

use super::{Result, StepData};

/// Self-normalized importance estimate with delta-method standard errors.
#[derive(Debug, Clone)]
pub struct ImportanceEstimate {
    pub mean: DVector<f64>,
    pub standard_error: DVector<f64>,
    pub samples: usize,
}

pub fn importance_posterior_mean(
    model: &dyn StateSpaceModel,
    step: &StepData,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ImportanceEstimate> {
    let n = model.state_dim();
    let prior = GaussianDensity::new(step.prior_mean.clone(), step.prior_cov.clone())?;
    let w_density = GaussianDensity::new(DVector::zeros(n), model.process_noise_cov().clone())?;
    let obs = GaussianDensity::new(
        DVector::zeros(model.output_dim()),
        model.observation_noise_cov().clone(),
    )?;

    let mut xs: Vec<DVector<f64>> = Vec::with_capacity(samples);
    let mut ws: Vec<f64> = Vec::with_capacity(samples);
    let mut w_sum = 0.0;
    for _ in 0..samples {
        let x_prev = crate::models::rng::sample_gaussian(&prior, rng);
        let noise = crate::models::rng::sample_gaussian(&w_density, rng);
        let x = model.transition(&x_prev, &step.u) + noise;
        let w = obs.pdf(&(&step.y - model.observation(&x)))?;
        w_sum += w;
        xs.push(x);
        ws.push(w);
    }

    let mut mean = DVector::zeros(n);
    for (x, w) in xs.iter().zip(&ws) {
        mean += x * *w;
    }
    mean /= w_sum;

    // Var(A/B) ~ Var(w (x - mean)) / (M E[w]^2) for the ratio estimator.
    let mut se: DVector<f64> = DVector::zeros(n);
    for (x, w) in xs.iter().zip(&ws) {
        let d = x - &mean;
        for i in 0..n {
            se[i] += (w * d[i]) * (w * d[i]);
        }
    }
    for i in 0..n {
        se[i] = se[i].sqrt() / w_sum;
    }

    Ok(ImportanceEstimate { mean, standard_error: se, samples })
}
