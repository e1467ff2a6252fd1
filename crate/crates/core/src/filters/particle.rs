//! Bootstrap particle filter with systematic resampling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::models::rng::sample_gaussian;
use crate::models::{GaussianDensity, StateSpaceModel};

use super::{GaussianBelief, Result};

/// Weighted particle cloud. Weights stay normalized; a fully degenerate
/// weight set (every raw weight below 1e-300) is reset to uniform and
/// counted rather than aborting the run.
#[derive(Debug, Clone)]
pub struct ParticleSet {
    pub particles: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    pub degenerate_resets: usize,
}

impl ParticleSet {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }
}

/// Draw the initial cloud from the starting belief.
pub fn init_particles(
    init: &GaussianDensity,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> ParticleSet {
    let particles = (0..count).map(|_| sample_gaussian(init, rng)).collect();
    ParticleSet { particles, weights: vec![1.0 / count as f64; count], degenerate_resets: 0 }
}

/// One bootstrap step: propose through the transition density, weight by
/// the observation likelihood, report the weighted belief, then resample
/// systematically. The belief is taken before resampling.
pub fn pf_step(
    model: &dyn StateSpaceModel,
    set: &mut ParticleSet,
    y: &DVector<f64>,
    u: &DVector<f64>,
    propagate_rng: &mut ChaCha8Rng,
    resample_rng: &mut ChaCha8Rng,
) -> Result<GaussianBelief> {
    let n = model.state_dim();
    let count = set.len();
    let w_density = GaussianDensity::new(DVector::zeros(n), model.process_noise_cov().clone())?;
    let obs = GaussianDensity::new(
        DVector::zeros(model.output_dim()),
        model.observation_noise_cov().clone(),
    )?;

    let mut raw_sum = 0.0;
    for (particle, weight) in set.particles.iter_mut().zip(set.weights.iter_mut()) {
        let noise = sample_gaussian(&w_density, propagate_rng);
        *particle = model.transition(particle, u) + noise;
        let lik = obs.pdf(&(y - model.observation(particle)))?;
        *weight *= lik;
        raw_sum += *weight;
    }

    if raw_sum < 1e-300 || !raw_sum.is_finite() {
        set.weights.fill(1.0 / count as f64);
        set.degenerate_resets += 1;
    } else {
        for w in &mut set.weights {
            *w /= raw_sum;
        }
    }

    // Weighted mean and covariance before resampling.
    let mut mean = DVector::zeros(n);
    for (p, &w) in set.particles.iter().zip(&set.weights) {
        mean += w * p;
    }
    let mut cov = DMatrix::zeros(n, n);
    for (p, &w) in set.particles.iter().zip(&set.weights) {
        let d = p - &mean;
        cov += w * &d * d.transpose();
    }
    let belief = GaussianBelief::repaired(mean, cov)?.0;

    systematic_resample(set, resample_rng);
    Ok(belief)
}

/// Systematic resampling: one uniform offset, `count` equally spaced
/// pointers into the cumulative weights.
fn systematic_resample(set: &mut ParticleSet, rng: &mut ChaCha8Rng) {
    let count = set.len();
    let offset: f64 = rng.random_range(0.0..1.0);
    let mut resampled = Vec::with_capacity(count);
    let mut cumulative = set.weights[0];
    let mut j = 0usize;
    for i in 0..count {
        let target = (i as f64 + offset) / count as f64;
        while cumulative < target && j + 1 < count {
            j += 1;
            cumulative += set.weights[j];
        }
        resampled.push(set.particles[j].clone());
    }
    set.particles = resampled;
    set.weights.fill(1.0 / count as f64);
}
