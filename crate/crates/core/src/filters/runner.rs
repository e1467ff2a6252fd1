//! Uniform driver over every filter, owning per-realization state so the
//! particle filter and the belief-to-belief filters share one interface.

use std::sync::Arc;

use nalgebra::DVector;

use crate::models::rng::{derived_rng, Role};
use crate::models::StateSpaceModel;
use crate::oracle::QuadratureConfig;

use super::{
    ekf_step, hgm_step, init_particles, kf_step, oracle_step, pf_step, ukf_step, FilterStepInput,
    GaussianBelief, HgmFilterAssets, ParticleSet, Result, UkfParams,
};

#[derive(Debug, Clone)]
pub enum FilterKind {
    Kf,
    Ekf,
    Ukf(UkfParams),
    Pf { particles: usize },
    Oracle(QuadratureConfig),
    Hgm(Arc<HgmFilterAssets>),
}

/// A configured filter; stateless itself, shareable across realizations.
#[derive(Debug, Clone)]
pub struct AnyFilter {
    kind: FilterKind,
}

/// Per-realization filter state: the current belief, plus the particle
/// cloud where applicable.
#[derive(Debug, Clone)]
pub struct FilterState {
    pub belief: GaussianBelief,
    pub particles: Option<ParticleSet>,
}

impl FilterState {
    /// Particle-degeneracy resets seen so far (particle filter only).
    pub fn degenerate_resets(&self) -> usize {
        self.particles.as_ref().map(|p| p.degenerate_resets).unwrap_or(0)
    }
}

impl AnyFilter {
    pub fn new(kind: FilterKind) -> Self {
        AnyFilter { kind }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            FilterKind::Kf => "kf".to_string(),
            FilterKind::Ekf => "ekf".to_string(),
            FilterKind::Ukf(_) => "ukf".to_string(),
            FilterKind::Pf { particles } => format!("pf{particles}"),
            FilterKind::Oracle(_) => "oracle".to_string(),
            FilterKind::Hgm(_) => "hgm".to_string(),
        }
    }

    /// Fresh state for one realization. The particle cloud draws from the
    /// initial belief through the counter-based stream for step 0.
    pub fn init_state(
        &self,
        init: &GaussianBelief,
        seed: u64,
        realization: u64,
    ) -> Result<FilterState> {
        let particles = match &self.kind {
            FilterKind::Pf { particles } => {
                let mut rng = derived_rng(seed, realization, 0, Role::ParticleInit);
                Some(init_particles(&init.to_density()?, *particles, &mut rng))
            }
            _ => None,
        };
        Ok(FilterState { belief: init.clone(), particles })
    }

    /// Advance one step, updating the state and returning the posterior.
    pub fn step(
        &self,
        model: &dyn StateSpaceModel,
        state: &mut FilterState,
        y: &DVector<f64>,
        u: &DVector<f64>,
        step_index: u64,
        seed: u64,
        realization: u64,
    ) -> Result<GaussianBelief> {
        let input = FilterStepInput::new(y.clone(), u.clone(), state.belief.clone());
        let belief = match &self.kind {
            FilterKind::Kf => kf_step(model, &input)?,
            FilterKind::Ekf => ekf_step(model, &input)?,
            FilterKind::Ukf(params) => ukf_step(model, &input, params)?,
            FilterKind::Oracle(quad) => oracle_step(model, &input, quad)?,
            FilterKind::Hgm(assets) => hgm_step(assets, &input)?,
            FilterKind::Pf { .. } => {
                let set = state.particles.as_mut().expect("particle state initialized");
                let mut prop = derived_rng(seed, realization, step_index, Role::ParticlePropagate);
                let mut res = derived_rng(seed, realization, step_index, Role::ParticleResample);
                pf_step(model, set, y, u, &mut prop, &mut res)?
            }
        };
        state.belief = belief.clone();
        Ok(belief)
    }
}
