//! The transport-based filtering step.
//!
//! Instead of integrating at every step, the step integrals are read off
//! a solution vector `Q` transported along a straight segment in the
//! step-data space from the nearest precomputed starting point. The
//! transform coordinates stay pinned at zero; only the data coordinates
//! move. The mass, mean, and second-moment values are linear
//! combinations of `Q`'s components with rational-function coefficients.

use crate::hgm::{pole_scan, solve_ivp, HgmError, LinePath, PoleScan, SolverSettings};
use crate::pfaffian::{CoefficientRows, PfaffianSystem};
use nalgebra::{DMatrix, DVector};

use super::{FilterError, FilterStepInput, GaussianBelief, Result};

/// Everything the transport step needs, immutable and shareable.
#[derive(Debug, Clone)]
pub struct HgmFilterAssets {
    system: PfaffianSystem,
    rows: CoefficientRows,
    table: super::InitialPointTable,
    solver: SolverSettings,
    state_dim: usize,
}

impl HgmFilterAssets {
    pub fn new(
        system: PfaffianSystem,
        table: super::InitialPointTable,
        solver: SolverSettings,
    ) -> Result<Self> {
        let state_dim = system.num_transform_vars();
        let rows = crate::pfaffian::derive_coefficient_rows(&system, state_dim)?;
        if table.is_empty() {
            return Err(FilterError::EmptyTable);
        }
        if table.z_dim() + state_dim != system.vars().len() {
            return Err(FilterError::TableFormat(format!(
                "table z dimension {} does not match system parameter count {}",
                table.z_dim(),
                system.vars().len() - state_dim
            )));
        }
        if table.q_dim() != system.dim() {
            return Err(FilterError::TableFormat(format!(
                "table Q dimension {} does not match system dimension {}",
                table.q_dim(),
                system.dim()
            )));
        }
        Ok(HgmFilterAssets { system, rows, table, solver, state_dim })
    }

    pub fn system(&self) -> &PfaffianSystem {
        &self.system
    }

    pub fn table(&self) -> &super::InitialPointTable {
        &self.table
    }

    /// Embed a data point into the full variable space with the transform
    /// coordinates at zero.
    fn full_point(&self, z: &DVector<f64>) -> Vec<f64> {
        let mut p = vec![0.0; self.state_dim];
        p.extend(z.iter());
        p
    }
}

/// The step integrals obtained by transport: pick the nearest table
/// entry, check the segment for poles, transport `Q`, and read the mass,
/// first, and second moments through the coefficient rows.
pub fn hgm_moments(
    assets: &HgmFilterAssets,
    input: &FilterStepInput,
) -> Result<crate::oracle::MomentVector> {
    let n = assets.state_dim;
    let z_hat = input.z_vector();
    let idx = assets.table.nearest(&z_hat);
    let (z_init, q_init) = assets.table.entry(idx);

    let path = LinePath::new(assets.full_point(z_init), assets.full_point(&z_hat));
    let cfg = assets.solver.config_for(&path);
    if let PoleScan::Pole { s, variable, row, col } = pole_scan(&assets.system, &path, &cfg)? {
        return Err(FilterError::Hgm(HgmError::PoleOnPath { s, variable, row, col }));
    }
    let q = solve_ivp(&assets.system, &path, q_init, &cfg)?;

    let point = assets.full_point(&z_hat);
    let phi0 = assets.rows.c0_dot(&q);
    if !(phi0 > 0.0) {
        return Err(FilterError::NonPositiveEvidence { value: phi0 });
    }
    let mut phi1 = DVector::zeros(n);
    let mut phi2 = DMatrix::zeros(n, n);
    for i in 0..n {
        phi1[i] = assets.rows.c1_dot(i, &point, &q)?;
        for j in 0..n {
            phi2[(i, j)] = assets.rows.c2_dot(i, j, &point, &q)?;
        }
    }
    Ok(crate::oracle::MomentVector { phi0, phi1, phi2 })
}

/// One transport filtering step: moment-match the transported integrals.
pub fn hgm_step(assets: &HgmFilterAssets, input: &FilterStepInput) -> Result<GaussianBelief> {
    let mom = hgm_moments(assets, input)?;
    Ok(GaussianBelief::repaired(mom.mean(), mom.covariance())?.0)
}
