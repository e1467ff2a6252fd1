//! Tables of precomputed transport starting points.

use nalgebra::DVector;

use crate::models::StateSpaceModel;
use crate::oracle::{initial_vector, QuadratureConfig, StepData};
use crate::pfaffian::PfaffianSystem;

use super::{FilterError, Result};

/// Pairs `(z_init, Q(0, z_init))` from which transport paths start.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialPointTable {
    z_dim: usize,
    q_dim: usize,
    entries: Vec<(DVector<f64>, Vec<f64>)>,
}

impl InitialPointTable {
    pub fn new(z_dim: usize, q_dim: usize, entries: Vec<(DVector<f64>, Vec<f64>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(FilterError::EmptyTable);
        }
        for (z, q) in &entries {
            if z.len() != z_dim || q.len() != q_dim {
                return Err(FilterError::TableFormat(format!(
                    "entry dimensions ({}, {}) do not match ({z_dim}, {q_dim})",
                    z.len(),
                    q.len()
                )));
            }
        }
        Ok(InitialPointTable { z_dim, q_dim, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn z_dim(&self) -> usize {
        self.z_dim
    }

    pub fn q_dim(&self) -> usize {
        self.q_dim
    }

    pub fn entry(&self, idx: usize) -> (&DVector<f64>, &[f64]) {
        let (z, q) = &self.entries[idx];
        (z, q)
    }

    /// Index of the entry closest to `z` in Euclidean distance, ties
    /// broken by the lowest index.
    pub fn nearest(&self, z: &DVector<f64>) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, (zi, _)) in self.entries.iter().enumerate() {
            let d = (zi - z).norm_squared();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// CSV with header `z1,..,zN,Q1,..,Qq`, shortest round-trip numbers.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let mut header: Vec<String> = (1..=self.z_dim).map(|i| format!("z{i}")).collect();
        header.extend((1..=self.q_dim).map(|i| format!("Q{i}")));
        writeln!(out, "{}", header.join(",")).unwrap();
        for (z, q) in &self.entries {
            let row: Vec<String> =
                z.iter().map(|v| v.to_string()).chain(q.iter().map(|v| v.to_string())).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| FilterError::TableFormat("empty".into()))?;
        let fields: Vec<&str> = header.split(',').collect();
        let z_dim = fields.iter().take_while(|f| f.trim().starts_with('z')).count();
        let q_dim = fields.len() - z_dim;
        if z_dim == 0 || q_dim == 0 {
            return Err(FilterError::TableFormat(format!("bad header `{header}`")));
        }
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let nums: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let nums =
                nums.map_err(|e| FilterError::TableFormat(format!("row {}: {e}", i + 2)))?;
            if nums.len() != z_dim + q_dim {
                return Err(FilterError::TableFormat(format!(
                    "row {}: {} fields, expected {}",
                    i + 2,
                    nums.len(),
                    z_dim + q_dim
                )));
            }
            entries.push((
                DVector::from_column_slice(&nums[0..z_dim]),
                nums[z_dim..].to_vec(),
            ));
        }
        Self::new(z_dim, q_dim, entries)
    }

    pub fn load_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FilterError::TableFormat(e.to_string()))?;
        Self::from_csv(&text)
    }
}

/// Build the sign-grid table: every combination of +/-1 over the output,
/// input, and mean coordinates, with the covariance block pinned at the
/// identity (variances 1, covariances 0). Initial vectors come from the
/// quadrature engine.
pub fn build_grid_table(
    model: &dyn StateSpaceModel,
    sys: &PfaffianSystem,
    cfg: &QuadratureConfig,
) -> Result<InitialPointTable> {
    let (r, m, n) = (model.output_dim(), model.input_dim(), model.state_dim());
    let signs = r + m + n;
    let z_dim = StepData::z_len(r, m, n);
    let mut entries = Vec::with_capacity(1 << signs);
    for mask in 0..(1u32 << signs) {
        let mut z = vec![0.0; z_dim];
        for (bit, slot) in z.iter_mut().take(signs).enumerate() {
            *slot = if mask >> bit & 1 == 0 { 1.0 } else { -1.0 };
        }
        // vech of the identity: ones on diagonal positions.
        let mut k = signs;
        for j in 0..n {
            for i in j..n {
                z[k] = if i == j { 1.0 } else { 0.0 };
                k += 1;
            }
        }
        let q = initial_vector(model, sys, &z, cfg)?;
        entries.push((DVector::from_vec(z), q));
    }
    InitialPointTable::new(z_dim, sys.dim(), entries)
}
