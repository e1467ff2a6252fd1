//! Path transport of Pfaffian-system solution vectors.
//!
//! Along a straight segment `z(s) = (1-s)*start + s*end` the PDE system
//! collapses to a linear ODE `dQ/ds = M(s) Q` with
//! `M(s) = sum_i A_i(z(s)) * (end_i - start_i)`, integrated on a fixed
//! uniform grid. Denominators are scanned for zeros or sign changes
//! before integration starts; a pole on the path is a hard failure.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::pfaffian::PfaffianSystem;
use crate::ratfun::RatfunError;

#[derive(Debug, Error)]
pub enum HgmError {
    #[error("denominator of {variable}[{row},{col}] vanishes near s = {s}")]
    PoleOnPath { s: f64, variable: String, row: usize, col: usize },
    #[error("state became non-finite at s = {s}")]
    NonfiniteState { s: f64 },
    #[error("path endpoints have {got} coordinates, system has {expected} variables")]
    PathDimension { got: usize, expected: usize },
    #[error("initial vector has {got} components, system dimension is {expected}")]
    InitDimension { got: usize, expected: usize },
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
}

pub type Result<T> = std::result::Result<T, HgmError>;

/// Straight segment in the system's variable space.
#[derive(Debug, Clone)]
pub struct LinePath {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl LinePath {
    pub fn new(start: Vec<f64>, end: Vec<f64>) -> Self {
        assert_eq!(start.len(), end.len(), "path endpoints must have equal length");
        LinePath { start, end }
    }

    pub fn at(&self, s: f64) -> Vec<f64> {
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| (1.0 - s) * a + s * b)
            .collect()
    }

    pub fn direction(&self) -> Vec<f64> {
        self.end.iter().zip(&self.start).map(|(b, a)| b - a).collect()
    }

    pub fn length(&self) -> f64 {
        self.direction().iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn is_degenerate(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeMethod {
    Rk4,
    /// 4th-order Adams-Bashforth predictor / Adams-Moulton corrector,
    /// one correction per step (PECE), bootstrapped with three RK4 steps.
    Abm4,
}

impl OdeMethod {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rk4" => Some(OdeMethod::Rk4),
            "abm4" => Some(OdeMethod::Abm4),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OdeMethod::Rk4 => "rk4",
            OdeMethod::Abm4 => "abm4",
        }
    }
}

/// Per-solve configuration: a concrete step count on the unit parameter
/// interval plus pole-scan resolution.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub steps: usize,
    pub method: OdeMethod,
    pub pole_scan_samples: usize,
    pub min_denominator: f64,
}

impl SolverConfig {
    pub fn new(steps: usize, method: OdeMethod) -> Self {
        let steps = steps.max(if method == OdeMethod::Abm4 { 4 } else { 1 });
        SolverConfig { steps, method, pole_scan_samples: steps, min_denominator: 1e-8 }
    }
}

/// Step-count policy: a fixed density of steps per unit Euclidean path
/// length with a floor. Concrete [`SolverConfig`]s are derived per path.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub steps_per_unit: f64,
    pub min_steps: usize,
    pub method: OdeMethod,
    pub min_denominator: f64,
    pub pole_scan_samples: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            steps_per_unit: 1000.0,
            min_steps: 100,
            method: OdeMethod::Abm4,
            min_denominator: 1e-8,
            pole_scan_samples: 100,
        }
    }
}

impl SolverSettings {
    pub fn config_for(&self, path: &LinePath) -> SolverConfig {
        let steps =
            ((self.steps_per_unit * path.length()).ceil() as usize).max(self.min_steps).max(4);
        SolverConfig {
            steps,
            method: self.method,
            pole_scan_samples: self.pole_scan_samples.max(steps),
            min_denominator: self.min_denominator,
        }
    }
}

/// Outcome of scanning every distinct denominator along a path.
#[derive(Debug, Clone, PartialEq)]
pub enum PoleScan {
    Clear,
    /// First parameter value at which some denominator dips below the
    /// threshold or changes sign between samples.
    Pole { s: f64, variable: String, row: usize, col: usize },
}

impl PoleScan {
    pub fn is_clear(&self) -> bool {
        matches!(self, PoleScan::Clear)
    }
}

/// Evaluate every distinct denominator at `pole_scan_samples + 1`
/// equispaced parameter values. A sample below `min_denominator` or a
/// sign change between consecutive samples reports a pole; the sign
/// change matters because a root can sit between samples whose
/// magnitudes all look safe.
pub fn pole_scan(sys: &PfaffianSystem, path: &LinePath, cfg: &SolverConfig) -> Result<PoleScan> {
    if path.start.len() != sys.vars().len() {
        return Err(HgmError::PathDimension { got: path.start.len(), expected: sys.vars().len() });
    }
    let dens = sys.distinct_denominators();
    if dens.is_empty() {
        return Ok(PoleScan::Clear);
    }
    let n = cfg.pole_scan_samples;
    let mut prev: Vec<f64> = Vec::with_capacity(dens.len());
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let p = path.at(s);
        for (i, (var, row, col, den)) in dens.iter().enumerate() {
            let v = den.evaluate(&p)?;
            if v.abs() < cfg.min_denominator {
                return Ok(PoleScan::Pole { s, variable: var.clone(), row: *row, col: *col });
            }
            if k > 0 && prev[i].signum() != v.signum() {
                // Root crossed between the previous sample and this one.
                let s_mid = (k as f64 - 0.5) / n as f64;
                return Ok(PoleScan::Pole { s: s_mid, variable: var.clone(), row: *row, col: *col });
            }
            if k == 0 {
                prev.push(v);
            } else {
                prev[i] = v;
            }
        }
    }
    Ok(PoleScan::Clear)
}

struct OdeField<'a> {
    sys: &'a PfaffianSystem,
    path: &'a LinePath,
    // Variables whose path component actually moves, with their speeds.
    active: Vec<(usize, f64)>,
    min_denominator: f64,
}

impl<'a> OdeField<'a> {
    fn new(sys: &'a PfaffianSystem, path: &'a LinePath, cfg: &SolverConfig) -> Self {
        let dir = path.direction();
        let active = dir
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0.0)
            .map(|(i, d)| (i, *d))
            .collect();
        OdeField { sys, path, active, min_denominator: cfg.min_denominator }
    }

    /// `M(s) = sum_i A_i(z(s)) dz_i/ds` over the moving variables only.
    fn matrix_at(&self, s: f64) -> Result<DMatrix<f64>> {
        let q = self.sys.dim();
        let point = self.path.at(s);
        let mut m = DMatrix::zeros(q, q);
        for &(idx, speed) in &self.active {
            let a = self
                .sys
                .matrix_by_index(idx)
                .evaluate_with(&point, self.min_denominator)
                .map_err(|e| match e {
                    RatfunError::DenominatorBelowThreshold { .. } => HgmError::PoleOnPath {
                        s,
                        variable: self.sys.vars().names()[idx].clone(),
                        row: 0,
                        col: 0,
                    },
                    other => HgmError::Ratfun(other),
                })?;
            m += a * speed;
        }
        Ok(m)
    }
}

fn check_finite(q: &DVector<f64>, s: f64) -> Result<()> {
    if q.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(HgmError::NonfiniteState { s })
    }
}

/// Transport `q_init` from `path.start` to `path.end`.
///
/// The caller is expected to have run [`pole_scan`] first; denominators
/// are still re-checked at every integration node.
pub fn solve_ivp(
    sys: &PfaffianSystem,
    path: &LinePath,
    q_init: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    if path.start.len() != sys.vars().len() {
        return Err(HgmError::PathDimension { got: path.start.len(), expected: sys.vars().len() });
    }
    if q_init.len() != sys.dim() {
        return Err(HgmError::InitDimension { got: q_init.len(), expected: sys.dim() });
    }
    if path.is_degenerate() {
        return Ok(q_init.to_vec());
    }

    let field = OdeField::new(sys, path, cfg);
    let n = cfg.steps;
    let h = 1.0 / n as f64;
    let mut q = DVector::from_column_slice(q_init);

    match cfg.method {
        OdeMethod::Rk4 => {
            for k in 0..n {
                let s = k as f64 * h;
                q = rk4_step(&field, s, h, &q)?;
                check_finite(&q, s + h)?;
            }
        }
        OdeMethod::Abm4 => {
            // History of derivative evaluations f_k = M(s_k) q_k.
            let mut derivs: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
            derivs.push(field.matrix_at(0.0)? * &q);
            let bootstrap = 3.min(n);
            for k in 0..bootstrap {
                let s = k as f64 * h;
                q = rk4_step(&field, s, h, &q)?;
                check_finite(&q, s + h)?;
                derivs.push(field.matrix_at((k + 1) as f64 * h)? * &q);
            }
            for k in bootstrap..n {
                let s_next = (k + 1) as f64 * h;
                let m_next = field.matrix_at(s_next)?;
                // Predict (AB4), evaluate, correct (AM4), evaluate.
                let predictor = &q
                    + (h / 24.0)
                        * (55.0 * &derivs[k] - 59.0 * &derivs[k - 1] + 37.0 * &derivs[k - 2]
                            - 9.0 * &derivs[k - 3]);
                let f_pred = &m_next * predictor;
                q = &q
                    + (h / 24.0)
                        * (9.0 * &f_pred + 19.0 * &derivs[k] - 5.0 * &derivs[k - 1]
                            + &derivs[k - 2]);
                check_finite(&q, s_next)?;
                derivs.push(&m_next * &q);
            }
        }
    }
    Ok(q.as_slice().to_vec())
}

fn rk4_step(field: &OdeField<'_>, s: f64, h: f64, q: &DVector<f64>) -> Result<DVector<f64>> {
    let m0 = field.matrix_at(s)?;
    let m_half = field.matrix_at(s + 0.5 * h)?;
    let m1 = field.matrix_at(s + h)?;
    let k1 = &m0 * q;
    let k2 = &m_half * (q + (0.5 * h) * &k1);
    let k3 = &m_half * (q + (0.5 * h) * &k2);
    let k4 = &m1 * (q + h * &k3);
    Ok(q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}
