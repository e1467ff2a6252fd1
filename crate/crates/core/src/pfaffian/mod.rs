//! Pfaffian systems: representation, file format, validation, and
//! moment-coefficient derivation.
//!
//! A Pfaffian system for a vector `Q` of a function and finitely many of
//! its derivatives is the set of first-order PDEs `d/dv_i Q = A_i Q` with
//! rational-function matrices `A_i`. Systems are consumed from a file
//! format rather than computed symbolically; producing them requires a
//! Groebner engine for differential operators, which stays outside this
//! artifact.

mod format;

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::ratfun::{RatMatrix, RatfunError, RationalFunction, VarSet};

pub use format::{format_multi_index, parse_multi_index};

#[derive(Debug, Error)]
pub enum PfaffianError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("line {line}: entry ({row},{col}) outside declared dimension {dim}")]
    DimensionMismatch { line: usize, row: usize, col: usize, dim: usize },
    #[error("line {line}: duplicate entry ({row},{col}) in matrix for `{var}`")]
    DuplicateEntry { line: usize, var: String, row: usize, col: usize },
    #[error("system declares {nxi} transform variables, {needed} required")]
    MissingTransformVariable { nxi: usize, needed: usize },
    #[error(transparent)]
    Ratfun(#[from] RatfunError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PfaffianError>;

/// A loaded Pfaffian system. Transform variables come first in the
/// variable order, parameter variables after; every variable has a
/// square coefficient matrix (zero if the file omitted it).
#[derive(Debug, Clone)]
pub struct PfaffianSystem {
    vars: VarSet,
    nxi: usize,
    dim: usize,
    monomials: Vec<Vec<u32>>,
    matrices: BTreeMap<String, RatMatrix>,
    boxes: Vec<(f64, f64)>,
}

/// Default per-variable validity box when the file declares none.
pub const DEFAULT_BOX: (f64, f64) = (-2.0, 2.0);

/// Denominators with magnitude below this are excluded when sampling
/// random in-box points.
pub const BOX_DENOMINATOR_FLOOR: f64 = 1e-6;

impl PfaffianSystem {
    pub fn load(reader: impl std::io::BufRead) -> Result<Self> {
        format::parse(reader)
    }

    pub fn load_str(text: &str) -> Result<Self> {
        format::parse(text.as_bytes())
    }

    pub fn load_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        format::parse(std::io::BufReader::new(file))
    }

    /// Deterministic textual form; `load_str(serialize(s))` reproduces
    /// `s` entrywise.
    pub fn serialize(&self) -> String {
        format::serialize(self)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Number of transform variables (leading block of the variable list).
    pub fn num_transform_vars(&self) -> usize {
        self.nxi
    }

    /// State dimension `q` of the transported vector.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Derivative multi-indices defining the components of `Q`; the first
    /// is always the empty index (the bare function).
    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn matrix(&self, var: &str) -> Option<&RatMatrix> {
        self.matrices.get(var)
    }

    pub fn matrix_by_index(&self, idx: usize) -> &RatMatrix {
        &self.matrices[&self.vars.names()[idx]]
    }

    /// Per-variable validity box for random sampling.
    pub fn boxes(&self) -> &[(f64, f64)] {
        &self.boxes
    }

    /// All distinct denominator polynomials across every matrix entry,
    /// with the (variable, row, col) where each first appears. Constant
    /// denominators never vanish and are skipped.
    pub fn distinct_denominators(
        &self,
    ) -> Vec<(String, usize, usize, &crate::ratfun::SparsePolynomial)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for name in self.vars.names() {
            let m = &self.matrices[name];
            for (r, c, entry) in m.entries() {
                let den = entry.denom();
                if den.as_constant().is_some() {
                    continue;
                }
                if seen.insert(den.to_string()) {
                    out.push((name.clone(), r, c, den));
                }
            }
        }
        out
    }

    /// Symbolic integrability defect `d_j A_i + A_i A_j - d_i A_j - A_j A_i`
    /// for a pair of variables; identically zero for a valid system.
    pub fn residual_matrix(&self, var_i: &str, var_j: &str) -> Result<RatMatrix> {
        let ai = self.matrices.get(var_i).ok_or_else(|| PfaffianError::Format {
            line: 0,
            reason: format!("no matrix for variable `{var_i}`"),
        })?;
        let aj = self.matrices.get(var_j).ok_or_else(|| PfaffianError::Format {
            line: 0,
            reason: format!("no matrix for variable `{var_j}`"),
        })?;
        let i_idx = self.vars.index_of(var_i).expect("matrix keys are variables");
        let j_idx = self.vars.index_of(var_j).expect("matrix keys are variables");
        let lhs = ai.differentiate(j_idx).add(&ai.mul(aj)?)?;
        let rhs = aj.differentiate(i_idx).add(&aj.mul(ai)?)?;
        Ok(lhs.sub(&rhs)?)
    }

    /// Max-norm of the integrability defect evaluated at `point`.
    pub fn integrability_residual(&self, var_i: &str, var_j: &str, point: &[f64]) -> Result<f64> {
        let m = self
            .residual_matrix(var_i, var_j)?
            .evaluate_with(point, crate::ratfun::EPS_DEN)?;
        Ok(m.amax())
    }

    /// Draw a point uniformly from the validity box, rejecting points
    /// where any matrix denominator magnitude drops below
    /// [`BOX_DENOMINATOR_FLOOR`].
    pub fn sample_box_point(&self, rng: &mut impl Rng) -> Vec<f64> {
        let dens = self.distinct_denominators();
        'outer: for _ in 0..10_000 {
            let p: Vec<f64> = self.boxes.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect();
            for (_, _, _, den) in &dens {
                match den.evaluate(&p) {
                    Ok(v) if v.abs() >= BOX_DENOMINATOR_FLOOR => {}
                    _ => continue 'outer,
                }
            }
            return p;
        }
        panic!("validity box is saturated by poles");
    }

    /// Largest integrability residual over all variable pairs at `samples`
    /// random in-box points.
    pub fn max_integrability_residual(&self, samples: usize, rng: &mut impl Rng) -> Result<f64> {
        let names = self.vars.names();
        let mut residuals = Vec::new();
        for i in 0..names.len() {
            for j in (i + 1)..names.len() {
                residuals.push(self.residual_matrix(&names[i], &names[j])?);
            }
        }
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let p = self.sample_box_point(rng);
            for m in &residuals {
                match m.evaluate_with(&p, crate::ratfun::EPS_DEN) {
                    Ok(v) => worst = worst.max(v.amax()),
                    Err(RatfunError::DenominatorBelowThreshold { .. }) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(worst)
    }

    /// Replace one matrix entry, for corruption tests and fixtures built
    /// in code.
    pub fn set_entry(&mut self, var: &str, row: usize, col: usize, value: RationalFunction) {
        let m = self.matrices.get_mut(var).expect("variable exists");
        m.set(row, col, value);
    }

    pub(crate) fn from_parts(
        vars: VarSet,
        nxi: usize,
        dim: usize,
        monomials: Vec<Vec<u32>>,
        matrices: BTreeMap<String, RatMatrix>,
        boxes: Vec<(f64, f64)>,
    ) -> Self {
        PfaffianSystem { vars, nxi, dim, monomials, matrices, boxes }
    }
}

/// Rows expressing the value, gradient, and second moments of the
/// transported function as linear combinations of `Q`'s components.
///
/// `c0` is the constant row `[1 0 .. 0]`; `c1[i]` is the first row of the
/// i-th transform-variable matrix; `c2[i][j]` is the first row of
/// `d_j A_i + A_i A_j`.
#[derive(Debug, Clone)]
pub struct CoefficientRows {
    dim: usize,
    c1: Vec<Vec<RationalFunction>>,
    c2: Vec<Vec<Vec<RationalFunction>>>,
}

impl CoefficientRows {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c0_dot(&self, q: &[f64]) -> f64 {
        q[0]
    }

    pub fn c1(&self, i: usize) -> &[RationalFunction] {
        &self.c1[i]
    }

    pub fn c2(&self, i: usize, j: usize) -> &[RationalFunction] {
        &self.c2[i][j]
    }

    pub fn c1_dot(&self, i: usize, point: &[f64], q: &[f64]) -> crate::ratfun::Result<f64> {
        dot_row(&self.c1[i], point, q)
    }

    pub fn c2_dot(&self, i: usize, j: usize, point: &[f64], q: &[f64]) -> crate::ratfun::Result<f64> {
        dot_row(&self.c2[i][j], point, q)
    }
}

fn dot_row(row: &[RationalFunction], point: &[f64], q: &[f64]) -> crate::ratfun::Result<f64> {
    let mut acc = 0.0;
    for (f, &qk) in row.iter().zip(q) {
        if f.is_zero() {
            continue;
        }
        acc += f.evaluate(point)? * qk;
    }
    Ok(acc)
}

/// Derive the moment-extraction coefficient rows from the matrices of the
/// first `n` (transform) variables.
pub fn derive_coefficient_rows(sys: &PfaffianSystem, n: usize) -> Result<CoefficientRows> {
    if sys.num_transform_vars() < n {
        return Err(PfaffianError::MissingTransformVariable {
            nxi: sys.num_transform_vars(),
            needed: n,
        });
    }
    let names = sys.vars().names();
    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    for i in 0..n {
        let ai = &sys.matrices[&names[i]];
        c1.push(ai.row(0));
        let mut row_i = Vec::with_capacity(n);
        for j in 0..n {
            let aj = &sys.matrices[&names[j]];
            let second = ai.differentiate(j).add(&ai.mul(aj)?)?;
            row_i.push(second.row(0));
        }
        c2.push(row_i);
    }
    Ok(CoefficientRows { dim: sys.dim(), c1, c2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::parse_expression;
    use rand::SeedableRng;

    const COS_FIXTURE: &str = include_str!("../../fixtures/cos_example.pfn");
    const GAUSS_FIXTURE: &str = include_str!("../../fixtures/gauss1d.pfn");
    const LINEAR_FIXTURE: &str = include_str!("../../fixtures/linear_gauss.pfn");

    #[test]
    fn cos_fixture_loads() {
        let sys = PfaffianSystem::load_str(COS_FIXTURE).unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(sys.vars().names(), &["X1".to_string(), "X2".to_string()]);
        assert_eq!(sys.monomials(), &[vec![0, 0], vec![0, 1]]);
        // Unlisted entries are zero.
        assert!(sys.matrix("X1").unwrap().get(0, 0).is_zero());
        assert!(sys.matrix("X2").unwrap().get(1, 1).is_zero());
    }

    #[test]
    fn gauss_fixture_loads_as_scalar_system() {
        let sys = PfaffianSystem::load_str(GAUSS_FIXTURE).unwrap();
        assert_eq!(sys.dim(), 1);
        let a = sys.matrix("X").unwrap();
        let expected = parse_expression("-2*X", sys.vars()).unwrap();
        assert!(a.get(0, 0).equivalent(&expected).unwrap());
    }

    #[test]
    fn cos_fixture_is_integrable_at_a_point() {
        let sys = PfaffianSystem::load_str(COS_FIXTURE).unwrap();
        let r = sys.integrability_residual("X1", "X2", &[1.3, -0.7]).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn corrupted_fixture_fails_integrability() {
        let mut sys = PfaffianSystem::load_str(COS_FIXTURE).unwrap();
        let bumped = sys
            .matrix("X1")
            .unwrap()
            .get(0, 1)
            .add(&RationalFunction::one(sys.vars()))
            .unwrap();
        sys.set_entry("X1", 0, 1, bumped);
        let r = sys.integrability_residual("X1", "X2", &[1.3, -0.7]).unwrap();
        assert!(r >= 0.1, "residual {r}");
    }

    #[test]
    fn all_fixtures_pass_randomized_integrability() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (name, text) in [
            ("cos_example", COS_FIXTURE),
            ("gauss1d", GAUSS_FIXTURE),
            ("linear_gauss", LINEAR_FIXTURE),
        ] {
            let sys = PfaffianSystem::load_str(text).unwrap();
            let worst = sys.max_integrability_residual(100, &mut rng).unwrap();
            assert!(worst <= 1e-10, "{name}: residual {worst}");
        }
    }

    #[test]
    fn load_serialize_load_is_identity() {
        for text in [COS_FIXTURE, GAUSS_FIXTURE, LINEAR_FIXTURE] {
            let a = PfaffianSystem::load_str(text).unwrap();
            let b = PfaffianSystem::load_str(&a.serialize()).unwrap();
            assert_eq!(a.vars().names(), b.vars().names());
            assert_eq!(a.dim(), b.dim());
            assert_eq!(a.monomials(), b.monomials());
            for name in a.vars().names() {
                let ma = a.matrix(name).unwrap();
                let mb = b.matrix(name).unwrap();
                for (r, c, e) in ma.entries() {
                    assert_eq!(e, mb.get(r, c), "entry ({r},{c}) of {name}");
                }
            }
        }
    }

    #[test]
    fn oversized_entry_index_is_rejected() {
        let bad = "pfaffian v1\nvars: X\nnxi: 0\ndim: 2\nmonomials: 1; dX\nmatrix X:\n(3,3) = 1\nend\n";
        match PfaffianSystem::load_str(bad) {
            Err(PfaffianError::DimensionMismatch { row: 3, col: 3, dim: 2, .. }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_entry_is_rejected() {
        let bad = "pfaffian v1\nvars: X\nnxi: 0\ndim: 1\nmonomials: 1\nmatrix X:\n(1,1) = 1\n(1,1) = 2\nend\n";
        assert!(matches!(
            PfaffianSystem::load_str(bad),
            Err(PfaffianError::DuplicateEntry { row: 1, col: 1, .. })
        ));
    }

    #[test]
    fn scalar_coefficient_rows() {
        // For a one-dimensional system with matrix [a], the second-moment
        // row is [da/dxi + a^2].
        let sys = PfaffianSystem::load_str(LINEAR_FIXTURE).unwrap();
        let rows = derive_coefficient_rows(&sys, 1).unwrap();
        let a = sys.matrix("xi").unwrap().get(0, 0);
        let expected = a.differentiate(0).add(&a.mul(a).unwrap()).unwrap();
        assert!(rows.c2(0, 0)[0].equivalent(&expected).unwrap());
        assert!(rows.c1(0)[0].equivalent(a).unwrap());
    }

    #[test]
    fn coefficient_rows_need_transform_variables() {
        let sys = PfaffianSystem::load_str(COS_FIXTURE).unwrap();
        assert!(matches!(
            derive_coefficient_rows(&sys, 1),
            Err(PfaffianError::MissingTransformVariable { .. })
        ));
    }

    #[test]
    fn c0_row_reads_the_first_component() {
        let sys = PfaffianSystem::load_str(LINEAR_FIXTURE).unwrap();
        let rows = derive_coefficient_rows(&sys, 1).unwrap();
        assert_eq!(rows.c0_dot(&[3.25]), 3.25);
    }

    #[test]
    fn c2_is_symmetric_under_evaluation() {
        // Reinterpret the cos system as having two transform variables;
        // its mixed second-derivative rows must agree at non-pole points.
        let text = COS_FIXTURE.replace("nxi: 0", "nxi: 2");
        let sys = PfaffianSystem::load_str(&text).unwrap();
        let rows = derive_coefficient_rows(&sys, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = sys.sample_box_point(&mut rng);
            let q = [0.37, -1.21];
            let a = rows.c2_dot(0, 1, &p, &q).unwrap();
            let b = rows.c2_dot(1, 0, &p, &q).unwrap();
            let scale = 1.0f64.max(a.abs()).max(b.abs());
            assert!((a - b).abs() <= 1e-9 * scale, "asymmetric at {p:?}: {a} vs {b}");
        }
    }
}
