//! Numeric checks that a differential operator kills a scalar field.

use crate::ratfun::{RationalFunction, VarSet};

use super::{OracleError, Result};

/// A linear differential operator `sum_k c_k(v) d^{m_k}` with
/// rational-function coefficients over named variables.
#[derive(Debug, Clone)]
pub struct DifferentialOperator {
    vars: VarSet,
    terms: Vec<(Vec<u32>, RationalFunction)>,
}

impl DifferentialOperator {
    pub fn new(vars: VarSet, terms: Vec<(Vec<u32>, RationalFunction)>) -> Self {
        for (index, coeff) in &terms {
            assert_eq!(index.len(), vars.len(), "multi-index arity");
            assert!(coeff.vars() == &vars, "coefficient variable list");
        }
        DifferentialOperator { vars, terms }
    }

    /// Build from `(multi-index, expression)` pairs; expressions are
    /// parsed over `vars`.
    pub fn parse(vars: &VarSet, terms: &[(&[u32], &str)]) -> crate::ratfun::Result<Self> {
        let parsed = terms
            .iter()
            .map(|(idx, text)| {
                crate::ratfun::parse_expression(text, vars).map(|c| (idx.to_vec(), c))
            })
            .collect::<crate::ratfun::Result<Vec<_>>>()?;
        Ok(Self::new(vars.clone(), parsed))
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }
}

/// Nested central-difference partial derivative `d^index f` at `point`.
///
/// Each variable uses a 4th-order 5-point stencil applied recursively,
/// with a per-variable step scaled to the coordinate. Accuracy degrades
/// with total order; intended for orders up to about three.
pub fn numeric_partial(f: &dyn Fn(&[f64]) -> f64, index: &[u32], point: &[f64]) -> f64 {
    match index.iter().position(|&e| e > 0) {
        None => f(point),
        Some(var) => {
            let mut reduced = index.to_vec();
            reduced[var] -= 1;
            let h = 1e-3 * point[var].abs().max(1.0);
            let eval = |delta: f64| {
                let mut p = point.to_vec();
                p[var] += delta;
                numeric_partial(f, &reduced, &p)
            };
            (-eval(2.0 * h) + 8.0 * eval(h) - 8.0 * eval(-h) + eval(-2.0 * h)) / (12.0 * h)
        }
    }
}

/// Apply the operator to a numerically evaluable field at `point` and
/// return `|sum of terms|`, normalized by the largest intermediate term
/// magnitude (floored at one). Near zero for a true annihilator.
pub fn annihilator_residual(
    op: &DifferentialOperator,
    field: &dyn Fn(&[f64]) -> f64,
    point: &[f64],
) -> Result<f64> {
    if point.len() != op.vars.len() {
        return Err(OracleError::Model(crate::models::ModelError::DimensionMismatch(format!(
            "point has {} coordinates, operator has {} variables",
            point.len(),
            op.vars.len()
        ))));
    }
    let mut total = 0.0;
    let mut largest: f64 = 0.0;
    for (index, coeff) in &op.terms {
        let c = coeff.evaluate(point)?;
        let term = c * numeric_partial(field, index, point);
        largest = largest.max(term.abs());
        total += term;
    }
    Ok(total.abs() / largest.max(1.0))
}
