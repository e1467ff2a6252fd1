//! Dense matrices of rational functions.

use nalgebra::DMatrix;

use super::{RatfunError, RationalFunction, Result, VarSet};

/// Dense grid of rational functions sharing one variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    vars: VarSet,
    entries: Vec<RationalFunction>,
}

impl RatMatrix {
    pub fn zero(vars: &VarSet, rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        RatMatrix {
            rows,
            cols,
            vars: vars.clone(),
            entries: vec![RationalFunction::zero(vars); rows * cols],
        }
    }

    pub fn identity(vars: &VarSet, n: usize) -> Self {
        let mut m = Self::zero(vars, n, n);
        for i in 0..n {
            m.set(i, i, RationalFunction::one(vars));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn get(&self, r: usize, c: usize) -> &RationalFunction {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: RationalFunction) {
        assert!(value.vars() == &self.vars, "entry variable list differs from matrix");
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> Vec<RationalFunction> {
        (0..self.cols).map(|c| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &RationalFunction)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (i / self.cols, i % self.cols, e))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RatfunError::DimensionMismatch(format!(
                "add: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (i, e) in out.entries.iter_mut().enumerate() {
            *e = e.add(&other.entries[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RatfunError::DimensionMismatch(format!(
                "sub: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (i, e) in out.entries.iter_mut().enumerate() {
            *e = e.sub(&other.entries[i])?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(RatfunError::DimensionMismatch(format!(
                "mul: {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(&self.vars, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = RationalFunction::zero(&self.vars);
                for k in 0..self.cols {
                    let term = self.get(r, k).mul(other.get(k, c))?;
                    if !term.is_zero() {
                        acc = if acc.is_zero() { term } else { acc.add(&term)? };
                    }
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Entrywise partial derivative.
    pub fn differentiate(&self, var_idx: usize) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            vars: self.vars.clone(),
            entries: self.entries.iter().map(|e| e.differentiate(var_idx)).collect(),
        }
    }

    /// Evaluate every entry at `point`, failing on any denominator whose
    /// magnitude falls below `eps_den`.
    pub fn evaluate_with(&self, point: &[f64], eps_den: f64) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (r, c, e) in self.entries() {
            out[(r, c)] = e.evaluate_with(point, eps_den)?;
        }
        Ok(out)
    }

    /// Max-norm of the entrywise difference between two evaluated matrices.
    pub fn eval_distance(&self, other: &Self, point: &[f64], eps_den: f64) -> Result<f64> {
        let a = self.evaluate_with(point, eps_den)?;
        let b = other.evaluate_with(point, eps_den)?;
        Ok((a - b).amax())
    }
}
