//! Sparse multivariate polynomials over exact rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{Rat, RatfunError, Result};

/// Shared, ordered list of variable names. Cloning is cheap; two values
/// compare equal when the name lists are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        VarSet(Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

/// Exponent vector, one entry per variable. Ordered by total degree first,
/// then lexicographically (graded lex), which fixes printing and
/// evaluation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial: a canonical map from exponent vectors
/// to nonzero exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    vars: VarSet,
    terms: BTreeMap<Monomial, Rat>,
}

impl SparsePolynomial {
    pub fn zero(vars: &VarSet) -> Self {
        SparsePolynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: Rat) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Rat::one())
    }

    pub fn variable(vars: &VarSet, idx: usize) -> Self {
        assert!(idx < vars.len(), "variable index out of range");
        let mut p = Self::zero(vars);
        p.terms.insert(Monomial::variable(vars.len(), idx), Rat::one());
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the constant polynomial 1.
    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// The value of a constant (including zero) polynomial, `None` if any
    /// variable appears.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_constant())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    fn insert_term(&mut self, mono: Monomial, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_vars(&self, other: &Self, op: &str) -> Result<()> {
        if self.vars != other.vars {
            return Err(RatfunError::VariableMismatch(format!(
                "{op}: {:?} vs {:?}",
                self.vars.names(),
                other.vars.names()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other, "poly add")?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other, "poly mul")?;
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        SparsePolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one(&self.vars);
        for _ in 0..exp {
            out = out.mul(self).expect("same vars");
        }
        out
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn differentiate(&self, idx: usize) -> Self {
        assert!(idx < self.vars.len(), "variable index out of range");
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[idx] = e - 1;
            out.insert_term(Monomial(exps), c * &Rat::from_integer(e as i64));
        }
        out
    }

    /// Floating-point evaluation as a plain sparse sum in canonical term
    /// order.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.vars.len() {
            return Err(RatfunError::DimensionMismatch(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.vars.len()
            )));
        }
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= x.powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest graded-lex term first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            // A leading minus is unary and binds tighter than `^`, so a
            // negative first term always spells out its coefficient:
            // `-1*x^2` rather than `-x^2` (which would parse as `(-x)^2`).
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_constant() || (i == 0 && neg) {
                factors.push(mag.to_string());
            }
            for (name, &e) in self.vars.names().iter().zip(m.exponents()) {
                if e == 1 {
                    factors.push(name.clone());
                } else if e > 1 {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
