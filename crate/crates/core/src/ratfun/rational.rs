//! Rational functions: quotients of sparse polynomials.

use std::fmt;

use super::{Rat, RatfunError, Result, SparsePolynomial, VarSet, EPS_DEN};

/// A quotient of two polynomials over the same variable list. No GCD
/// cancellation is performed by arithmetic; the pair stays as built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    numer: SparsePolynomial,
    denom: SparsePolynomial,
}

impl RationalFunction {
    /// Panics if `denom` is the zero polynomial or the variable lists
    /// differ; both indicate construction bugs rather than data errors.
    ///
    /// A constant denominator is folded into the numerator coefficients,
    /// so `16/25*z4` is a polynomial with coefficient 16/25 rather than a
    /// quotient. Non-constant denominators are kept exactly as built.
    pub fn new(numer: SparsePolynomial, denom: SparsePolynomial) -> Self {
        assert!(!denom.is_zero(), "zero denominator polynomial");
        assert!(numer.vars() == denom.vars(), "numerator/denominator variable lists differ");
        if let Some(c) = denom.as_constant() {
            if c.is_one() {
                return RationalFunction { numer, denom };
            }
            let one = SparsePolynomial::one(numer.vars());
            return RationalFunction { numer: numer.scale(&c.recip()), denom: one };
        }
        RationalFunction { numer, denom }
    }

    pub fn from_poly(p: SparsePolynomial) -> Self {
        let one = SparsePolynomial::one(p.vars());
        RationalFunction { numer: p, denom: one }
    }

    pub fn zero(vars: &VarSet) -> Self {
        Self::from_poly(SparsePolynomial::zero(vars))
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::from_poly(SparsePolynomial::one(vars))
    }

    pub fn constant(vars: &VarSet, c: Rat) -> Self {
        Self::from_poly(SparsePolynomial::constant(vars, c))
    }

    pub fn variable(vars: &VarSet, idx: usize) -> Self {
        Self::from_poly(SparsePolynomial::variable(vars, idx))
    }

    pub fn numer(&self) -> &SparsePolynomial {
        &self.numer
    }

    pub fn denom(&self) -> &SparsePolynomial {
        &self.denom
    }

    pub fn vars(&self) -> &VarSet {
        self.numer.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        // n1/d1 + n2/d2 = (n1 d2 + n2 d1) / (d1 d2)
        let n = self
            .numer
            .mul(&other.denom)?
            .add(&other.numer.mul(&self.denom)?)?;
        let d = self.denom.mul(&other.denom)?;
        Ok(RationalFunction::new(n, d))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { numer: self.numer.neg(), denom: self.denom.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(RationalFunction::new(
            self.numer.mul(&other.numer)?,
            self.denom.mul(&other.denom)?,
        ))
    }

    /// Division by a rational function with zero numerator is a
    /// construction error and panics.
    pub fn div(&self, other: &Self) -> Result<Self> {
        assert!(!other.is_zero(), "division by the zero rational function");
        Ok(RationalFunction::new(
            self.numer.mul(&other.denom)?,
            self.denom.mul(&other.numer)?,
        ))
    }

    pub fn pow(&self, exp: u32) -> Self {
        RationalFunction { numer: self.numer.pow(exp), denom: self.denom.pow(exp) }
    }

    /// Quotient rule `(n'd - nd') / d^2`, exact, no cancellation.
    pub fn differentiate(&self, idx: usize) -> Self {
        let n = self.numer.differentiate(idx);
        let d = self.denom.differentiate(idx);
        let numer = n
            .mul(&self.denom)
            .and_then(|a| a.sub(&self.numer.mul(&d).expect("same vars")))
            .expect("same vars");
        let denom = self.denom.mul(&self.denom).expect("same vars");
        RationalFunction { numer, denom }
    }

    /// Evaluate with the default pole threshold [`EPS_DEN`].
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        self.evaluate_with(point, EPS_DEN)
    }

    /// Evaluate, treating `|denominator| < eps_den` as a pole.
    pub fn evaluate_with(&self, point: &[f64], eps_den: f64) -> Result<f64> {
        let d = self.denom.evaluate(point)?;
        if d.abs() < eps_den {
            return Err(RatfunError::DenominatorBelowThreshold { value: d, threshold: eps_den });
        }
        Ok(self.numer.evaluate(point)? / d)
    }

    /// Exact equality as rational functions, via cross-multiplication
    /// (`n1 d2 - n2 d1 == 0`), so representations with different common
    /// factors still compare equal.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        let lhs = self.numer.mul(&other.denom)?;
        let rhs = other.numer.mul(&self.denom)?;
        Ok(lhs.sub(&rhs)?.is_zero())
    }
}

// Display output conforms to the expression grammar, so printing and
// re-parsing is a fixed point.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "({})/({})", self.numer, self.denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> VarSet {
        VarSet::new(&["X1", "X2"])
    }

    #[test]
    fn derivative_of_reciprocal() {
        let vars = v();
        let x1 = RationalFunction::variable(&vars, 0);
        let inv = RationalFunction::one(&vars).div(&x1).unwrap();
        let d = inv.differentiate(0);
        // -1/X1^2
        assert_eq!(d.evaluate(&[2.0, 0.0]).unwrap(), -0.25);
        let expected = RationalFunction::new(
            SparsePolynomial::constant(&vars, Rat::from_integer(-1)),
            SparsePolynomial::variable(&vars, 0).pow(2),
        );
        assert!(d.equivalent(&expected).unwrap());
    }

    #[test]
    fn pole_detection() {
        let vars = v();
        let x1 = RationalFunction::variable(&vars, 0);
        let inv = RationalFunction::one(&vars).div(&x1).unwrap();
        assert!(matches!(
            inv.evaluate(&[0.0, 1.0]),
            Err(RatfunError::DenominatorBelowThreshold { .. })
        ));
    }

    #[test]
    fn equivalence_ignores_common_factors() {
        let vars = v();
        let x1 = RationalFunction::variable(&vars, 0);
        let x2 = RationalFunction::variable(&vars, 1);
        // x2 and (x1*x2)/x1 are the same rational function.
        let blown = x1.mul(&x2).unwrap().div(&x1).unwrap();
        assert!(blown.equivalent(&x2).unwrap());
        assert_ne!(blown, x2);
    }
}
