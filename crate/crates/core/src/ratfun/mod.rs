//! Exact multivariate rational-function algebra.
//!
//! Coefficients are arbitrary-precision rationals; evaluation converts to
//! `f64` only at the leaves. Arithmetic never attempts multivariate GCD
//! cancellation: uncancelled numerator/denominator pairs are what pole
//! scanning operates on, and spurious common factors merely shrink the
//! usable domain, which the scan detects.

mod matrix;
mod parse;
mod poly;
mod rational;
mod scalar;

pub use matrix::RatMatrix;
pub use parse::parse_expression;
pub use poly::{Monomial, SparsePolynomial, VarSet};
pub use rational::RationalFunction;
pub use scalar::Rat;

use thiserror::Error;

/// Default evaluation threshold: below this denominator magnitude a point
/// is treated as a pole rather than producing a huge value.
pub const EPS_DEN: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RatfunError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown variable `{name}` at byte {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("|denominator| = {value:e} below threshold {threshold:e}")]
    DenominatorBelowThreshold { value: f64, threshold: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands use different variable lists: {0}")]
    VariableMismatch(String),
}

pub type Result<T> = std::result::Result<T, RatfunError>;
