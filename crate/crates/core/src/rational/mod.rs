//! Exact quotients of polynomials in symbols and differential atoms.

mod poly;
mod ratio;

pub use poly::{gcd, DiffPolynomial, Monomial};
pub use ratio::DiffRational;

use crate::expr::ExprError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RationalError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("unresolved differential `{0}`")]
    PendingDifferential(String),
    #[error("exponent {0} is too large")]
    ExponentTooLarge(i64),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
