//! Differentials as algebraic units.
//!
//! Expressions over symbols and differential atoms (`dx`, `d^2x`, ...) are
//! kept in a canonical form. The differential operator acts on them
//! without a preferred independent variable, derivatives are expanded as
//! exact quotients of differential polynomials, and every identity can be
//! checked numerically along polynomial curves with Taylor jets.

pub mod canon;
pub mod differential;
pub mod expansion;
pub mod expr;
pub mod jet;
pub mod ode;
pub mod parser;
pub mod rational;
pub mod upoly;

pub use canon::normalize;
pub use differential::{differentiate, differentiate_equation, eliminate_pending, nth_differential};
pub use expansion::{
    arbogast_expand, invert_second_derivative, reduce_with_progression, reinflate_second, verify_dxdx_subtlety,
    verify_second_chain_rule, DerivativeForm, Progression,
};
pub use expr::{DiffAtom, Expr, ExprError, Func, Rational, Symbol};
pub use parser::{format, format_latex, format_plain, parse, ParseError, Style};
pub use rational::{DiffPolynomial, DiffRational};
pub use upoly::UnivariatePoly;
