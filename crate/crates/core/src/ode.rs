//! `y'' = f(y) (y')^3` solved by swapping the roles of `x` and `y`.
//!
//! Inverting the second derivative turns the equation into
//! `D_y^2 x = -f(y)`, so `x = X(y) + c1 y + c2` with `X = -∬f`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expansion::{arbogast_expand, invert_second_derivative, ExpansionError};
use crate::expr::Symbol;
use crate::rational::{DiffPolynomial, DiffRational, RationalError};
use crate::upoly::UnivariatePoly;

/// Either solution is rejected once `|y|` or `|y'|` exceeds this.
pub const BLOWUP_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("f must be a polynomial in y, found one in {0}")]
    WrongVariable(String),
    #[error("the initial slope y'(x0) must be nonzero")]
    ZeroInitialSlope,
    #[error("solution blows up near x = {x:.4} (y = {y:.3e}, y' = {slope:.3e})")]
    BlowupDetected { x: f64, y: f64, slope: f64 },
    #[error("step must be positive and span finite")]
    InvalidStep,
    #[error("inversion left {0} instead of -f(y)")]
    CancellationFailed(String),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

type Result<T, E = OdeError> = std::result::Result<T, E>;

/// `x = X(y) + c1 y + c2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitSolution {
    pub f: UnivariatePoly,
    /// `X = -∬f dy dy`.
    pub particular: UnivariatePoly,
    /// `D_y^2 x` obtained by inversion; equals `-f(y)`.
    pub inverted: DiffRational,
}

impl fmt::Display for ImplicitSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let y = self.f.var();
        if self.particular.is_zero() {
            write!(f, "x = c1 {y} + c2")
        } else {
            write!(f, "x = {} + c1 {y} + c2", self.particular)
        }
    }
}

pub fn integrate_poly(p: &UnivariatePoly) -> UnivariatePoly {
    p.integrate()
}

pub fn solve_by_swap(f: &UnivariatePoly) -> Result<ImplicitSolution> {
    let y = Symbol::new("y").expect("valid symbol");
    let x = Symbol::new("x").expect("valid symbol");
    if f.var() != &y && f.degree().is_some_and(|d| d > 0) {
        return Err(OdeError::WrongVariable(f.var().to_string()));
    }
    let f = UnivariatePoly::new(y.clone(), f.coefficients().to_vec());

    let f_of_y = DiffRational::from_expr(&f.to_expr())?;
    let d1 = arbogast_expand(&y, &x, 1)?.expansion;
    let d2 = &f_of_y * &d1.powi(3)?;
    let inverted = invert_second_derivative(&d2, &d1)?;
    if inverted != -&f_of_y {
        return Err(OdeError::CancellationFailed(inverted.to_string()));
    }

    let particular = integrate_poly(&integrate_poly(&f)).neg();
    debug_assert_eq!(particular.derivative().derivative(), f.neg());
    Ok(ImplicitSolution { f, particular, inverted })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
}

/// `c1 = 1/y'0 - X'(y0)`, `c2 = x0 - X(y0) - c1 y0`.
pub fn fit_constants(sol: &ImplicitSolution, y0: f64, yprime0: f64, x0: f64) -> Result<Constants> {
    fit(&sol.particular, y0, yprime0, x0)
}

fn fit(particular: &UnivariatePoly, y0: f64, yprime0: f64, x0: f64) -> Result<Constants> {
    if yprime0 == 0.0 {
        return Err(OdeError::ZeroInitialSlope);
    }
    let c1 = 1.0 / yprime0 - particular.derivative().eval_f64(y0);
    let c2 = x0 - particular.eval_f64(y0) - c1 * y0;
    Ok(Constants { c1, c2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericReport {
    pub f: String,
    pub constants: Constants,
    pub max_residual_minus_branch: f64,
    pub max_residual_plus_branch: f64,
    pub step: f64,
    pub span: f64,
}

impl NumericReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_residual_minus_branch <= tolerance
    }
}

fn rk4_step(f: &UnivariatePoly, y: f64, v: f64, h: f64) -> (f64, f64) {
    let rhs = |y: f64, v: f64| (v, f.eval_f64(y) * v * v * v);
    let (k1y, k1v) = rhs(y, v);
    let (k2y, k2v) = rhs(y + 0.5 * h * k1y, v + 0.5 * h * k1v);
    let (k3y, k3v) = rhs(y + 0.5 * h * k2y, v + 0.5 * h * k2v);
    let (k4y, k4v) = rhs(y + h * k3y, v + h * k3v);
    (
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Integrates `y'' = f(y) y'^3` from `x0` over `span` with classical RK4
/// (uniform step no larger than `step`) and reports the largest deviation
/// from `x = X(y) + c1 y + c2` along the trajectory, for the derived `X`
/// and for `-X` with its own fitted constants.
pub fn verify_numeric(f: &UnivariatePoly, y0: f64, yprime0: f64, x0: f64, span: f64, step: f64) -> Result<NumericReport> {
    if step.is_nan() || step <= 0.0 || !span.is_finite() {
        return Err(OdeError::InvalidStep);
    }
    let sol = solve_by_swap(f)?;
    let minus = fit(&sol.particular, y0, yprime0, x0)?;
    let opposite = sol.particular.neg();
    let plus = fit(&opposite, y0, yprime0, x0)?;

    let steps = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let residual = |p: &UnivariatePoly, c: &Constants, x: f64, y: f64| (x - (p.eval_f64(y) + c.c1 * y + c.c2)).abs();

    let (mut y, mut v) = (y0, yprime0);
    let mut worst_minus = residual(&sol.particular, &minus, x0, y);
    let mut worst_plus = residual(&opposite, &plus, x0, y);
    for i in 1..=steps {
        (y, v) = rk4_step(&sol.f, y, v, h);
        let x = x0 + h * i as f64;
        if !y.is_finite() || !v.is_finite() || y.abs() > BLOWUP_LIMIT || v.abs() > BLOWUP_LIMIT {
            return Err(OdeError::BlowupDetected { x, y, slope: v });
        }
        worst_minus = worst_minus.max(residual(&sol.particular, &minus, x, y));
        worst_plus = worst_plus.max(residual(&opposite, &plus, x, y));
    }
    Ok(NumericReport {
        f: sol.f.to_string(),
        constants: minus,
        max_residual_minus_branch: worst_minus,
        max_residual_plus_branch: worst_plus,
        step: h.abs(),
        span,
    })
}

/// Residual ratio between steps `step` and `step / 2`; about 16 for a
/// fourth-order method.
pub fn rk4_convergence_ratio(f: &UnivariatePoly, y0: f64, yprime0: f64, x0: f64, span: f64, step: f64) -> Result<f64> {
    let coarse = verify_numeric(f, y0, yprime0, x0, span, step)?;
    let fine = verify_numeric(f, y0, yprime0, x0, span, step / 2.0)?;
    Ok(coarse.max_residual_minus_branch / fine.max_residual_minus_branch)
}

/// `D_y^2 X + f` as a polynomial; zero for every solution.
pub fn residual_polynomial(sol: &ImplicitSolution) -> UnivariatePoly {
    let second = sol.particular.derivative().derivative();
    let coeffs = (0..=second.degree().unwrap_or(0).max(sol.f.degree().unwrap_or(0)))
        .map(|k| second.coefficient(k) + sol.f.coefficient(k))
        .collect();
    UnivariatePoly::new(sol.f.var().clone(), coeffs)
}

impl ImplicitSolution {
    /// True when no differential survives the inversion.
    pub fn inverted_is_polynomial(&self) -> bool {
        self.inverted.denominator() == &DiffPolynomial::one()
    }
}
