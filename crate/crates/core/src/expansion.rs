//! Arbogast expansions `D_x^n y` and the operations built on them.
//!
//! `D_x^1 y = dy/dx` and `D_x^(n+1) y = d(D_x^n y)/dx`, each stated as a
//! reduced [`DiffRational`] in the differentials of both variables. No
//! second differential is assumed to vanish unless a [`Progression`] is
//! applied explicitly.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::canon::normalize;
use crate::differential::differentiate;
use crate::expr::{free_atoms, free_symbols, Bindings, DiffAtom, Expr, ExprError, Rational, Symbol, Target};
use crate::rational::{DiffPolynomial, DiffRational, RationalError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExpansionError {
    #[error("derivative order must be at least 1")]
    ZeroOrder,
    #[error("no d^2{dependent}/d{independent}^2 ratio to reinflate")]
    PatternNotFound { dependent: String, independent: String },
    #[error("`{expr}` must depend on {expected} alone")]
    ForeignSymbol { expected: String, expr: String },
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T, E = ExpansionError> = std::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivativeForm {
    pub dependent: Symbol,
    pub independent: Symbol,
    pub order: u32,
    pub expansion: DiffRational,
}

impl DerivativeForm {
    pub fn to_expr(&self) -> Expr {
        self.expansion.to_expr()
    }
}

impl fmt::Display for DerivativeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expansion.fmt(f)
    }
}

fn atom(s: &Symbol, order: u32) -> Expr {
    Expr::Atom(DiffAtom::new(s.clone(), order).expect("positive order"))
}

fn atom_ratio(s: &Symbol, order: u32) -> DiffRational {
    DiffRational::from_poly(DiffPolynomial::generator(atom(s, order)))
}

/// `D_independent^n dependent` by the differential recurrence.
///
/// `dependent == independent` is accepted: the result is `1` for `n = 1`
/// and `0` beyond.
pub fn arbogast_expand(dependent: &Symbol, independent: &Symbol, n: u32) -> Result<DerivativeForm> {
    if n == 0 {
        return Err(ExpansionError::ZeroOrder);
    }
    let dx = atom_ratio(independent, 1);
    let mut current = atom_ratio(dependent, 1).checked_div(&dx)?;
    for _ in 1..n {
        current = current.differential()?.checked_div(&dx)?;
    }
    Ok(DerivativeForm {
        dependent: dependent.clone(),
        independent: independent.clone(),
        order: n,
        expansion: current,
    })
}

/// Choice of independent variable: its differentials of order two and
/// higher are set to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub independent: Symbol,
}

impl Progression {
    pub fn new(independent: Symbol) -> Self {
        Self { independent }
    }

    fn kills(&self, g: &Expr) -> bool {
        matches!(g, Expr::Atom(a) if a.base() == &self.independent && a.order() >= 2)
    }

    fn reduce_poly(&self, p: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in p.terms() {
            if !m.factors().any(|(g, _)| self.kills(g)) {
                out = &out + &DiffPolynomial::term(m.clone(), c.clone());
            }
        }
        out
    }
}

/// Values that can be reduced under a [`Progression`].
pub trait ProgressionReduce: Sized {
    fn reduce_with(&self, p: &Progression) -> Result<Self>;
}

impl ProgressionReduce for Expr {
    fn reduce_with(&self, p: &Progression) -> Result<Self> {
        let bindings: Bindings = free_atoms(self)
            .into_iter()
            .filter(|a| a.base() == &p.independent && a.order() >= 2)
            .map(|a| (Target::Atom(a), Expr::zero()))
            .collect();
        Ok(crate::expr::substitute(self, &bindings)?)
    }
}

impl ProgressionReduce for DiffRational {
    fn reduce_with(&self, p: &Progression) -> Result<Self> {
        Ok(DiffRational::new(p.reduce_poly(self.numerator()), p.reduce_poly(self.denominator()))?)
    }
}

pub fn reduce_with_progression<T: ProgressionReduce>(e: &T, p: &Progression) -> Result<T> {
    e.reduce_with(p)
}

/// Replaces each `d^2y/dx^2` ratio by the full second-order expansion.
///
/// In a term carrying `(d^2y)^a dx^b`, `m = min(a, floor(-b/2))` copies of
/// the ratio are replaced.
pub fn reinflate_second(e: &Expr, dependent: &Symbol, independent: &Symbol) -> Result<Expr> {
    let e = normalize(e)?;
    let d2y = atom(dependent, 2);
    let dx = atom(independent, 1);
    let full = arbogast_expand(dependent, independent, 2)?.to_expr();
    let mut found = false;
    let mut terms = Vec::new();
    for term in e.terms() {
        let (_, factors) = term.split_coefficient();
        let exponent_of = |target: &Expr| -> Rational {
            factors
                .iter()
                .map(|f| f.as_power())
                .filter(|(b, _)| *b == target)
                .map(|(_, r)| r)
                .fold(Rational::zero(), |acc, r| acc + r)
        };
        let a = exponent_of(&d2y);
        let b = exponent_of(&dx);
        let pairs = if a.is_integer() && b.is_integer() && a.is_positive() && b.is_negative() {
            let half = (-b).to_integer().to_i64().unwrap_or(0) / 2;
            a.to_integer().to_i64().unwrap_or(0).min(half)
        } else {
            0
        };
        if pairs == 0 {
            terms.push(term);
            continue;
        }
        found = true;
        terms.push(Expr::Product(vec![
            term,
            d2y.clone().powi(-pairs),
            dx.clone().powi(2 * pairs),
            full.clone().powi(pairs),
        ]));
    }
    if !found {
        return Err(ExpansionError::PatternNotFound {
            dependent: dependent.to_string(),
            independent: independent.to_string(),
        });
    }
    Ok(normalize(&Expr::Sum(terms))?)
}

/// `D_y^2 x = -D_x^2 y (D_x^1 y)^-3`.
pub fn invert_second_derivative(d2: &DiffRational, d1: &DiffRational) -> Result<DiffRational> {
    if d1.is_zero() {
        return Err(RationalError::DivisionByZeroPolynomial.into());
    }
    Ok(-&(d2 * &d1.powi(-3)?))
}

/// `de/ds` for an expression in `s` alone.
pub fn ordinary_derivative(e: &Expr, s: &Symbol) -> Result<Expr> {
    let foreign = free_symbols(e).iter().any(|x| x != s);
    if foreign || !free_atoms(e).is_empty() {
        return Err(ExpansionError::ForeignSymbol { expected: s.to_string(), expr: e.to_string() });
    }
    let de = differentiate(e)?;
    Ok(normalize(&Expr::Product(vec![de, atom(s, 1).recip()]))?)
}

pub fn ordinary_derivative_n(e: &Expr, s: &Symbol, n: u32) -> Result<Expr> {
    let mut out = e.clone();
    for _ in 0..n {
        out = ordinary_derivative(&out, s)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainRuleReport {
    pub y_of_x: Expr,
    pub x_of_t: Expr,
    /// `(D_x^2 y)(dx/dt)^2`, valid only when `d^2x = 0`.
    pub naive: Expr,
    /// `(D_x^2 y)(dx/dt)^2 + (D_x y)(D_t^2 x)`.
    pub faa_di_bruno: Expr,
    /// Second derivative of `y(x(t))` in `t`.
    pub direct: Expr,
    pub identity_lhs: DiffRational,
    pub identity_rhs: DiffRational,
    pub identity_holds: bool,
}

impl ChainRuleReport {
    pub fn naive_matches_direct(&self) -> bool {
        self.naive == self.direct
    }

    pub fn faa_di_bruno_matches_direct(&self) -> bool {
        self.faa_di_bruno == self.direct
    }

    pub fn passed(&self) -> bool {
        self.faa_di_bruno_matches_direct() && self.identity_holds
    }
}

/// Compares the naive, Faà di Bruno and direct second derivatives of
/// `y(x(t))`, where `y_of_x` is in the symbol `x` and `x_of_t` in `t`, and
/// checks the chain identity between full Arbogast forms:
/// `D_t^2 y = D_x^2 y (D_t x)^2 + D_x y D_t^2 x`.
pub fn verify_second_chain_rule(y_of_x: &Expr, x_of_t: &Expr) -> Result<ChainRuleReport> {
    let x = Symbol::new("x")?;
    let y = Symbol::new("y")?;
    let t = Symbol::new("t")?;
    let at_curve = |e: &Expr| -> Result<Expr> {
        let bindings = Bindings::from([(Target::Symbol(x.clone()), x_of_t.clone())]);
        Ok(crate::expr::substitute(e, &bindings)?)
    };
    let fx = ordinary_derivative(y_of_x, &x)?;
    let fxx = ordinary_derivative(&fx, &x)?;
    let xt = ordinary_derivative(x_of_t, &t)?;
    let xtt = ordinary_derivative(&xt, &t)?;
    let naive = normalize(&Expr::Product(vec![at_curve(&fxx)?, xt.clone().powi(2)]))?;
    let faa_di_bruno = normalize(&Expr::Sum(vec![
        naive.clone(),
        Expr::Product(vec![at_curve(&fx)?, xtt]),
    ]))?;
    let direct = ordinary_derivative_n(&at_curve(y_of_x)?, &t, 2)?;

    let lhs = arbogast_expand(&y, &t, 2)?.expansion;
    let rhs = &(&arbogast_expand(&y, &x, 2)?.expansion * &arbogast_expand(&x, &t, 1)?.expansion.powi(2)?)
        + &(&arbogast_expand(&y, &x, 1)?.expansion * &arbogast_expand(&x, &t, 2)?.expansion);
    let identity_holds = lhs == rhs && lhs.is_equivalent(&rhs);
    Ok(ChainRuleReport {
        y_of_x: y_of_x.clone(),
        x_of_t: x_of_t.clone(),
        naive,
        faa_di_bruno,
        direct,
        identity_lhs: lhs,
        identity_rhs: rhs,
        identity_holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DxDxReport {
    pub symbol: Symbol,
    /// `D_x^2 x`, the derivative of `dx/dx`.
    pub full_form: DiffRational,
    /// The bare ratio `d^2x/dx^2`.
    pub bare: DiffRational,
}

impl DxDxReport {
    pub fn full_form_is_zero(&self) -> bool {
        self.full_form.is_zero()
    }

    pub fn bare_is_zero(&self) -> bool {
        self.bare.is_zero()
    }

    pub fn passed(&self) -> bool {
        self.full_form_is_zero() && !self.bare_is_zero()
    }
}

pub fn verify_dxdx_subtlety() -> Result<DxDxReport> {
    dxdx_report(&Symbol::new("x")?)
}

pub fn dxdx_report(s: &Symbol) -> Result<DxDxReport> {
    let full_form = arbogast_expand(s, s, 2)?.expansion;
    let bare = atom_ratio(s, 2).checked_div(&atom_ratio(s, 1).powi(2)?)?;
    Ok(DxDxReport { symbol: s.clone(), full_form, bare })
}
