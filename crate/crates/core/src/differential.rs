//! The differential operator `d`.
//!
//! `d` acts on expressions without reference to an independent variable:
//! `d(x) = dx`, `d(d^k x) = d^(k+1) x`, and the usual linearity, product,
//! power and function rules. Results are normalized.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::canon::normalize;
use crate::expr::{Bindings, DiffAtom, Expr, ExprError, Result, Symbol, Target};

pub fn differentiate(e: &Expr) -> Result<Expr> {
    normalize(&raw_differential(e)?)
}

pub fn nth_differential(e: &Expr, n: u32) -> Result<Expr> {
    let mut out = e.clone();
    for _ in 0..n {
        out = differentiate(&out)?;
    }
    Ok(out)
}

/// Applies `d` to both sides of `lhs = rhs`.
pub fn differentiate_equation(lhs: &Expr, rhs: &Expr) -> Result<(Expr, Expr)> {
    Ok((differentiate(lhs)?, differentiate(rhs)?))
}

/// Resolves every parser `d(u)` marker, innermost first.
pub fn eliminate_pending(e: &Expr) -> Result<Expr> {
    normalize(&resolve(e)?)
}

fn resolve(e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Pending(arg) => raw_differential(&resolve(arg)?)?,
        Expr::Const(_) | Expr::Sym(_) | Expr::Atom(_) => e.clone(),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(resolve).collect::<Result<_>>()?),
        Expr::Product(xs) => Expr::Product(xs.iter().map(resolve).collect::<Result<_>>()?),
        Expr::Pow(b, r) => Expr::Pow(Box::new(resolve(b)?), r.clone()),
        Expr::Func(f, a) => Expr::Func(*f, Box::new(resolve(a)?)),
    })
}

/// Unnormalized `d(e)`.
fn raw_differential(e: &Expr) -> Result<Expr> {
    Ok(match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Sym(s) => Expr::Atom(DiffAtom::new(s.clone(), 1)?),
        Expr::Atom(a) => Expr::Atom(a.raised()),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(raw_differential).collect::<Result<_>>()?),
        Expr::Product(xs) => {
            let mut terms = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                if matches!(x, Expr::Const(_)) {
                    continue;
                }
                let mut factors = xs.clone();
                factors[i] = raw_differential(x)?;
                terms.push(Expr::Product(factors));
            }
            Expr::Sum(terms)
        }
        Expr::Pow(u, p) => {
            if p.is_zero() {
                return Ok(Expr::zero());
            }
            Expr::Product(vec![
                Expr::Const(p.clone()),
                Expr::Pow(u.clone(), p - crate::Rational::one()),
                raw_differential(u)?,
            ])
        }
        Expr::Func(f, u) => Expr::Product(vec![f.derivative_at(u), raw_differential(u)?]),
        Expr::Pending(_) => return Err(ExprError::PendingDifferential(e.to_string())),
    })
}

/// Substitutes `symbol = value` together with every differential of the
/// symbol: `d^k symbol` becomes `d^k value`.
pub fn substitute_curve(e: &Expr, symbol: &Symbol, value: &Expr) -> Result<Expr> {
    substitute_curves(e, &BTreeMap::from([(symbol.clone(), value.clone())]))
}

/// Simultaneous form of [`substitute_curve`].
pub fn substitute_curves(e: &Expr, curves: &BTreeMap<Symbol, Expr>) -> Result<Expr> {
    let mut bindings = Bindings::new();
    let atoms = crate::expr::free_atoms(e);
    for (s, value) in curves {
        bindings.insert(Target::Symbol(s.clone()), value.clone());
        let top = atoms.iter().filter(|a| a.base() == s).map(DiffAtom::order).max();
        let mut current = value.clone();
        for k in 1..=top.unwrap_or(0) {
            current = differentiate(&current)?;
            bindings.insert(Target::Atom(DiffAtom::new(s.clone(), k)?), current.clone());
        }
    }
    crate::expr::substitute(e, &bindings)
}
