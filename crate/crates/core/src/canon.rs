//! Canonical forms.
//!
//! A canonical tree satisfies:
//! - sums hold at least two terms, no nested sums, like terms merged, terms
//!   in [`term_order`];
//! - products hold no nested products or sums, at most one leading constant
//!   (never 1), at most one factor per base, factors sorted by base;
//! - powers have exponent not in {0, 1}; their base is a symbol, atom, sum,
//!   function application or an integer constant whose exact root does not
//!   exist;
//! - products and positive integer powers of sums are expanded.
//!
//! Powers distribute over products and compose (`(u^a)^b = u^(ab)`) as formal
//! rules, without branch analysis.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::expr::{Expr, ExprError, Func, Rational, Result};

/// Returns the canonical form of `e`.
pub fn normalize(e: &Expr) -> Result<Expr> {
    match e {
        Expr::Const(_) | Expr::Sym(_) | Expr::Atom(_) => Ok(e.clone()),
        Expr::Sum(xs) => add_all(xs.iter().map(normalize).collect::<Result<_>>()?),
        Expr::Product(xs) => mul_all(xs.iter().map(normalize).collect::<Result<_>>()?),
        // Compose before the base is expanded: ((x-1)^2)^-1 is (x-1)^-2.
        Expr::Pow(b, r) => match b.as_ref() {
            Expr::Pow(inner, s) => normalize(&Expr::Pow(inner.clone(), s * r)),
            _ => pow(normalize(b)?, r),
        },
        Expr::Func(f, a) => apply(*f, normalize(a)?),
        Expr::Pending(a) => Err(ExprError::PendingDifferential(a.to_string())),
    }
}

/// Order of terms inside a canonical sum.
///
/// Each term is read as a monomial `c * b1^e1 * b2^e2 ...` over the bases in
/// node order, and terms are ranked descending-lexicographically on the
/// exponent vector: the term with the larger exponent on the smallest base
/// comes first. With `x < dx < d^2x < y < ...` this prints
/// `3x^2 d^2x + 6x dx^2` and `d^2y/dx^2 - dy d^2x/dx^3`.
pub fn term_order(a: &Expr, b: &Expr) -> Ordering {
    let (ca, fa) = a.split_coefficient();
    let (cb, fb) = b.split_coefficient();
    let pa: Vec<_> = fa.iter().map(Expr::as_power).collect();
    let pb: Vec<_> = fb.iter().map(Expr::as_power).collect();
    monomial_order(&pa, &pb).then_with(|| ca.cmp(&cb))
}

fn monomial_order(a: &[(&Expr, Rational)], b: &[(&Expr, Rational)]) -> Ordering {
    let zero = Rational::zero();
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return if *ea > zero { Ordering::Less } else { Ordering::Greater },
            (None, Some((_, eb))) => return if *eb > zero { Ordering::Greater } else { Ordering::Less },
            (Some((ba, ea)), Some((bb, eb))) => match ba.cmp(bb) {
                Ordering::Equal => {
                    if ea != eb {
                        return if ea > eb { Ordering::Less } else { Ordering::Greater };
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return if *ea > zero { Ordering::Less } else { Ordering::Greater },
                Ordering::Greater => {
                    return if *eb > zero { Ordering::Greater } else { Ordering::Less }
                }
            },
        }
    }
}

/// Sum of canonical terms.
pub fn add_all(terms: Vec<Expr>) -> Result<Expr> {
    let mut merged: BTreeMap<Vec<Expr>, Rational> = BTreeMap::new();
    let mut stack = terms;
    while let Some(t) = stack.pop() {
        if let Expr::Sum(inner) = t {
            stack.extend(inner);
            continue;
        }
        let (c, rest) = t.split_coefficient();
        if c.is_zero() {
            continue;
        }
        *merged.entry(rest).or_insert_with(Rational::zero) += c;
    }
    let mut out: Vec<Expr> = merged
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(factors, c)| build_product(c, factors))
        .collect();
    out.sort_by(term_order);
    Ok(match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Sum(out),
    })
}

/// Product of canonical factors, expanded over sums.
pub fn mul_all(factors: Vec<Expr>) -> Result<Expr> {
    let mut coeff = Rational::one();
    let mut powers: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = factors;
    while let Some(f) = stack.pop() {
        match f {
            Expr::Const(c) => coeff *= c,
            Expr::Product(inner) => stack.extend(inner),
            Expr::Pow(b, r) => *powers.entry(*b).or_insert_with(Rational::zero) += r,
            Expr::Sum(ts) => {
                let (lead, primitive) = split_content(&ts);
                coeff *= lead;
                *powers.entry(primitive).or_insert_with(Rational::zero) += Rational::one();
            }
            Expr::Pending(a) => return Err(ExprError::PendingDifferential(a.to_string())),
            other => *powers.entry(other).or_insert_with(Rational::zero) += Rational::one(),
        }
    }
    if coeff.is_zero() {
        return Ok(Expr::zero());
    }

    let mut plain = Vec::new();
    let mut to_expand: Vec<(Expr, u32)> = Vec::new();
    for (base, exp) in powers {
        if exp.is_zero() {
            continue;
        }
        if let Expr::Sum(_) = base {
            if exp.is_integer() && exp.is_positive() {
                let k = exp.to_integer().to_u32().ok_or_else(|| {
                    ExprError::Domain("exponent too large to expand".to_string())
                })?;
                to_expand.push((base, k));
                continue;
            }
        }
        match pow(base, &exp)? {
            Expr::Const(c) => coeff *= c,
            Expr::Product(fs) => {
                for f in fs {
                    match f {
                        Expr::Const(c) => coeff *= c,
                        other => plain.push(other),
                    }
                }
            }
            sum @ Expr::Sum(_) => to_expand.push((sum, 1)),
            other => plain.push(other),
        }
    }
    if coeff.is_zero() {
        return Ok(Expr::zero());
    }
    plain.sort_by(|a, b| a.as_power().0.cmp(b.as_power().0));
    let monomial = build_product(coeff, plain);
    if to_expand.is_empty() {
        return Ok(monomial);
    }

    let mut acc = vec![monomial];
    for (sum, k) in to_expand {
        let sum_terms = sum.terms();
        for _ in 0..k {
            let mut next = Vec::with_capacity(acc.len() * sum_terms.len());
            for t in &acc {
                for u in &sum_terms {
                    next.push(mul_all(vec![t.clone(), u.clone()])?);
                }
            }
            acc = add_all(next)?.terms();
        }
    }
    add_all(acc)
}

/// Canonical `base^exp` for a canonical `base`.
pub fn pow(base: Expr, exp: &Rational) -> Result<Expr> {
    if exp.is_zero() {
        return Ok(Expr::one());
    }
    if exp.is_one() {
        return Ok(base);
    }
    match base {
        Expr::Const(c) => const_pow(&c, exp),
        Expr::Pow(inner, r) => pow(*inner, &(r * exp)),
        Expr::Product(fs) => mul_all(
            fs.into_iter()
                .map(|f| pow(f, exp))
                .collect::<Result<Vec<_>>>()?,
        ),
        Expr::Sum(ts) => {
            if exp.is_integer() && exp.is_positive() {
                let k = exp.to_integer().to_usize().ok_or_else(|| {
                    ExprError::Domain("exponent too large to expand".to_string())
                })?;
                return mul_all(vec![Expr::Sum(ts); k]);
            }
            let (lead, primitive) = split_content(&ts);
            if exp.is_integer() {
                let scale = rational_powi(&lead, exp.to_integer())?;
                return Ok(build_product(scale, vec![Expr::Pow(Box::new(primitive), exp.clone())]));
            }
            if lead.is_positive() {
                if let Some(scale) = exact_rational_pow(&lead, exp) {
                    return Ok(build_product(
                        scale,
                        vec![Expr::Pow(Box::new(primitive), exp.clone())],
                    ));
                }
            }
            Ok(Expr::Pow(Box::new(Expr::Sum(ts)), exp.clone()))
        }
        Expr::Pending(a) => Err(ExprError::PendingDifferential(a.to_string())),
        other => Ok(Expr::Pow(Box::new(other), exp.clone())),
    }
}

/// Canonical function application on a canonical argument.
pub fn apply(f: Func, arg: Expr) -> Result<Expr> {
    if let Expr::Const(c) = &arg {
        match f {
            Func::Sin if c.is_zero() => return Ok(Expr::zero()),
            Func::Cos | Func::Exp if c.is_zero() => return Ok(Expr::one()),
            Func::Ln if c.is_one() => return Ok(Expr::zero()),
            Func::Ln if !c.is_positive() => {
                return Err(ExprError::Domain(format!("ln of non-positive constant {c}")))
            }
            _ => {}
        }
    }
    Ok(Expr::Func(f, Box::new(arg)))
}

/// `c * f1 * f2 ...` for already sorted, merged factors.
fn build_product(coeff: Rational, mut factors: Vec<Expr>) -> Expr {
    if coeff.is_zero() {
        return Expr::zero();
    }
    if factors.is_empty() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() {
        if factors.len() == 1 {
            return factors.pop().unwrap();
        }
        return Expr::Product(factors);
    }
    let mut all = Vec::with_capacity(factors.len() + 1);
    all.push(Expr::Const(coeff));
    all.extend(factors);
    Expr::Product(all)
}

/// Splits a canonical sum into its leading coefficient and the sum divided
/// by it (whose leading coefficient is then 1).
fn split_content(terms: &[Expr]) -> (Rational, Expr) {
    let lead = terms[0].split_coefficient().0;
    if lead.is_one() {
        return (lead, Expr::Sum(terms.to_vec()));
    }
    let scaled = terms
        .iter()
        .map(|t| {
            let (c, fs) = t.split_coefficient();
            build_product(c / &lead, fs)
        })
        .collect();
    (lead, Expr::Sum(scaled))
}

fn rational_powi(base: &Rational, exp: BigInt) -> Result<Rational> {
    let e = exp
        .to_i32()
        .ok_or_else(|| ExprError::Domain("exponent too large".to_string()))?;
    if base.is_zero() && e < 0 {
        return Err(ExprError::Domain("zero raised to a negative power".to_string()));
    }
    Ok(num_traits::Pow::pow(base, e))
}

/// `c^exp` when it is rational.
fn exact_rational_pow(c: &Rational, exp: &Rational) -> Option<Rational> {
    let q = exp.denom().to_u32()?;
    let p = exp.numer().clone();
    let num = exact_root(c.numer(), q)?;
    let den = exact_root(c.denom(), q)?;
    rational_powi(&Rational::new(num, den), p).ok()
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if n.is_negative() {
        if q.is_multiple_of(2) {
            return None;
        }
        return exact_root(&-n, q).map(|r| -r);
    }
    let r = n.nth_root(q);
    (num_traits::Pow::pow(&r, q) == *n).then_some(r)
}

fn const_pow(c: &Rational, exp: &Rational) -> Result<Expr> {
    if c.is_zero() {
        if exp.is_negative() {
            return Err(ExprError::Domain("zero raised to a negative power".to_string()));
        }
        return Ok(Expr::zero());
    }
    if exp.is_integer() {
        return Ok(Expr::Const(rational_powi(c, exp.to_integer())?));
    }
    let (mut coeff, mut factors) = integer_pow(c.numer(), exp)?;
    let (den_coeff, den_factors) = integer_pow(c.denom(), &-exp)?;
    coeff *= den_coeff;
    factors.extend(den_factors);
    factors.sort();
    Ok(build_product(coeff, factors))
}

/// `m^exp` for a nonzero integer `m` and non-integer `exp`, as a rational
/// coefficient times at most one `|m|^f` factor with `0 < f < 1`.
fn integer_pow(m: &BigInt, exp: &Rational) -> Result<(Rational, Vec<Expr>)> {
    if m.is_one() {
        return Ok((Rational::one(), Vec::new()));
    }
    let q = exp.denom().clone();
    if m.is_negative() && q.is_even() {
        return Err(ExprError::Domain(format!("even root of negative constant {m}")));
    }
    if let Some(v) = exact_rational_pow(&Rational::from_integer(m.clone()), exp) {
        return Ok((v, Vec::new()));
    }
    let whole = exp.floor();
    let frac = exp - &whole;
    let magnitude = m.abs();
    let mut coeff = rational_powi(&Rational::from_integer(magnitude.clone()), whole.to_integer())?;
    if m.is_negative() && exp.numer().is_odd() {
        coeff = -coeff;
    }
    if magnitude.is_one() {
        return Ok((coeff, Vec::new()));
    }
    Ok((
        coeff,
        vec![Expr::Pow(Box::new(Expr::Const(Rational::from_integer(magnitude))), frac)],
    ))
}
