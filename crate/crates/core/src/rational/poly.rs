use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::canon::normalize;
use crate::expr::{Expr, Rational};

/// Product of generators with positive exponents.
///
/// Generators are symbols, differential atoms, or opaque nodes such as
/// `sin(q)` or `y^(1/2)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(BTreeMap<Expr, u32>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn generator(g: Expr, exp: u32) -> Monomial {
        let mut m = BTreeMap::new();
        if exp > 0 {
            m.insert(g, exp);
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, g: &Expr) -> u32 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (&Expr, u32)> {
        self.0.iter().map(|(g, e)| (g, *e))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (g, e) in &other.0 {
            *out.entry(g.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for (g, e) in &other.0 {
            let have = out.get_mut(g)?;
            match (*have).cmp(e) {
                Ordering::Less => return None,
                Ordering::Equal => {
                    out.remove(g);
                }
                Ordering::Greater => *have -= e,
            }
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|(g, e)| other.0.get(g).map(|f| (g.clone(), (*e).min(*f))))
                .collect(),
        )
    }

    /// Lexicographic order, largest generator first.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let mut a = self.0.iter().rev().peekable();
        let mut b = other.0.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ga, ea)), Some((gb, eb))) => match ga.cmp(gb) {
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            a.next();
                            b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }

    pub fn to_expr(&self) -> Expr {
        let factors: Vec<Expr> = self.0.iter().map(|(g, e)| g.clone().powi(i64::from(*e))).collect();
        Expr::Product(factors)
    }
}

/// Polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn generator(g: Expr) -> Self {
        Self::term(Monomial::generator(g, 1), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(One::is_one)
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        match self.terms.len() {
            1 => self.terms.get(&Monomial::one()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.is_zero() || self.as_constant().is_some()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn generators(&self) -> std::collections::BTreeSet<Expr> {
        self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect()
    }

    /// Leading term under [`Monomial::lex_cmp`].
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        it.fold(first.clone(), |acc, m| acc.gcd(m))
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn rational_content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        Rational::new(num, den)
    }

    /// Divides out the rational content and fixes the leading sign.
    pub fn normalized(&self) -> Self {
        let Some((_, lead)) = self.leading_term() else { return Self::zero() };
        let mut c = self.rational_content();
        if lead.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Self> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(k.div(m)?, v.clone());
        }
        Some(Self { terms })
    }

    /// Exact quotient, `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quotient = Self::zero();
        while let Some((m, c)) = rem.leading_term() {
            let q = Self::term(m.div(&lm)?, c / &lc);
            rem = &rem - &(&q * divisor);
            quotient = &quotient + &q;
        }
        Some(quotient)
    }

    pub fn degree_in(&self, g: &Expr) -> u32 {
        self.terms.keys().map(|m| m.exponent(g)).max().unwrap_or(0)
    }

    /// Coefficients with respect to `g`, each free of `g`.
    fn coefficients_in(&self, g: &Expr) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(g);
            let mut rest = m.clone();
            rest.0.remove(g);
            let entry = out.entry(e).or_default();
            entry.terms.insert(rest, c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, g: &Expr) -> Self {
        self.coefficients_in(g).pop_last().map(|(_, c)| c).unwrap_or_default()
    }

    /// Greatest common divisor of the coefficients with respect to `g`.
    fn content_in(&self, g: &Expr) -> Self {
        let coeffs = self.coefficients_in(g);
        if coeffs.values().any(Self::is_constant) {
            return Self::one();
        }
        let mut acc = Self::zero();
        for c in coeffs.values() {
            acc = gcd(&acc, c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn primitive_in(&self, g: &Expr) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let content = self.content_in(g);
        self.exact_div(&content).expect("content divides").normalized()
    }

    /// Pseudo-remainder of `self` by `divisor` as polynomials in `g`.
    fn pseudo_remainder(&self, divisor: &Self, g: &Expr) -> Self {
        let dg = divisor.degree_in(g);
        let lc = divisor.leading_coefficient_in(g);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(g) >= dg {
            let dr = r.degree_in(g);
            let lr = r.leading_coefficient_in(g);
            let shift = Monomial::generator(g.clone(), dr - dg);
            r = &(&r * &lc) - &(&lr * divisor).mul_monomial(&shift);
        }
        r
    }

    pub fn to_expr(&self) -> Expr {
        Expr::Sum(
            self.terms
                .iter()
                .map(|(m, c)| Expr::Product(vec![Expr::Const(c.clone()), m.to_expr()]))
                .collect(),
        )
    }

    pub fn to_normalized_expr(&self) -> Expr {
        normalize(&self.to_expr()).expect("polynomial expressions normalize")
    }
}

/// Monic-style greatest common divisor: rational content 1 and positive
/// leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &DiffPolynomial, b: &DiffPolynomial) -> DiffPolynomial {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    if a.is_constant() || b.is_constant() {
        return DiffPolynomial::one();
    }
    if a.is_monomial() || b.is_monomial() {
        let m = a.monomial_content().gcd(&b.monomial_content());
        return DiffPolynomial::term(m, Rational::one());
    }
    let (ga, gb) = (a.generators(), b.generators());
    // A generator missing from one side can only enter the gcd through the
    // content of the other side with respect to it.
    if let Some(v) = ga.difference(&gb).next() {
        return gcd(&a.content_in(v), b);
    }
    if let Some(v) = gb.difference(&ga).next() {
        return gcd(a, &b.content_in(v));
    }
    let v = ga
        .into_iter()
        .min_by_key(|g| (a.degree_in(g).max(b.degree_in(g)), a.degree_in(g) + b.degree_in(g)))
        .expect("non-constant");
    let ca = a.content_in(&v);
    let cb = b.content_in(&v);
    let content = gcd(&ca, &cb);
    let pa = a.exact_div(&ca).expect("content divides");
    let pb = b.exact_div(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(&v) >= pb.degree_in(&v) { (pa, pb) } else { (pb, pa) };
    let primitive = loop {
        if g.is_zero() {
            break f.primitive_in(&v);
        }
        if g.degree_in(&v) == 0 {
            break DiffPolynomial::one();
        }
        let r = f.pseudo_remainder(&g, &v);
        f = g;
        g = r.primitive_in(&v);
    };
    (&content * &primitive).normalized()
}

impl Add for &DiffPolynomial {
    type Output = DiffPolynomial;

    fn add(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let entry = terms.entry(m.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(m);
            }
        }
        DiffPolynomial { terms }
    }
}

impl Sub for &DiffPolynomial {
    type Output = DiffPolynomial;

    fn sub(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &DiffPolynomial {
    type Output = DiffPolynomial;

    fn neg(self) -> DiffPolynomial {
        DiffPolynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &DiffPolynomial {
    type Output = DiffPolynomial;

    fn mul(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *terms.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        DiffPolynomial { terms }
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::format_plain(&self.to_normalized_expr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::integer;

    fn g(name: &str) -> DiffPolynomial {
        DiffPolynomial::generator(Expr::var(name))
    }

    fn c(n: i64) -> DiffPolynomial {
        DiffPolynomial::constant(integer(n))
    }

    #[test]
    fn arithmetic() {
        let x = g("x");
        let y = g("y");
        let sq = &(&x + &y) * &(&x - &y);
        assert_eq!(sq, &(&x * &x) - &(&y * &y));
        assert_eq!((&x + &y).pow(3).len(), 4);
        assert!((&x - &x).is_zero());
    }

    #[test]
    fn exact_division() {
        let x = g("x");
        let y = g("y");
        let a = &(&x * &x) - &c(1);
        let b = &x - &c(1);
        assert_eq!(a.exact_div(&b), Some(&x + &c(1)));
        assert_eq!(a.exact_div(&(&x + &y)), None);
    }

    #[test]
    fn gcd_finds_shared_factors() {
        let x = g("x");
        let y = g("y");
        let dx = DiffPolynomial::generator(Expr::diff_atom("x", 1));
        let shared = &(&x * &dx) - &(&y * &y);
        let a = &shared * &(&x + &c(2));
        let b = &(&shared * &shared) * &(&y - &c(3));
        assert_eq!(gcd(&a, &b), shared.normalized());
        assert!(gcd(&(&x + &c(1)), &(&x + &c(2))).is_one());
        assert_eq!(gcd(&(&x * &y).scale(&integer(6)), &(&x * &x).scale(&integer(4))), x);
    }

    #[test]
    fn normalization() {
        let x = g("x");
        let p = (&x - &c(2)).scale(&Rational::new((-3).into(), 4.into()));
        assert_eq!(p.normalized(), &x - &c(2));
        assert_eq!(p.rational_content(), Rational::new(3.into(), 4.into()));
    }
}
