use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::{gcd, DiffPolynomial, Monomial};
use super::RationalError;
use crate::canon::normalize;
use crate::differential::differentiate;
use crate::expr::{Expr, Rational};

/// Reduced quotient of two differential polynomials.
///
/// The denominator has coprime integer coefficients and a positive
/// leading coefficient; numerator and denominator share no factor.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffRational {
    num: DiffPolynomial,
    den: DiffPolynomial,
}

impl DiffRational {
    pub fn new(num: DiffPolynomial, den: DiffPolynomial) -> Result<Self, RationalError> {
        Ok(Self::unreduced(num, den)?.reduce())
    }

    /// Keeps the pair exactly as given.
    pub fn unreduced(num: DiffPolynomial, den: DiffPolynomial) -> Result<Self, RationalError> {
        if den.is_zero() {
            return Err(RationalError::DivisionByZeroPolynomial);
        }
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self::from_poly(DiffPolynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(DiffPolynomial::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(DiffPolynomial::constant(c))
    }

    pub fn from_poly(p: DiffPolynomial) -> Self {
        Self { num: p, den: DiffPolynomial::one() }
    }

    pub fn numerator(&self) -> &DiffPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &DiffPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant().cloned().or_else(|| self.num.is_zero().then(Rational::zero))?;
        Some(n / self.den.as_constant()?)
    }

    /// Converts an expression whose non-polynomial parts are functions or
    /// fractional powers; those become opaque generators.
    pub fn from_expr(e: &Expr) -> Result<Self, RationalError> {
        if e.contains_pending() {
            return Err(RationalError::PendingDifferential(e.to_string()));
        }
        convert(&normalize(e)?)
    }

    pub fn to_expr(&self) -> Expr {
        let e = Expr::Product(vec![self.num.to_expr(), self.den.to_expr().recip()]);
        normalize(&e).expect("reduced quotients normalize")
    }

    pub fn reduce(&self) -> Self {
        if self.num.is_zero() {
            return Self::zero();
        }
        let common = self.num.monomial_content().gcd(&self.den.monomial_content());
        let mut num = self.num.div_monomial(&common).expect("common monomial divides");
        let mut den = self.den.div_monomial(&common).expect("common monomial divides");
        if !num.is_monomial() && !den.is_monomial() {
            let g = gcd(&num, &den);
            if !g.is_constant() {
                num = num.exact_div(&g).expect("gcd divides");
                den = den.exact_div(&g).expect("gcd divides");
            }
        }
        let (_, lead) = den.leading_term().expect("nonzero denominator");
        let mut scale = den.rational_content();
        if lead.is_negative() {
            scale = -scale;
        }
        let inv = scale.recip();
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    /// Cross-multiplication test, independent of reduction.
    pub fn is_equivalent(&self, other: &Self) -> bool {
        (&self.num * &other.den) == (&other.num * &self.den)
    }

    pub fn recip(&self) -> Result<Self, RationalError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RationalError> {
        if other.is_zero() {
            return Err(RationalError::DivisionByZeroPolynomial);
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn powi(&self, n: i64) -> Result<Self, RationalError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let k = u32::try_from(n.unsigned_abs()).map_err(|_| RationalError::ExponentTooLarge(n))?;
        Ok(Self { num: base.num.pow(k), den: base.den.pow(k) })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { num: self.num.scale(c), den: self.den.clone() }.reduce()
    }

    /// `d(num/den) = (den d(num) - num d(den)) / den^2`.
    pub fn differential(&self) -> Result<Self, RationalError> {
        let dn = poly_differential(&self.num)?;
        let dd = poly_differential(&self.den)?;
        let den = Self::from_poly(self.den.clone());
        let num = Self::from_poly(self.num.clone());
        let top = &(&den * &dn) - &(&num * &dd);
        top.checked_div(&(&den * &den))
    }
}

fn poly_differential(p: &DiffPolynomial) -> Result<DiffRational, RationalError> {
    if p.is_constant() {
        return Ok(DiffRational::zero());
    }
    convert(&differentiate(&p.to_expr())?)
}

fn convert(e: &Expr) -> Result<DiffRational, RationalError> {
    Ok(match e {
        Expr::Const(c) => DiffRational::constant(c.clone()),
        Expr::Sym(_) | Expr::Atom(_) | Expr::Func(..) => DiffRational::from_poly(DiffPolynomial::generator(e.clone())),
        Expr::Sum(xs) => {
            let mut acc = DiffRational::zero();
            for x in xs {
                acc = &acc + &convert(x)?;
            }
            acc
        }
        Expr::Product(xs) => {
            let mut acc = DiffRational::one();
            for x in xs {
                acc = &acc * &convert(x)?;
            }
            acc
        }
        Expr::Pow(b, r) => {
            let whole = r.floor();
            let frac = r - &whole;
            let whole = i64::try_from(whole.to_integer()).map_err(|_| RationalError::ExponentTooLarge(i64::MAX))?;
            let mut out = convert(b)?.powi(whole)?;
            if !frac.is_zero() {
                let g = DiffPolynomial::term(Monomial::generator(Expr::Pow(b.clone(), frac), 1), Rational::one());
                out = &out * &DiffRational::from_poly(g);
            }
            out
        }
        Expr::Pending(_) => return Err(RationalError::PendingDifferential(e.to_string())),
    })
}

impl Add for &DiffRational {
    type Output = DiffRational;

    fn add(self, rhs: &DiffRational) -> DiffRational {
        if self.den == rhs.den {
            return DiffRational { num: &self.num + &rhs.num, den: self.den.clone() }.reduce();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        DiffRational { num, den: &self.den * &rhs.den }.reduce()
    }
}

impl Sub for &DiffRational {
    type Output = DiffRational;

    fn sub(self, rhs: &DiffRational) -> DiffRational {
        self + &(-rhs)
    }
}

impl Neg for &DiffRational {
    type Output = DiffRational;

    fn neg(self) -> DiffRational {
        DiffRational { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &DiffRational {
    type Output = DiffRational;

    fn mul(self, rhs: &DiffRational) -> DiffRational {
        DiffRational { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.reduce()
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for DiffRational {
            type Output = DiffRational;

            fn $m(self, rhs: DiffRational) -> DiffRational {
                (&self).$m(&rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for DiffRational {
    type Output = DiffRational;

    fn neg(self) -> DiffRational {
        -&self
    }
}

impl From<Rational> for DiffRational {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for DiffRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::format_plain(&self.to_expr()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{integer, rational};
    use crate::parser::parse;

    fn r(s: &str) -> DiffRational {
        DiffRational::from_expr(&parse(s).unwrap()).unwrap()
    }

    fn p(s: &str) -> DiffPolynomial {
        let q = r(s);
        assert!(q.denominator().is_one(), "{s} is not a polynomial");
        q.numerator().clone()
    }

    #[test]
    fn conversions() {
        let q = r("dy/dx");
        assert_eq!((q.numerator(), q.denominator()), (&p("dy"), &p("dx")));
        let q = r("d^2y/dx^2 - dy/dx d^2x/dx^2");
        assert_eq!(q.numerator(), &p("dx d^2y - dy d^2x"));
        assert_eq!(q.denominator(), &p("dx^3"));
        assert_eq!(r("(x^2 - 1)/(x - 1)"), r("x + 1"));
        assert_eq!(r("(x^2 - 1)/(x - 1)").to_expr(), parse("x + 1").unwrap());
    }

    #[test]
    fn round_trip_for_laurent_monomial_denominators() {
        for s in ["d^2y/dx^2 - dy/dx d^2x/dx^2", "3x^2 dx", "-2/9/x^5", "sin(q)/dq + y^(3/2)", "0"] {
            let e = parse(s).unwrap();
            assert_eq!(DiffRational::from_expr(&e).unwrap().to_expr(), e, "{s}");
        }
    }

    #[test]
    fn field_operations() {
        assert_eq!(&r("dy/dx") * &r("dx/dt"), r("dy/dt"));
        assert_eq!(r("dx/dt").powi(2).unwrap(), r("dx^2/dt^2"));
        let q = r("(x + dy)/(y - 2)");
        assert!(q.checked_div(&q).unwrap().is_one());
        assert!((&q - &q).is_zero());
        assert!(matches!(q.checked_div(&DiffRational::zero()), Err(RationalError::DivisionByZeroPolynomial)));
        assert!(DiffRational::unreduced(p("x"), DiffPolynomial::zero()).is_err());
    }

    #[test]
    fn reduction() {
        let q = DiffRational::new(p("dx d^2y dx^2"), p("dx^3")).unwrap();
        assert_eq!((q.numerator(), q.denominator()), (&p("d^2y"), &DiffPolynomial::one()));
        let q = DiffRational::new(p("6x dx"), p("2dx")).unwrap();
        assert_eq!(q.numerator(), &p("3x"));
        let q = DiffRational::new(p("(dx d^2y - dy d^2x) dx"), p("dx^4")).unwrap();
        assert_eq!((q.numerator(), q.denominator()), (&p("dx d^2y - dy d^2x"), &p("dx^3")));
        let q = DiffRational::new(p("x"), p("-2y")).unwrap();
        assert_eq!((q.numerator(), q.denominator()), (&p("-1/2 x"), &p("y")));
        let q = DiffRational::new(p("(x dy - y^2)(x + 1)"), p("(x dy - y^2)^2 (y - 3)")).unwrap();
        assert_eq!(q, DiffRational::new(p("x + 1"), p("(x dy - y^2)(y - 3)")).unwrap());
    }

    #[test]
    fn differential_is_the_quotient_rule() {
        let d = r("dy/dx").differential().unwrap();
        assert_eq!(d, r("(dx d^2y - dy d^2x)/dx^2"));
        assert_eq!(r("x^(1/2)").differential().unwrap(), r("1/2 x^(-1/2) dx"));
        assert!(r("7").differential().unwrap().is_zero());
    }

    #[test]
    fn constants() {
        assert_eq!(r("4/6").as_constant(), Some(rational(2, 3)));
        assert_eq!(DiffRational::from(integer(5)).to_string(), "5");
        assert!(DiffRational::from_expr(&crate::parser::parse_with_differentials("d(x y)").unwrap()).is_err());
    }
}
