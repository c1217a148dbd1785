//! Polynomials in one named variable with exact rational coefficients.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use crate::canon::normalize;
use crate::expr::{Expr, Rational, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UpolyError {
    #[error("`{expr}` is not a polynomial in {var}")]
    NotPolynomial { var: String, expr: String },
    #[error(transparent)]
    Parse(#[from] crate::parser::ParseError),
    #[error(transparent)]
    Expr(#[from] crate::expr::ExprError),
}

/// Coefficients are stored lowest degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnivariatePoly {
    var: Symbol,
    coeffs: Vec<Rational>,
}

impl UnivariatePoly {
    pub fn new(var: Symbol, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn zero(var: Symbol) -> Self {
        Self::new(var, Vec::new())
    }

    /// The polynomial `var` itself.
    pub fn identity(var: Symbol) -> Self {
        Self::new(var, vec![Rational::zero(), Rational::one()])
    }

    pub fn var(&self) -> &Symbol {
        &self.var
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * at + c)
    }

    pub fn eval_f64(&self, at: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * at + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect();
        Self::new(self.var.clone(), coeffs)
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Self {
        let mut coeffs = vec![Rational::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer((k + 1).into()));
        }
        Self::new(self.var.clone(), coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.var.clone(), self.coeffs.iter().map(|c| -c).collect())
    }

    /// Taylor coefficients `p^(j)(t0) / j!` for `j = 0..=order`.
    pub fn taylor_at(&self, t0: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut binom = 1.0;
            let mut acc = 0.0;
            for i in j..self.coeffs.len() {
                if i > j {
                    binom = binom * i as f64 / (i - j) as f64;
                }
                acc += to_f64(&self.coeffs[i]) * binom * t0.powi((i - j) as i32);
            }
            *slot = acc;
        }
        out
    }

    pub fn from_expr(e: &Expr, var: &Symbol) -> Result<Self, UpolyError> {
        let not_poly = || UpolyError::NotPolynomial { var: var.to_string(), expr: e.to_string() };
        let n = normalize(e)?;
        let mut coeffs: Vec<Rational> = Vec::new();
        for term in n.terms() {
            let (c, factors) = term.split_coefficient();
            let k = match factors.as_slice() {
                [] => 0,
                [Expr::Sym(s)] if s == var => 1,
                [Expr::Pow(b, r)] if matches!(b.as_ref(), Expr::Sym(s) if s == var) && r.is_integer() => {
                    r.to_integer().to_usize().ok_or_else(not_poly)?
                }
                _ => return Err(not_poly()),
            };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] += c;
        }
        Ok(Self::new(var.clone(), coeffs))
    }

    pub fn parse(text: &str, var: &Symbol) -> Result<Self, UpolyError> {
        Self::from_expr(&crate::parser::parse(text)?, var)
    }

    pub fn to_expr(&self) -> Expr {
        let x = Expr::Sym(self.var.clone());
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Expr::Product(vec![Expr::Const(c.clone()), x.clone().powi(k as i64)]))
            .collect();
        normalize(&Expr::Sum(terms)).expect("polynomials normalize")
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{integer, rational};

    fn y() -> Symbol {
        Symbol::new("y").unwrap()
    }

    fn poly(s: &str) -> UnivariatePoly {
        UnivariatePoly::parse(s, &y()).unwrap()
    }

    #[test]
    fn integration() {
        assert_eq!(poly("y").integrate(), poly("y^2/2"));
        assert!(poly("0").integrate().is_zero());
        assert_eq!(poly("3y^2 + 1").integrate(), poly("y^3 + y"));
        assert_eq!(poly("y^3 + y").integrate().derivative(), poly("y^3 + y"));
    }

    #[test]
    fn evaluation() {
        let p = poly("2y^3 - y + 1/2");
        assert_eq!(p.eval(&integer(2)), rational(29, 2));
        assert_eq!(p.eval_f64(2.0), 14.5);
        assert_eq!(p.degree(), Some(3));
        let taylor = p.taylor_at(1.0, 4);
        assert_eq!(taylor, vec![1.5, 5.0, 6.0, 2.0, 0.0]);
    }

    #[test]
    fn rejects_other_variables() {
        assert!(matches!(UnivariatePoly::parse("q", &y()), Err(UpolyError::NotPolynomial { .. })));
        assert!(UnivariatePoly::parse("y^(1/2)", &y()).is_err());
        assert!(UnivariatePoly::parse("1/y", &y()).is_err());
        assert_eq!(poly("(y + 1)^2").coefficients(), &[integer(1), integer(2), integer(1)]);
    }
}
