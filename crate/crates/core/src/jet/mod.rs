//! Truncated Taylor arithmetic and numeric evaluation of differential
//! expressions along polynomial curves.

mod oracle;

pub use oracle::{
    check_identity, eval_diff_expr, eval_jet, expansion_oracle_check, finite_difference_oracle, quotient_derivative_oracle,
    Counterexample, Evaluable, IdentityReport, OracleError, Parametrization, ParametrizationView, DEFAULT_TOLERANCE,
};

/// Taylor coefficients `f^(k)(t0) / k!` for `k = 0..=order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("jet orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{0}")]
    Domain(String),
}

type JetResult = Result<Jet, JetError>;

impl Jet {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least a value");
        Self { coeffs }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The parameter itself around `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Self::constant(t0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `k`-th derivative at `t0`.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs.get(k).map_or(0.0, |c| c * fact)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    fn check(&self, other: &Jet) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> JetResult {
        self.check(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Jet) -> JetResult {
        self.check(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: f64) -> Jet {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, other: &Jet) -> JetResult {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Jet) -> JetResult {
        self.check(other)?;
        let b0 = other.value();
        if b0 == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let mut q: Vec<f64> = Vec::with_capacity(self.coeffs.len());
        for k in 0..self.coeffs.len() {
            let s: f64 = (0..k).map(|j| q[j] * other.coeffs[k - j]).sum();
            q.push((self.coeffs[k] - s) / b0);
        }
        Ok(Self { coeffs: q })
    }

    pub fn recip(&self) -> JetResult {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn powi(&self, n: i64) -> JetResult {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    /// Real power `self^(p/q)`; negative values need an odd `q`.
    pub fn pow_rational(&self, p: i64, q: i64) -> JetResult {
        if q == 1 {
            return self.powi(p);
        }
        let a0 = self.value();
        if a0 == 0.0 {
            return Err(if p < 0 {
                JetError::DivisionByZero
            } else {
                JetError::Domain("fractional power is not smooth at zero".to_string())
            });
        }
        let r = p as f64 / q as f64;
        let head = if a0 > 0.0 {
            a0.powf(r)
        } else if q % 2 != 0 {
            let mag = (-a0).powf(r);
            if p % 2 == 0 { mag } else { -mag }
        } else {
            return Err(JetError::Domain(format!("even root of negative value {a0}")));
        };
        let mut out = vec![head];
        for k in 1..self.coeffs.len() {
            let s: f64 = (1..=k)
                .map(|j| (r * j as f64 - (k - j) as f64) * self.coeffs[j] * out[k - j])
                .sum();
            out.push(s / (k as f64 * a0));
        }
        Ok(Self { coeffs: out })
    }

    pub fn exp(&self) -> Jet {
        let mut out = vec![self.value().exp()];
        for k in 1..self.coeffs.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * out[k - j]).sum();
            out.push(s / k as f64);
        }
        Self { coeffs: out }
    }

    pub fn ln(&self) -> JetResult {
        let a0 = self.value();
        if a0 <= 0.0 {
            return Err(JetError::Domain(format!("ln of non-positive value {a0}")));
        }
        let mut out = vec![a0.ln()];
        for k in 1..self.coeffs.len() {
            let s: f64 = (1..k).map(|j| j as f64 * out[j] * self.coeffs[k - j]).sum();
            out.push((self.coeffs[k] - s / k as f64) / a0);
        }
        Ok(Self { coeffs: out })
    }

    /// `(sin, cos)` of the jet.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let mut s = vec![self.value().sin()];
        let mut c = vec![self.value().cos()];
        for k in 1..self.coeffs.len() {
            let mut sk = 0.0;
            let mut ck = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.coeffs[j];
                sk += w * c[k - j];
                ck -= w * s[k - j];
            }
            s.push(sk / k as f64);
            c.push(ck / k as f64);
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }

    /// Derivative in the parameter; the order drops by one.
    pub fn derivative(&self) -> JetResult {
        if self.order() == 0 {
            return Err(JetError::Domain("derivative of an order-0 jet".to_string()));
        }
        Ok(Self { coeffs: (1..self.coeffs.len()).map(|k| k as f64 * self.coeffs[k]).collect() })
    }
}
