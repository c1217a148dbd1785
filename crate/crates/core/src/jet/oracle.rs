use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Jet, JetError};
use crate::expansion::{arbogast_expand, ExpansionError};
use crate::expr::{base_symbols, Expr, Func, Rational, Symbol};
use crate::rational::DiffRational;
use crate::upoly::{UnivariatePoly, UpolyError};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Samples whose denominators (or `x'(t0)`) fall below this magnitude are
/// redrawn: they are too close to a singularity for a relative comparison.
const CONDITIONING_FLOOR: f64 = 1e-3;

const MAX_RESAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("denominator vanishes at t0 = {t0}")]
    DenominatorVanishes { t0: f64 },
    #[error("symbol `{0}` is not bound by the parametrization")]
    UnboundSymbol(String),
    #[error("x'(t0) = 0 at t0 = {t0}")]
    StationaryParametrization { t0: f64 },
    #[error("trial {trial}: {attempts} samples in a row hit singularities")]
    InconclusiveSampling { trial: usize, attempts: usize },
    #[error("invalid parametrization `{0}`")]
    BadParametrization(String),
    #[error("unresolved differential `{0}`")]
    PendingDifferential(String),
    #[error(transparent)]
    Jet(JetError),
    #[error(transparent)]
    Poly(#[from] UpolyError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

type Result<T, E = OracleError> = std::result::Result<T, E>;

/// Polynomial curves in a parameter, with the point and differential step
/// at which expressions are evaluated.
///
/// `d^k s` evaluates to `s^(k)(t0) dt^k`. An unbound parameter symbol
/// stands for itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    parameter: Symbol,
    bindings: BTreeMap<Symbol, UnivariatePoly>,
    t0: f64,
    dt: f64,
    order: Option<usize>,
}

impl Parametrization {
    pub fn new(parameter: Symbol, t0: f64) -> Self {
        Self { parameter, bindings: BTreeMap::new(), t0, dt: 1.0, order: None }
    }

    /// Parses `x=t^2,y=t^6` with parameter `t`.
    pub fn parse(spec: &str, t0: f64) -> Result<Self> {
        let t = Symbol::new("t").expect("valid symbol");
        let mut p = Self::new(t.clone(), t0);
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, poly) = part.split_once('=').ok_or_else(|| OracleError::BadParametrization(part.to_string()))?;
            let s = Symbol::new(name.trim()).map_err(|_| OracleError::BadParametrization(part.to_string()))?;
            p = p.bind(s, UnivariatePoly::parse(poly.trim(), &t)?)?;
        }
        Ok(p)
    }

    pub fn bind(mut self, symbol: Symbol, curve: UnivariatePoly) -> Result<Self> {
        if curve.var() != &self.parameter && !curve.is_zero() && curve.degree() != Some(0) {
            return Err(OracleError::BadParametrization(format!("{symbol} = {curve}")));
        }
        let curve = UnivariatePoly::new(self.parameter.clone(), curve.coefficients().to_vec());
        self.bindings.insert(symbol, curve);
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    /// Fixes the jet order used during evaluation.
    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }

    pub fn parameter(&self) -> &Symbol {
        &self.parameter
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn curve(&self, s: &Symbol) -> Option<&UnivariatePoly> {
        self.bindings.get(s)
    }

    fn curve_of(&self, s: &Symbol) -> Result<Cow<'_, UnivariatePoly>> {
        match self.bindings.get(s) {
            Some(c) => Ok(Cow::Borrowed(c)),
            None if s == &self.parameter => Ok(Cow::Owned(UnivariatePoly::identity(s.clone()))),
            None => Err(OracleError::UnboundSymbol(s.to_string())),
        }
    }

    pub fn view(&self) -> ParametrizationView {
        ParametrizationView {
            parameter: self.parameter.to_string(),
            bindings: self.bindings.iter().map(|(s, c)| (s.to_string(), c.to_string())).collect(),
            t0: self.t0,
            dt: self.dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParametrizationView {
    pub parameter: String,
    pub bindings: BTreeMap<String, String>,
    pub t0: f64,
    pub dt: f64,
}

struct Evaluator<'a> {
    p: &'a Parametrization,
    order: usize,
    min_den: f64,
}

impl Evaluator<'_> {
    fn map_jet(&self, e: JetError) -> OracleError {
        match e {
            JetError::DivisionByZero => OracleError::DenominatorVanishes { t0: self.p.t0 },
            other => OracleError::Jet(other),
        }
    }

    fn denominator(&mut self, j: &Jet) -> Result<()> {
        self.min_den = self.min_den.min(j.value().abs());
        if j.value() == 0.0 {
            return Err(OracleError::DenominatorVanishes { t0: self.p.t0 });
        }
        Ok(())
    }

    fn jet(&mut self, e: &Expr) -> Result<Jet> {
        let k = self.order;
        Ok(match e {
            Expr::Const(c) => Jet::constant(c.to_f64().unwrap_or(f64::NAN), k),
            Expr::Sym(s) => Jet::new(self.p.curve_of(s)?.taylor_at(self.p.t0, k)),
            Expr::Atom(a) => {
                let mut curve = self.p.curve_of(a.base())?.into_owned();
                for _ in 0..a.order() {
                    curve = curve.derivative();
                }
                Jet::new(curve.taylor_at(self.p.t0, k)).scale(self.p.dt.powi(a.order() as i32))
            }
            Expr::Sum(xs) => {
                let mut acc = Jet::constant(0.0, k);
                for x in xs {
                    acc = acc.add(&self.jet(x)?).map_err(|e| self.map_jet(e))?;
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = Jet::constant(1.0, k);
                for x in xs {
                    acc = acc.mul(&self.jet(x)?).map_err(|e| self.map_jet(e))?;
                }
                acc
            }
            Expr::Pow(b, r) => {
                let base = self.jet(b)?;
                if r < &Rational::zero() {
                    self.denominator(&base)?;
                }
                let (p, q) = (r.numer().to_i64(), r.denom().to_i64());
                let (Some(p), Some(q)) = (p, q) else {
                    return Err(OracleError::Jet(JetError::Domain(format!("exponent {r} out of range"))));
                };
                base.pow_rational(p, q).map_err(|e| self.map_jet(e))?
            }
            Expr::Func(f, arg) => {
                let a = self.jet(arg)?;
                match f {
                    Func::Sin => a.sin_cos().0,
                    Func::Cos => a.sin_cos().1,
                    Func::Exp => a.exp(),
                    Func::Ln => a.ln().map_err(|e| self.map_jet(e))?,
                }
            }
            Expr::Pending(_) => return Err(OracleError::PendingDifferential(e.to_string())),
        })
    }
}

/// Anything that evaluates to a number along a [`Parametrization`].
pub trait Evaluable {
    fn symbols(&self) -> BTreeSet<Symbol>;

    fn describe(&self) -> String;

    /// Value together with the smallest denominator magnitude met.
    fn eval_tracked(&self, p: &Parametrization) -> Result<(f64, f64)>;
}

impl Evaluable for Expr {
    fn symbols(&self) -> BTreeSet<Symbol> {
        base_symbols(self)
    }

    fn describe(&self) -> String {
        self.to_string()
    }

    fn eval_tracked(&self, p: &Parametrization) -> Result<(f64, f64)> {
        let mut ev = Evaluator { p, order: p.order.unwrap_or(0), min_den: f64::INFINITY };
        let v = ev.jet(self)?.value();
        Ok((v, ev.min_den))
    }
}

impl Evaluable for DiffRational {
    fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = base_symbols(&self.numerator().to_expr());
        out.extend(base_symbols(&self.denominator().to_expr()));
        out
    }

    fn describe(&self) -> String {
        self.to_string()
    }

    fn eval_tracked(&self, p: &Parametrization) -> Result<(f64, f64)> {
        let (num, a) = self.numerator().to_expr().eval_tracked(p)?;
        let (den, b) = self.denominator().to_expr().eval_tracked(p)?;
        if den == 0.0 {
            return Err(OracleError::DenominatorVanishes { t0: p.t0 });
        }
        Ok((num / den, a.min(b).min(den.abs())))
    }
}

impl Evaluable for crate::expansion::DerivativeForm {
    fn symbols(&self) -> BTreeSet<Symbol> {
        self.expansion.symbols()
    }

    fn describe(&self) -> String {
        self.expansion.describe()
    }

    fn eval_tracked(&self, p: &Parametrization) -> Result<(f64, f64)> {
        self.expansion.eval_tracked(p)
    }
}

pub fn eval_diff_expr<E: Evaluable + ?Sized>(e: &E, p: &Parametrization) -> Result<f64> {
    Ok(e.eval_tracked(p)?.0)
}

/// Full jet of an expression, of order `p`'s fixed order (default 4).
pub fn eval_jet(e: &Expr, p: &Parametrization) -> Result<Jet> {
    let mut ev = Evaluator { p, order: p.order.unwrap_or(4), min_den: f64::INFINITY };
    ev.jet(e)
}

/// `D_x^n y` along the curve from `g_1 = y'/x'`, `g_(k+1) = g_k'/x'`.
pub fn quotient_derivative_oracle(y: &UnivariatePoly, x: &UnivariatePoly, n: u32, t0: f64) -> Result<f64> {
    let k = n as usize + 1;
    let xp = Jet::new(x.derivative().taylor_at(t0, k - 1));
    if xp.value() == 0.0 {
        return Err(OracleError::StationaryParametrization { t0 });
    }
    if n == 0 {
        return Ok(y.eval_f64(t0));
    }
    let jet_err = |e: JetError| match e {
        JetError::DivisionByZero => OracleError::StationaryParametrization { t0 },
        other => OracleError::Jet(other),
    };
    let mut g = Jet::new(y.derivative().taylor_at(t0, k - 1)).div(&xp).map_err(jet_err)?;
    for _ in 1..n {
        let dg = g.derivative().map_err(jet_err)?;
        g = dg.div(&xp.truncate(dg.order())).map_err(jet_err)?;
    }
    Ok(g.value())
}

/// Same quantity as [`quotient_derivative_oracle`] by nested central
/// differences with step `h`.
pub fn finite_difference_oracle(y: &UnivariatePoly, x: &UnivariatePoly, n: u32, t0: f64, h: f64) -> Result<f64> {
    let yp = y.derivative();
    let xp = x.derivative();
    if xp.eval_f64(t0) == 0.0 {
        return Err(OracleError::StationaryParametrization { t0 });
    }
    fn g(k: u32, t: f64, h: f64, yp: &UnivariatePoly, xp: &UnivariatePoly) -> f64 {
        if k == 1 {
            return yp.eval_f64(t) / xp.eval_f64(t);
        }
        let slope = (g(k - 1, t + h, h, yp, xp) - g(k - 1, t - h, h, yp, xp)) / (2.0 * h);
        slope / xp.eval_f64(t)
    }
    Ok(g(n.max(1), t0, h, &yp, &xp))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counterexample {
    pub parametrization: ParametrizationView,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityReport {
    pub identity: String,
    pub trials: usize,
    pub max_rel_err: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= DEFAULT_TOLERANCE
    }
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

fn random_curve(rng: &mut ChaCha8Rng, var: &Symbol) -> UnivariatePoly {
    let degree = rng.random_range(1..=5usize);
    let coeffs = (0..=degree).map(|_| Rational::new(rng.random_range(-24..=24i64).into(), 8.into())).collect();
    UnivariatePoly::new(var.clone(), coeffs)
}

fn random_t0(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-2.0..=2.0)
}

fn fresh_parameter(used: &BTreeSet<Symbol>) -> Symbol {
    ["t", "s", "u", "v", "w", "tau"]
        .into_iter()
        .map(|n| Symbol::new(n).expect("valid symbol"))
        .find(|s| !used.contains(s))
        .unwrap_or_else(|| Symbol::new("param").expect("valid symbol"))
}

struct Aggregate {
    identity: String,
    trials: usize,
    max_rel_err: f64,
    worst: Option<Counterexample>,
}

impl Aggregate {
    fn record(&mut self, p: &Parametrization, lhs: f64, rhs: f64) {
        let err = relative_error(lhs, rhs);
        if err > self.max_rel_err || err.is_nan() {
            self.max_rel_err = if err.is_nan() { f64::INFINITY } else { err };
            if self.max_rel_err > DEFAULT_TOLERANCE {
                self.worst = Some(Counterexample { parametrization: p.view(), lhs, rhs, rel_err: self.max_rel_err });
            }
        }
    }

    fn finish(self) -> IdentityReport {
        IdentityReport {
            identity: self.identity,
            trials: self.trials,
            max_rel_err: self.max_rel_err,
            counterexample: self.worst,
        }
    }
}

/// Compares both sides on `trials` seeded random polynomial curves for
/// every symbol (degree 1..=5, coefficients in eighths within [-3, 3],
/// `t0` in [-2, 2]), with `dt = 1`.
pub fn check_identity<L, R>(lhs: &L, rhs: &R, trials: usize, seed: u64) -> Result<IdentityReport>
where
    L: Evaluable + ?Sized,
    R: Evaluable + ?Sized,
{
    let mut symbols = lhs.symbols();
    symbols.extend(rhs.symbols());
    let parameter = fresh_parameter(&symbols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agg = Aggregate {
        identity: format!("{} = {}", lhs.describe(), rhs.describe()),
        trials,
        max_rel_err: 0.0,
        worst: None,
    };
    for trial in 0..trials {
        let mut attempt = 0;
        loop {
            if attempt == MAX_RESAMPLES {
                return Err(OracleError::InconclusiveSampling { trial, attempts: MAX_RESAMPLES });
            }
            attempt += 1;
            let mut p = Parametrization::new(parameter.clone(), random_t0(&mut rng));
            for s in &symbols {
                p = p.bind(s.clone(), random_curve(&mut rng, &parameter))?;
            }
            let (Ok((a, da)), Ok((b, db))) = (lhs.eval_tracked(&p), rhs.eval_tracked(&p)) else {
                continue;
            };
            if !a.is_finite() || !b.is_finite() || da.min(db) < CONDITIONING_FLOOR {
                continue;
            }
            agg.record(&p, a, b);
            break;
        }
    }
    Ok(agg.finish())
}

/// Jet evaluation of `D_x^n y` against [`quotient_derivative_oracle`] on
/// seeded random curves `x(t)`, `y(t)`.
pub fn expansion_oracle_check(n: u32, trials: usize, seed: u64) -> Result<IdentityReport> {
    let (x, y, t) = (
        Symbol::new("x").expect("valid symbol"),
        Symbol::new("y").expect("valid symbol"),
        Symbol::new("t").expect("valid symbol"),
    );
    let form = arbogast_expand(&y, &x, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agg = Aggregate {
        identity: format!("D_x^{n} y = {}", form.expansion),
        trials,
        max_rel_err: 0.0,
        worst: None,
    };
    for trial in 0..trials {
        let mut attempt = 0;
        loop {
            if attempt == MAX_RESAMPLES {
                return Err(OracleError::InconclusiveSampling { trial, attempts: MAX_RESAMPLES });
            }
            attempt += 1;
            let xc = random_curve(&mut rng, &t);
            let yc = random_curve(&mut rng, &t);
            let t0 = random_t0(&mut rng);
            if xc.derivative().eval_f64(t0).abs() < CONDITIONING_FLOOR {
                continue;
            }
            let p = Parametrization::new(t.clone(), t0).bind(x.clone(), xc.clone())?.bind(y.clone(), yc.clone())?;
            let (Ok(a), Ok(b)) = (eval_diff_expr(&form, &p), quotient_derivative_oracle(&yc, &xc, n, t0)) else {
                continue;
            };
            if !a.is_finite() || !b.is_finite() {
                continue;
            }
            agg.record(&p, a, b);
            break;
        }
    }
    Ok(agg.finish())
}
