//! Expression trees over symbols and differential atoms.
//!
//! An [`Expr`] is an immutable value. Trees built with the operator impls
//! (`+`, `*`, [`Expr::pow`], ...) are *raw*; [`crate::canon::normalize`]
//! turns any raw tree into its canonical form, and every public entry point
//! of the crate hands back canonical trees.
//!
//! # Node order
//!
//! Canonical products and map keys use the structural total order
//! implemented by `Ord for Expr`:
//!
//! 1. constants, by value;
//! 2. symbols and differential atoms, interleaved by base name and then by
//!    differential order (a symbol counts as order 0), so
//!    `x < dx < d^2x < y < dy`;
//! 3. powers, then products, sums, function applications and pending
//!    differentials, each compared child by child.
//!
//! Sums are *not* ordered by this relation; see [`crate::canon`] for the
//! term order used inside sums.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number used for coefficients and exponents.
pub type Rational = BigRational;

/// Builds an exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an exact integer rational.
pub fn integer(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("invalid symbol name `{0}`")]
    InvalidSymbol(String),
    #[error("differential order must be at least 1")]
    ZeroOrderAtom,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unevaluated differential d({0}) reached normalization")]
    PendingDifferential(String),
}

pub type Result<T, E = ExprError> = std::result::Result<T, E>;

/// A named variable. Comparison is by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Symbol(Arc<str>);

impl Symbol {
    /// Validates and interns a symbol name.
    ///
    /// Names are ASCII identifiers (`[A-Za-z][A-Za-z0-9_]*`). Names that the
    /// parser reads as differentials (`d`, `dx`, `d2x`) and the function
    /// names are rejected so that every symbol prints back unambiguously.
    pub fn new(name: &str) -> Result<Self> {
        if !is_valid_symbol_name(name) {
            return Err(ExprError::InvalidSymbol(name.to_string()));
        }
        Ok(Symbol(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True for names the parser accepts with the `dx` / `d^2x` shorthand.
    pub fn is_single_letter(&self) -> bool {
        self.0.len() == 1
    }
}

fn is_valid_symbol_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    if name == "d" || Func::from_name(name).is_some() {
        return false;
    }
    // `dx`, `d2x`, `d10y`: differential shorthand.
    if let Some(rest) = name.strip_prefix('d') {
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        let tail = &rest[digits..];
        if tail.len() == 1 && tail.chars().all(|c| c.is_ascii_alphabetic()) {
            return false;
        }
    }
    true
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Symbol {
    type Error = ExprError;
    fn try_from(value: String) -> Result<Self> {
        Symbol::new(&value)
    }
}

impl From<Symbol> for String {
    fn from(value: Symbol) -> Self {
        value.0.to_string()
    }
}

impl std::str::FromStr for Symbol {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self> {
        Symbol::new(s)
    }
}

/// The `order`-th differential of `base`: `dx`, `d^2x`, ...
///
/// Atoms are opaque: nothing but the differential operator raises their
/// order, and no rewrite looks inside them.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffAtom {
    base: Symbol,
    order: u32,
}

impl DiffAtom {
    pub fn new(base: Symbol, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(ExprError::ZeroOrderAtom);
        }
        Ok(DiffAtom { base, order })
    }

    pub fn base(&self) -> &Symbol {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The next differential, `d(self)`.
    pub fn raised(&self) -> DiffAtom {
        DiffAtom {
            base: self.base.clone(),
            order: self.order + 1,
        }
    }
}

impl PartialOrd for DiffAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiffAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base
            .cmp(&other.base)
            .then(self.order.cmp(&other.order))
    }
}

/// Elementary functions known to the engine.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub const ALL: [Func; 4] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `f'(u)` as a raw tree.
    pub fn derivative_at(self, arg: &Expr) -> Expr {
        match self {
            Func::Sin => Expr::Func(Func::Cos, Box::new(arg.clone())),
            Func::Cos => -Expr::Func(Func::Sin, Box::new(arg.clone())),
            Func::Exp => Expr::Func(Func::Exp, Box::new(arg.clone())),
            Func::Ln => arg.clone().pow(-Rational::one()),
        }
    }
}

/// Symbolic expression.
///
/// `Pending` is the parser's marker for `d(u)` applied to a composite `u`.
/// Only [`crate::differential::eliminate_pending`] consumes it;
/// normalization rejects it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Const(Rational),
    Sym(Symbol),
    Atom(DiffAtom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Func(Func, Box<Expr>),
    Pending(Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(integer(n))
    }

    pub fn constant(value: Rational) -> Expr {
        Expr::Const(value)
    }

    /// Symbol node for a literal name. Panics on an invalid name; use
    /// [`Symbol::new`] for untrusted input.
    pub fn var(name: &str) -> Expr {
        Expr::Sym(Symbol::new(name).expect("invalid symbol literal"))
    }

    /// `d^order(name)` for a literal name. Panics on invalid input.
    pub fn diff_atom(name: &str, order: u32) -> Expr {
        let base = Symbol::new(name).expect("invalid symbol literal");
        Expr::Atom(DiffAtom::new(base, order).expect("atom order must be >= 1"))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::Func(f, Box::new(arg))
    }

    /// Raw power node.
    pub fn pow(self, exponent: impl Into<Rational>) -> Expr {
        Expr::Pow(Box::new(self), exponent.into())
    }

    pub fn powi(self, exponent: i64) -> Expr {
        self.pow(integer(exponent))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Sym(_) | Expr::Atom(_) => 1,
            Expr::Pow(..) => 2,
            Expr::Product(_) => 3,
            Expr::Sum(_) => 4,
            Expr::Func(..) => 5,
            Expr::Pending(_) => 6,
        }
    }

    /// Base symbol and differential order of a symbol (order 0) or atom.
    fn variable_key(&self) -> Option<(&Symbol, u32)> {
        match self {
            Expr::Sym(s) => Some((s, 0)),
            Expr::Atom(a) => Some((&a.base, a.order)),
            _ => None,
        }
    }

    /// Splits a term into its rational coefficient and remaining factors.
    pub fn split_coefficient(&self) -> (Rational, Vec<Expr>) {
        match self {
            Expr::Const(c) => (c.clone(), Vec::new()),
            Expr::Product(fs) => match fs.split_first() {
                Some((Expr::Const(c), rest)) => (c.clone(), rest.to_vec()),
                _ => (Rational::one(), fs.clone()),
            },
            other => (Rational::one(), vec![other.clone()]),
        }
    }

    /// Splits a factor into `(base, exponent)`.
    pub fn as_power(&self) -> (&Expr, Rational) {
        match self {
            Expr::Pow(b, r) => (b, r.clone()),
            other => (other, Rational::one()),
        }
    }

    /// Children of a sum, or the expression itself as a single term.
    pub fn terms(&self) -> Vec<Expr> {
        match self {
            Expr::Sum(ts) => ts.clone(),
            Expr::Const(c) if c.is_zero() => Vec::new(),
            other => vec![other.clone()],
        }
    }

    /// Pre-order visit of every node.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.walk(visit)),
            Expr::Pow(b, _) | Expr::Func(_, b) | Expr::Pending(b) => b.walk(visit),
            Expr::Const(_) | Expr::Sym(_) | Expr::Atom(_) => {}
        }
    }

    pub fn contains_pending(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Pending(_)));
        found
    }

    /// Highest differential order among the atoms, 0 if there are none.
    pub fn max_atom_order(&self) -> u32 {
        let mut order = 0;
        self.walk(&mut |e| {
            if let Expr::Atom(a) = e {
                order = order.max(a.order);
            }
        });
        order
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        let by_rank = self.rank().cmp(&other.rank());
        if by_rank != Ordering::Equal {
            return by_rank;
        }
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::Sum(a), Expr::Sum(b)) | (Expr::Product(a), Expr::Product(b)) => a.cmp(b),
            (Expr::Pow(ba, ea), Expr::Pow(bb, eb)) => ba.cmp(bb).then_with(|| ea.cmp(eb)),
            (Expr::Func(fa, a), Expr::Func(fb, b)) => fa.cmp(fb).then_with(|| a.cmp(b)),
            (Expr::Pending(a), Expr::Pending(b)) => a.cmp(b),
            _ => {
                let (sa, oa) = self.variable_key().expect("rank 1 is a variable");
                let (sb, ob) = other.variable_key().expect("rank 1 is a variable");
                sa.cmp(sb).then(oa.cmp(&ob))
            }
        }
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Sym(s)
    }
}

impl From<DiffAtom> for Expr {
    fn from(a: DiffAtom) -> Self {
        Expr::Atom(a)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::Const(c)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs.recip()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Product(vec![Expr::int(-1), self])
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::format_plain(self))
    }
}

/// A substitution target: a symbol or one specific differential atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Target {
    Symbol(Symbol),
    Atom(DiffAtom),
}

impl From<Symbol> for Target {
    fn from(s: Symbol) -> Self {
        Target::Symbol(s)
    }
}

impl From<DiffAtom> for Target {
    fn from(a: DiffAtom) -> Self {
        Target::Atom(a)
    }
}

pub type Bindings = BTreeMap<Target, Expr>;

/// Simultaneous substitution followed by normalization.
///
/// Atoms are opaque: binding `x` leaves `dx` untouched.
pub fn substitute(e: &Expr, bindings: &Bindings) -> Result<Expr> {
    crate::canon::normalize(&replace(e, bindings))
}

fn replace(e: &Expr, bindings: &Bindings) -> Expr {
    match e {
        Expr::Sym(s) => bindings
            .get(&Target::Symbol(s.clone()))
            .cloned()
            .unwrap_or_else(|| e.clone()),
        Expr::Atom(a) => bindings
            .get(&Target::Atom(a.clone()))
            .cloned()
            .unwrap_or_else(|| e.clone()),
        Expr::Const(_) => e.clone(),
        Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| replace(x, bindings)).collect()),
        Expr::Product(xs) => Expr::Product(xs.iter().map(|x| replace(x, bindings)).collect()),
        Expr::Pow(b, r) => Expr::Pow(Box::new(replace(b, bindings)), r.clone()),
        Expr::Func(f, a) => Expr::Func(*f, Box::new(replace(a, bindings))),
        Expr::Pending(a) => Expr::Pending(Box::new(replace(a, bindings))),
    }
}

pub fn free_atoms(e: &Expr) -> BTreeSet<DiffAtom> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| {
        if let Expr::Atom(a) = n {
            out.insert(a.clone());
        }
    });
    out
}

/// Symbols occurring as plain symbols. Atom bases are not included.
pub fn free_symbols(e: &Expr) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| {
        if let Expr::Sym(s) = n {
            out.insert(s.clone());
        }
    });
    out
}

/// Every base symbol an expression depends on, through symbols or atoms.
pub fn base_symbols(e: &Expr) -> BTreeSet<Symbol> {
    let mut out = BTreeSet::new();
    e.walk(&mut |n| match n {
        Expr::Sym(s) => {
            out.insert(s.clone());
        }
        Expr::Atom(a) => {
            out.insert(a.base.clone());
        }
        _ => {}
    });
    out
}

/// Structural equality of canonical forms.
pub fn equals(a: &Expr, b: &Expr) -> Result<bool> {
    Ok(crate::canon::normalize(a)? == crate::canon::normalize(b)?)
}
