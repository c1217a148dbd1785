//! Strategies for property-based testing.
#![allow(dead_code)]

use leibniz::expr::rational;
use leibniz::rational::DiffRational;
use leibniz::upoly::UnivariatePoly;
use leibniz::{normalize, DiffAtom, Expr, Func, Rational, Symbol};
use proptest::prelude::*;

pub const NAMES: [&str; 5] = ["x", "y", "z", "t", "alpha"];

pub fn sym(name: &str) -> Symbol {
    Symbol::new(name).unwrap()
}

pub fn arb_symbol() -> impl Strategy<Value = Symbol> {
    proptest::sample::select(NAMES.to_vec()).prop_map(sym)
}

pub fn arb_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rational(n, d))
}

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        arb_rational().prop_map(Expr::Const),
        arb_symbol().prop_map(Expr::Sym),
        (arb_symbol(), 1u32..=3).prop_map(|(s, k)| Expr::Atom(DiffAtom::new(s, k).unwrap())),
    ]
}

fn arb_exponent() -> impl Strategy<Value = Rational> {
    proptest::sample::select(vec![(-2, 1), (-1, 1), (2, 1), (3, 1), (1, 2), (-1, 3)])
        .prop_map(|(n, d)| rational(n, d))
}

fn arb_func() -> impl Strategy<Value = Func> {
    proptest::sample::select(Func::ALL.to_vec())
}

/// Raw, unnormalized trees.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Product),
            (inner.clone(), arb_exponent()).prop_map(|(b, r)| Expr::Pow(Box::new(b), r)),
            (arb_func(), inner).prop_map(|(f, a)| Expr::Func(f, Box::new(a))),
        ]
    })
}

/// Normalized trees; inputs hitting a domain error are skipped.
pub fn arb_canonical() -> impl Strategy<Value = Expr> {
    arb_expr().prop_filter_map("domain error", |e| normalize(&e).ok())
}

/// Polynomials in symbols and atoms with small integer powers.
pub fn arb_poly_expr() -> impl Strategy<Value = Expr> {
    let monomial = (arb_rational(), prop::collection::vec((arb_leaf(), 1i64..=2), 0..=3)).prop_map(|(c, fs)| {
        let mut factors = vec![Expr::Const(c)];
        factors.extend(fs.into_iter().map(|(f, k)| f.powi(k)));
        Expr::Product(factors)
    });
    prop::collection::vec(monomial, 1..=3).prop_map(Expr::Sum)
}

pub fn arb_diff_rational() -> impl Strategy<Value = DiffRational> {
    (arb_poly_expr(), arb_poly_expr()).prop_filter_map("zero denominator", |(n, d)| {
        let num = DiffRational::from_expr(&n).ok()?;
        let den = DiffRational::from_expr(&d).ok()?;
        num.checked_div(&den).ok()
    })
}

pub fn arb_upoly(var: &'static str, max_degree: usize) -> impl Strategy<Value = UnivariatePoly> {
    prop::collection::vec(arb_rational(), 1..=max_degree + 1).prop_map(move |cs| UnivariatePoly::new(sym(var), cs))
}
