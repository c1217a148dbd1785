use num_traits::Zero;
use leibniz::expansion::ProgressionReduce;
use leibniz::jet::{eval_diff_expr, Parametrization};
use leibniz::rational::{DiffPolynomial, DiffRational};
use leibniz::{
    arbogast_expand, differentiate, invert_second_derivative, normalize, parse, reduce_with_progression, reinflate_second,
    DiffAtom, Expr, Progression,
};
use proptest::prelude::*;

mod common;
use common::*;

fn atom(name: &str, k: u32) -> DiffRational {
    DiffRational::from_poly(DiffPolynomial::generator(Expr::Atom(DiffAtom::new(sym(name), k).unwrap())))
}

#[test]
fn recurrence_consistency() {
    let dx = atom("x", 1);
    for n in 1..=4 {
        let current = arbogast_expand(&sym("y"), &sym("x"), n).unwrap();
        let next = arbogast_expand(&sym("y"), &sym("x"), n + 1).unwrap();
        let by_hand = DiffRational::from_expr(&differentiate(&current.to_expr()).unwrap()).unwrap();
        assert_eq!(next.expansion, by_hand.checked_div(&dx).unwrap(), "n = {n}");
    }
}

#[test]
fn progression_gives_modern_notation() {
    let x = Progression::new(sym("x"));
    for n in 1..=4 {
        let form = arbogast_expand(&sym("y"), &sym("x"), n).unwrap();
        let modern = atom("y", n).checked_div(&atom("x", 1).powi(i64::from(n)).unwrap()).unwrap();
        assert_eq!(reduce_with_progression(&form.expansion, &x).unwrap(), modern, "n = {n}");
    }
}

#[test]
fn inversion_matches_swapped_expansion() {
    let (x, y) = (sym("x"), sym("y"));
    let d2 = arbogast_expand(&y, &x, 2).unwrap().expansion;
    let d1 = arbogast_expand(&y, &x, 1).unwrap().expansion;
    assert_eq!(invert_second_derivative(&d2, &d1).unwrap(), arbogast_expand(&x, &y, 2).unwrap().expansion);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inversion_is_an_involution(y_of_x in arb_upoly("x", 4)) {
        let ddx = |e: &Expr| leibniz::expansion::ordinary_derivative(e, &sym("x")).unwrap();
        let y = y_of_x.to_expr();
        let d1 = DiffRational::from_expr(&ddx(&y)).unwrap();
        prop_assume!(!d1.is_zero());
        let d2 = DiffRational::from_expr(&ddx(&ddx(&y))).unwrap();
        let x_second = invert_second_derivative(&d2, &d1).unwrap();
        let x_first = d1.recip().unwrap();
        prop_assert_eq!(invert_second_derivative(&x_second, &x_first).unwrap(), d2);
    }

    #[test]
    fn reinflation_round_trips(c in arb_rational(), rest in arb_poly_expr()) {
        prop_assume!(!c.is_zero());
        let x = Progression::new(sym("x"));
        let rest = reduce_with_progression(&normalize(&rest).unwrap(), &x).unwrap();
        let e = normalize(&Expr::Sum(vec![
            Expr::Product(vec![Expr::Const(c), parse("d^2y/dx^2").unwrap()]),
            rest,
        ])).unwrap();
        let inflated = reinflate_second(&e, &sym("y"), &sym("x")).unwrap();
        prop_assert_eq!(inflated.reduce_with(&x).unwrap(), e);
    }

    #[test]
    fn homogeneous_ratios_ignore_dt(
        n in 1u32..=4,
        xc in arb_upoly("t", 4),
        yc in arb_upoly("t", 4),
        t0 in -1.5f64..1.5,
    ) {
        prop_assume!(xc.derivative().eval_f64(t0).abs() > 1e-2);
        let form = arbogast_expand(&sym("y"), &sym("x"), n).unwrap();
        let value = |dt: f64| {
            let p = Parametrization::new(sym("t"), t0)
                .with_dt(dt)
                .bind(sym("x"), xc.clone()).unwrap()
                .bind(sym("y"), yc.clone()).unwrap();
            eval_diff_expr(&form, &p).unwrap()
        };
        let base = value(1.0);
        for dt in [0.5, 2.0] {
            let v = value(dt);
            prop_assert!((v - base).abs() <= 1e-9 * base.abs().max(1.0), "dt {}: {} vs {}", dt, v, base);
        }
    }
}
