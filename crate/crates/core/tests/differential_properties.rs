use leibniz::differential::substitute_curve;
use leibniz::jet::{eval_jet, Parametrization};
use leibniz::{differentiate, normalize, Expr};
use proptest::prelude::*;

mod common;
use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn linearity(u in arb_canonical(), v in arb_canonical(), a in arb_rational(), b in arb_rational()) {
        let combo = Expr::Sum(vec![
            Expr::Product(vec![Expr::Const(a.clone()), u.clone()]),
            Expr::Product(vec![Expr::Const(b.clone()), v.clone()]),
        ]);
        let lhs = differentiate(&combo).unwrap();
        let rhs = normalize(&Expr::Sum(vec![
            Expr::Product(vec![Expr::Const(a), differentiate(&u).unwrap()]),
            Expr::Product(vec![Expr::Const(b), differentiate(&v).unwrap()]),
        ])).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_rule(u in arb_canonical(), v in arb_canonical()) {
        let lhs = differentiate(&Expr::Product(vec![u.clone(), v.clone()])).unwrap();
        let rhs = normalize(&Expr::Sum(vec![
            Expr::Product(vec![u.clone(), differentiate(&v).unwrap()]),
            Expr::Product(vec![v, differentiate(&u).unwrap()]),
        ])).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutes_with_renaming(e in arb_canonical(), s in arb_symbol()) {
        let fresh = Expr::var("r");
        let renamed_first = differentiate(&substitute_curve(&e, &s, &fresh).unwrap()).unwrap();
        let renamed_after = substitute_curve(&differentiate(&e).unwrap(), &s, &fresh).unwrap();
        prop_assert_eq!(renamed_first, renamed_after);
    }

    #[test]
    fn numeric_soundness(
        e in arb_canonical(),
        curves in prop::collection::vec(arb_upoly("t", 3), NAMES.len()),
        t0 in -1.5f64..1.5,
        dt in 0.5f64..2.0,
    ) {
        let mut p = Parametrization::new(sym("t"), t0).with_dt(dt).with_order(1);
        for (name, c) in NAMES.iter().zip(curves) {
            if *name != "t" {
                p = p.bind(sym(name), c).unwrap();
            }
        }
        let (Ok(value), Ok(Ok(diff))) = (eval_jet(&e, &p), differentiate(&e).map(|d| eval_jet(&d, &p))) else {
            return Ok(());
        };
        let expected = value.derivative_value(1) * dt;
        let got = diff.value();
        prop_assume!(expected.is_finite() && got.is_finite() && expected.abs() < 1e8);
        let scale = expected.abs().max(got.abs()).max(1.0);
        prop_assert!((got - expected).abs() <= 1e-8 * scale, "{} vs {} for {}", got, expected, e);
    }
}
