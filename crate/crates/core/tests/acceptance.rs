//! One PASS/FAIL line per acceptance criterion.
//!
//! Criterion 8 cannot be met as stated: the exact solution for `f(y) = y`
//! from `y(0) = 1, y'(0) = 1` has a vertical tangent near `x = 0.3987`,
//! before the end of the required span. It is run verbatim and expected to
//! fail; a shorter span is reported alongside it for reference.

use std::io::Write;
use std::time::{Duration, Instant};

use leibniz::expansion::ProgressionReduce;
use leibniz::jet::expansion_oracle_check;
use leibniz::ode::{rk4_convergence_ratio, verify_numeric};
use leibniz::upoly::UnivariatePoly;
use leibniz::{
    arbogast_expand, format_plain, invert_second_derivative, normalize, parse, verify_dxdx_subtlety,
    verify_second_chain_rule, DiffRational, Expr, Progression, Symbol,
};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

mod common;

const KNOWN_UNATTAINABLE: &[u32] = &[8];

type Check = Result<(), String>;
type Criterion = (u32, fn() -> Check, Duration);

fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

fn q(s: &str) -> DiffRational {
    DiffRational::from_expr(&parse(s).unwrap()).unwrap()
}

/// Writes past the test harness's output capture.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond { Ok(()) } else { Err(msg()) }
}

fn criterion_1() -> Check {
    let got = arbogast_expand(&sym("y"), &sym("x"), 2).map_err(|e| e.to_string())?.expansion;
    ensure(got == q("d^2y/dx^2 - dy/dx d^2x/dx^2"), || format!("got {got}"))
}

fn criterion_2() -> Check {
    let got = arbogast_expand(&sym("y"), &sym("x"), 3).map_err(|e| e.to_string())?.expansion;
    let want = q("d^3y/dx^3 - dy/dx d^3x/dx^3 - 3 d^2x/dx^2 d^2y/dx^2 + 3 dy/dx (d^2x)^2/dx^4");
    ensure(got == want, || format!("got {got}"))
}

fn criterion_3() -> Check {
    let r = verify_second_chain_rule(&parse("x^3").unwrap(), &parse("t^2").unwrap()).map_err(|e| e.to_string())?;
    ensure(r.naive == parse("24t^4").unwrap(), || format!("naive {}", r.naive))?;
    ensure(r.direct == parse("30t^4").unwrap(), || format!("direct {}", r.direct))?;
    ensure(r.faa_di_bruno == parse("30t^4").unwrap(), || format!("Faa di Bruno {}", r.faa_di_bruno))?;
    ensure(r.identity_holds && r.identity_lhs == r.identity_rhs, || {
        format!("identity {} vs {}", r.identity_lhs, r.identity_rhs)
    })
}

fn criterion_4() -> Check {
    let got = invert_second_derivative(&q("6x"), &q("3x^2")).map_err(|e| e.to_string())?;
    ensure(got == q("-2/9 x^-5"), || format!("got {got}"))
}

fn criterion_5() -> Check {
    let r = verify_dxdx_subtlety().map_err(|e| e.to_string())?;
    ensure(r.full_form_is_zero(), || format!("full form {}", r.full_form))?;
    ensure(!r.bare_is_zero() && r.bare == q("d^2x/dx^2"), || format!("bare {}", r.bare))
}

fn criterion_6() -> Check {
    let (px, py) = (Progression::new(sym("x")), Progression::new(sym("y")));
    let second = arbogast_expand(&sym("y"), &sym("x"), 2).map_err(|e| e.to_string())?.expansion;
    let reduced = second.reduce_with(&px).map_err(|e| e.to_string())?;
    ensure(reduced == q("d^2y/dx^2"), || format!("progression x gave {reduced}"))?;
    let xy = parse("x d^2y + 2 dx dy + y d^2x").unwrap();
    let under_x = xy.reduce_with(&px).map_err(|e| e.to_string())?;
    ensure(under_x == parse("x d^2y + 2 dx dy").unwrap(), || format!("progression x gave {under_x}"))?;
    let under_y = xy.reduce_with(&py).map_err(|e| e.to_string())?;
    ensure(under_y == parse("2 dx dy + y d^2x").unwrap(), || format!("progression y gave {under_y}"))
}

fn criterion_7() -> Check {
    for n in 1..=4 {
        let r = expansion_oracle_check(n, 100, 2024 + u64::from(n)).map_err(|e| e.to_string())?;
        ensure(r.trials >= 100 && r.max_rel_err <= 1e-9, || {
            format!("n = {n}: max rel. err {:e}, counterexample {:?}", r.max_rel_err, r.counterexample)
        })?;
    }
    Ok(())
}

fn ode_check(span: f64) -> Check {
    let f = UnivariatePoly::parse("y", &sym("y")).unwrap();
    let r = verify_numeric(&f, 1.0, 1.0, 0.0, span, 1e-3).map_err(|e| e.to_string())?;
    ensure(r.max_residual_minus_branch <= 1e-6, || format!("derived branch residual {:e}", r.max_residual_minus_branch))?;
    ensure(r.max_residual_plus_branch >= 1e3 * r.max_residual_minus_branch, || {
        format!("opposite branch {:e} vs derived {:e}", r.max_residual_plus_branch, r.max_residual_minus_branch)
    })?;
    let ratio = rk4_convergence_ratio(&f, 1.0, 1.0, 0.0, span, 1e-3).map_err(|e| e.to_string())?;
    ensure((12.0..=20.0).contains(&ratio), || format!("step-halving ratio {ratio:.2}"))
}

fn criterion_8() -> Check {
    ode_check(0.5)
}

fn criterion_9() -> Check {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::from_seed(RngAlgorithm::ChaCha, &[9; 32]));
    let strategy = common::arb_expr();
    let (mut round_trips, mut idempotent) = (0, 0);
    while round_trips < 1000 || idempotent < 1000 {
        let raw = strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let Ok(e) = normalize(&raw) else { continue };
        if idempotent < 1000 {
            let again = normalize(&e).map_err(|err| err.to_string())?;
            ensure(again == e, || format!("normalize not idempotent on {raw:?}"))?;
            idempotent += 1;
        }
        if round_trips < 1000 {
            let text = format_plain(&e);
            let back: Expr = parse(&text).map_err(|err| format!("{text:?}: {err}"))?;
            ensure(back == e, || format!("{text:?} re-parsed as {}", format_plain(&back)))?;
            round_trips += 1;
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(1)),
        (3, criterion_3, Duration::from_secs(1)),
        (4, criterion_4, Duration::from_secs(1)),
        (5, criterion_5, Duration::from_secs(1)),
        (6, criterion_6, Duration::from_secs(1)),
        (7, criterion_7, Duration::from_secs(10)),
        (8, criterion_8, Duration::from_secs(5)),
        (9, criterion_9, Duration::from_secs(10)),
    ];
    let mut failed = Vec::new();
    report("");
    for (n, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
        });
        match outcome {
            Ok(()) => report(&format!("criterion {n}: PASS ({elapsed:.2?})")),
            Err(why) => {
                report(&format!("criterion {n}: FAIL ({elapsed:.2?}) {why}"));
                failed.push(n);
            }
        }
        if n == 8 {
            let note = match ode_check(0.3) {
                Ok(()) => "holds".to_string(),
                Err(why) => format!("fails: {why}"),
            };
            report(&format!("  same check over span 0.3 {note}"));
        }
    }
    assert_eq!(failed, KNOWN_UNATTAINABLE, "unexpected acceptance outcome");
}
