use std::fmt::Write;

use leibniz::expansion::{ChainRuleReport, DxDxReport};
use leibniz::jet::{IdentityReport, ParametrizationView};
use leibniz::ode::{ImplicitSolution, NumericReport};
use leibniz::{format, DiffRational, Expr, Style, Symbol};
use serde_json::{json, Value};

use crate::OutputStyle;

pub struct InverseReport {
    pub y_of_x: Expr,
    pub first: DiffRational,
    pub second: DiffRational,
    pub inverted: DiffRational,
    pub symbolic_identity_holds: bool,
    pub probes: usize,
    pub max_rel_err: f64,
    pub passed: bool,
}

pub struct OdeReport {
    pub solution: ImplicitSolution,
    pub tolerance: f64,
    /// The RK4 comparison, or why it stopped.
    pub numeric: Result<NumericReport, String>,
}

impl OdeReport {
    fn passed(&self) -> bool {
        self.numeric.as_ref().is_ok_and(|r| r.passed(self.tolerance))
    }
}

pub enum Out {
    Diff { input: Expr, order: u32, result: Expr },
    Expand { dependent: Symbol, independent: Symbol, order: u32, progression: Option<Symbol>, result: DiffRational },
    Chain2(Box<ChainRuleReport>),
    Inverse(InverseReport),
    Dxdx(DxDxReport),
    ExpansionOracle { order: u32, seed: u64, report: IdentityReport },
    SolveOde(OdeReport),
    Eval { expression: Expr, parametrization: ParametrizationView, value: f64 },
}

pub trait Render {
    fn render(&self, style: OutputStyle) -> String;
}

fn text(e: &Expr, style: OutputStyle) -> String {
    match style {
        OutputStyle::Latex => format(e, Style::Latex),
        _ => format(e, Style::Plain),
    }
}

fn plain(e: &Expr) -> String {
    format(e, Style::Plain)
}

fn yes_no(b: bool) -> &'static str {
    if b { "yes" } else { "no" }
}

fn verdict(passed: bool) -> &'static str {
    if passed { "verified" } else { "FAILED" }
}

impl Out {
    pub fn passed(&self) -> bool {
        match self {
            Out::Diff { .. } | Out::Expand { .. } | Out::Eval { .. } => true,
            Out::Chain2(r) => r.passed(),
            Out::Inverse(r) => r.passed,
            Out::Dxdx(r) => r.passed(),
            Out::ExpansionOracle { report, .. } => report.passed(),
            Out::SolveOde(r) => r.passed(),
        }
    }

    pub fn to_json(&self) -> Value {
        let passed = self.passed();
        match self {
            Out::Diff { input, order, result } => json!({
                "command": "diff",
                "input": plain(input),
                "order": order,
                "result": plain(result),
                "latex": format(result, Style::Latex),
            }),
            Out::Expand { dependent, independent, order, progression, result } => json!({
                "command": "expand",
                "dependent": dependent.name(),
                "independent": independent.name(),
                "order": order,
                "progression": progression.as_ref().map(Symbol::name),
                "result": plain(&result.to_expr()),
                "latex": format(&result.to_expr(), Style::Latex),
            }),
            Out::Chain2(r) => json!({
                "command": "verify chain2",
                "passed": passed,
                "y_of_x": plain(&r.y_of_x),
                "x_of_t": plain(&r.x_of_t),
                "naive": plain(&r.naive),
                "faa_di_bruno": plain(&r.faa_di_bruno),
                "direct": plain(&r.direct),
                "naive_matches_direct": r.naive_matches_direct(),
                "identity_lhs": plain(&r.identity_lhs.to_expr()),
                "identity_rhs": plain(&r.identity_rhs.to_expr()),
                "identity_holds": r.identity_holds,
            }),
            Out::Inverse(r) => json!({
                "command": "verify inverse",
                "passed": passed,
                "y_of_x": plain(&r.y_of_x),
                "first": plain(&r.first.to_expr()),
                "second": plain(&r.second.to_expr()),
                "inverted": plain(&r.inverted.to_expr()),
                "symbolic_identity_holds": r.symbolic_identity_holds,
                "probes": r.probes,
                "max_rel_err": r.max_rel_err,
            }),
            Out::Dxdx(r) => json!({
                "command": "verify dxdx",
                "passed": passed,
                "symbol": r.symbol.name(),
                "full_form": plain(&r.full_form.to_expr()),
                "bare": plain(&r.bare.to_expr()),
                "full_form_is_zero": r.full_form_is_zero(),
                "bare_is_zero": r.bare_is_zero(),
            }),
            Out::ExpansionOracle { order, seed, report } => json!({
                "command": "verify expansion-oracle",
                "passed": passed,
                "order": order,
                "seed": seed,
                "report": report,
            }),
            Out::SolveOde(r) => json!({
                "command": "solve-ode",
                "passed": passed,
                "solution": r.solution.to_string(),
                "particular": r.solution.particular.to_string(),
                "inverted": plain(&r.solution.inverted.to_expr()),
                "tolerance": r.tolerance,
                "report": r.numeric.as_ref().ok(),
                "error": r.numeric.as_ref().err(),
            }),
            Out::Eval { expression, parametrization, value } => json!({
                "command": "eval",
                "expression": plain(expression),
                "parametrization": parametrization,
                "value": value,
            }),
        }
    }
}

impl Render for Out {
    fn render(&self, style: OutputStyle) -> String {
        if style == OutputStyle::Json {
            return serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        }
        let t = |e: &Expr| text(e, style);
        let q = |r: &DiffRational| text(&r.to_expr(), style);
        let mut s = String::new();
        match self {
            Out::Diff { result, .. } => s.push_str(&t(result)),
            Out::Expand { result, .. } => s.push_str(&q(result)),
            Out::Eval { value, .. } => {
                let _ = write!(s, "{value}");
            }
            Out::Chain2(r) => {
                let _ = writeln!(s, "y = {}, x = {}", t(&r.y_of_x), t(&r.x_of_t));
                let _ = writeln!(s, "naive:        {}", t(&r.naive));
                let _ = writeln!(s, "Faa di Bruno: {}", t(&r.faa_di_bruno));
                let _ = writeln!(s, "direct:       {}", t(&r.direct));
                let _ = writeln!(s, "naive matches direct: {}", yes_no(r.naive_matches_direct()));
                let _ = writeln!(s, "full-form identity: {}", if r.identity_holds { "holds" } else { "does not hold" });
                let _ = writeln!(s, "  D_t^2 y = {}", q(&r.identity_lhs));
                let _ = writeln!(s, "  D_x^2 y (D_t x)^2 + D_x y D_t^2 x = {}", q(&r.identity_rhs));
                s.push_str(verdict(self.passed()));
            }
            Out::Inverse(r) => {
                let _ = writeln!(s, "y = {}", t(&r.y_of_x));
                let _ = writeln!(s, "D_x y = {}", q(&r.first));
                let _ = writeln!(s, "D_x^2 y = {}", q(&r.second));
                let _ = writeln!(s, "D_y^2 x = {}", q(&r.inverted));
                let _ = writeln!(s, "general inversion matches D_y^2 x: {}", yes_no(r.symbolic_identity_holds));
                let _ = writeln!(s, "numeric probes: {}, max rel. err {:.3e}", r.probes, r.max_rel_err);
                s.push_str(verdict(r.passed));
            }
            Out::Dxdx(r) => {
                let x = r.symbol.name();
                let _ = writeln!(s, "D_{x}^2 {x} = {}", q(&r.full_form));
                let _ = writeln!(s, "bare ratio: {} (zero: {})", q(&r.bare), yes_no(r.bare_is_zero()));
                s.push_str(verdict(r.passed()));
            }
            Out::ExpansionOracle { order, seed, report } => {
                let _ = writeln!(s, "D_x^{order} y against the quotient oracle, seed {seed}");
                let _ = writeln!(s, "trials: {}, max rel. err {:.3e}", report.trials, report.max_rel_err);
                if let Some(c) = &report.counterexample {
                    let _ = writeln!(
                        s,
                        "counterexample: {:?} at t0 = {}: {} vs {}",
                        c.parametrization.bindings, c.parametrization.t0, c.lhs, c.rhs
                    );
                }
                s.push_str(verdict(report.passed()));
            }
            Out::SolveOde(r) => {
                let _ = writeln!(s, "{}", r.solution);
                let _ = writeln!(s, "D_y^2 x = {}", q(&r.solution.inverted));
                match &r.numeric {
                    Ok(n) => {
                        let _ = writeln!(s, "c1 = {}, c2 = {}", n.constants.c1, n.constants.c2);
                        let _ = writeln!(s, "RK4 over span {} with step {}", n.span, n.step);
                        let _ = writeln!(s, "derived branch residual:  {:.3e}", n.max_residual_minus_branch);
                        let _ = writeln!(s, "opposite branch residual: {:.3e}", n.max_residual_plus_branch);
                    }
                    Err(e) => {
                        let _ = writeln!(s, "numeric check stopped: {e}");
                    }
                }
                s.push_str(verdict(r.passed()));
            }
        }
        s
    }
}
