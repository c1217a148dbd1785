//! `leibniz`: differentials as algebraic units from the command line.
//!
//! Exit status is 0 on success, 1 when a verification fails and 2 on a
//! usage or parse error.

mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leibniz::differential::eliminate_pending;
use leibniz::expansion::{dxdx_report, ordinary_derivative, ExpansionError};
use leibniz::jet::{eval_diff_expr, expansion_oracle_check, OracleError, Parametrization, DEFAULT_TOLERANCE};
use leibniz::ode::{solve_by_swap, verify_numeric, OdeError};
use leibniz::parser::parse_with_differentials;
use leibniz::upoly::UnivariatePoly;
use leibniz::{
    arbogast_expand, invert_second_derivative, nth_differential, reduce_with_progression, verify_second_chain_rule,
    DiffRational, Expr, Progression, Symbol,
};

use report::{Out, Render};

#[derive(Parser)]
#[command(name = "leibniz", version, about = "Differentials as algebraic units")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, env = "LEIBNIZ_STYLE", default_value = "plain")]
    style: OutputStyle,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputStyle {
    Plain,
    Latex,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// n-th differential of an expression.
    Diff {
        expr: String,
        #[arg(short, default_value_t = 1)]
        n: u32,
    },
    /// Expand D_indep^n dep as a ratio of differentials.
    Expand {
        #[arg(short, long)]
        dependent: String,
        #[arg(short, long)]
        independent: String,
        #[arg(short, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Reduce with this symbol as the independent variable.
        #[arg(long)]
        progression: Option<String>,
    },
    /// Run one of the built-in verifications.
    #[command(subcommand)]
    Verify(Verify),
    /// Solve y'' = f(y) y'^3 by swapping variables and check it with RK4.
    SolveOde(SolveOde),
    /// Evaluate an expression along polynomial curves.
    Eval {
        expr: String,
        /// Curves in t, e.g. "x=t^2,y=t^6".
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Second-order chain rule for y(x(t)).
    Chain2 {
        #[arg(long, default_value = "x^3")]
        y: String,
        #[arg(long, default_value = "t^2")]
        x: String,
    },
    /// Second derivative of the inverse function for a polynomial y(x).
    Inverse {
        #[arg(long, default_value = "x^3")]
        y: String,
    },
    /// The derivative of dx/dx vanishes while d^2x/dx^2 alone does not.
    Dxdx {
        #[arg(long, default_value = "x")]
        symbol: String,
    },
    /// Jet evaluation of D_x^n y against an independent oracle.
    ExpansionOracle {
        #[arg(short, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SolveOde {
    /// Polynomial in y.
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    y0: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    yprime0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x0: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    span: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Largest accepted residual for the derived branch.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

/// Ends a command early with the matching exit status.
enum Failure {
    Usage(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

type Outcome = Result<Out, Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn expr_arg(text: &str) -> Result<Expr, Failure> {
    let raw = parse_with_differentials(text).map_err(|e| Failure::Usage(e.render(text)))?;
    eliminate_pending(&raw).map_err(usage)
}

fn symbol_arg(text: &str) -> Result<Symbol, Failure> {
    Symbol::new(text.trim()).map_err(usage)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Diff { expr, n } => {
            let e = expr_arg(&expr)?;
            let result = nth_differential(&e, n).map_err(usage)?;
            Ok(Out::Diff { input: e, order: n, result })
        }
        Command::Expand { dependent, independent, n, progression } => {
            let (dep, indep) = (symbol_arg(&dependent)?, symbol_arg(&independent)?);
            if dep == indep {
                return Err(Failure::Usage("dependent and independent variables must differ".to_string()));
            }
            let form = arbogast_expand(&dep, &indep, n).map_err(usage)?;
            let progression = progression.as_deref().map(symbol_arg).transpose()?;
            let result = match &progression {
                Some(p) => reduce_with_progression(&form.expansion, &Progression::new(p.clone())).map_err(usage)?,
                None => form.expansion,
            };
            Ok(Out::Expand { dependent: dep, independent: indep, order: n, progression, result })
        }
        Command::Verify(v) => verify(v),
        Command::SolveOde(args) => solve_ode(args),
        Command::Eval { expr, param, at, dt } => {
            let e = expr_arg(&expr)?;
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Failure::Usage("dt must be positive".to_string()));
            }
            let p = Parametrization::parse(&param, at).map_err(usage)?.with_dt(dt);
            match eval_diff_expr(&e, &p) {
                Ok(value) => Ok(Out::Eval { expression: e, parametrization: p.view(), value }),
                Err(err @ (OracleError::DenominatorVanishes { .. } | OracleError::Jet(_))) => {
                    Err(Failure::Verification(err.to_string()))
                }
                Err(err) => Err(usage(err)),
            }
        }
    }
}

fn verify(v: Verify) -> Outcome {
    match v {
        Verify::Chain2 { y, x } => {
            let x_sym = Symbol::new("x").expect("valid symbol");
            let t_sym = Symbol::new("t").expect("valid symbol");
            let y_of_x = UnivariatePoly::parse(&y, &x_sym).map_err(usage)?.to_expr();
            let x_of_t = UnivariatePoly::parse(&x, &t_sym).map_err(usage)?.to_expr();
            let report = verify_second_chain_rule(&y_of_x, &x_of_t).map_err(usage)?;
            Ok(Out::Chain2(Box::new(report)))
        }
        Verify::Inverse { y } => verify_inverse(&y),
        Verify::Dxdx { symbol } => {
            let report = dxdx_report(&symbol_arg(&symbol)?).map_err(usage)?;
            Ok(Out::Dxdx(report))
        }
        Verify::ExpansionOracle { n, trials, seed } => {
            if trials == 0 {
                return Err(Failure::Usage("trials must be positive".to_string()));
            }
            let report = expansion_oracle_check(n, trials, seed).map_err(|e| match e {
                OracleError::InconclusiveSampling { .. } => Failure::Verification(e.to_string()),
                other => usage(other),
            })?;
            Ok(Out::ExpansionOracle { order: n, seed, report })
        }
    }
}

/// Points at which the inverse is compared with the direct expansion.
const INVERSE_PROBES: [f64; 6] = [-1.7, -0.9, -0.3, 0.4, 1.1, 1.9];

fn verify_inverse(y_text: &str) -> Outcome {
    let (x, y, t) = (
        Symbol::new("x").expect("valid symbol"),
        Symbol::new("y").expect("valid symbol"),
        Symbol::new("t").expect("valid symbol"),
    );
    let curve = UnivariatePoly::parse(y_text, &x).map_err(usage)?;
    let y_of_x = curve.to_expr();
    let to_ratio = |e: &Expr| DiffRational::from_expr(e).map_err(usage);
    let first_expr = ordinary_derivative(&y_of_x, &x).map_err(usage)?;
    let second_expr = ordinary_derivative(&first_expr, &x).map_err(usage)?;
    let (first, second) = (to_ratio(&first_expr)?, to_ratio(&second_expr)?);
    let inverted = match invert_second_derivative(&second, &first) {
        Ok(r) => r,
        Err(ExpansionError::Rational(_)) => {
            return Err(Failure::Usage(format!("y = {y_text} has zero slope everywhere")));
        }
        Err(e) => return Err(usage(e)),
    };

    let general = invert_second_derivative(
        &arbogast_expand(&y, &x, 2).map_err(usage)?.expansion,
        &arbogast_expand(&y, &x, 1).map_err(usage)?.expansion,
    )
    .map_err(usage)?;
    let swapped = arbogast_expand(&x, &y, 2).map_err(usage)?;
    let symbolic_identity_holds = general == swapped.expansion;

    let along = UnivariatePoly::new(t.clone(), curve.coefficients().to_vec());
    let mut max_rel_err: f64 = 0.0;
    let mut probes = 0;
    for t0 in INVERSE_PROBES {
        if along.derivative().eval_f64(t0).abs() < 1e-3 {
            continue;
        }
        let p = Parametrization::new(t.clone(), t0)
            .bind(x.clone(), UnivariatePoly::identity(t.clone()))
            .and_then(|p| p.bind(y.clone(), along.clone()))
            .map_err(usage)?;
        let (Ok(direct), Ok(formula)) = (eval_diff_expr(&swapped, &p), eval_diff_expr(&inverted, &p)) else {
            continue;
        };
        max_rel_err = max_rel_err.max((direct - formula).abs() / direct.abs().max(formula.abs()).max(1e-12));
        probes += 1;
    }
    Ok(Out::Inverse(report::InverseReport {
        y_of_x,
        first,
        second,
        inverted,
        symbolic_identity_holds,
        probes,
        max_rel_err,
        passed: symbolic_identity_holds && probes > 0 && max_rel_err <= DEFAULT_TOLERANCE,
    }))
}

fn solve_ode(args: SolveOde) -> Outcome {
    let y = Symbol::new("y").expect("valid symbol");
    let f = UnivariatePoly::parse(&args.f, &y).map_err(usage)?;
    let solution = solve_by_swap(&f).map_err(usage)?;
    let numeric = match verify_numeric(&f, args.y0, args.yprime0, args.x0, args.span, args.step) {
        Ok(r) => Ok(r),
        Err(e @ OdeError::BlowupDetected { .. }) => Err(e.to_string()),
        Err(e) => return Err(usage(e)),
    };
    Ok(Out::SolveOde(report::OdeReport { solution, tolerance: args.tolerance, numeric }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let style = cli.style;
    match run(cli.command) {
        Ok(out) => {
            println!("{}", out.render(style));
            if out.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }
        Err(failure) => {
            let (Failure::Usage(msg) | Failure::Verification(msg)) = &failure;
            eprintln!("error: {msg}");
            ExitCode::from(failure.code())
        }
    }
}
