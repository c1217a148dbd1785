use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn leibniz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .args(args)
        .env_remove("LEIBNIZ_STYLE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn expect(args: &[&str], code: i32, text: &str) {
    let out = leibniz(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim_end(), text, "{args:?}");
}

fn exit_code(args: &[&str]) -> i32 {
    leibniz(args).status.code().unwrap()
}

#[test]
fn differentials() {
    expect(&["diff", "x^3"], 0, "3x^2 dx");
    expect(&["diff", "x*y", "-n", "2"], 0, "x d^2y + 2 dx dy + y d^2x");
    expect(&["diff", "5"], 0, "0");
    expect(&["diff", "d(x*y)"], 0, "x d^2y + 2 dx dy + y d^2x");
}

#[test]
fn expansions() {
    expect(&["expand", "-d", "y", "-i", "x", "-n", "2"], 0, "d^2y/dx^2 - dy/dx*d^2x/dx^2");
    expect(&["expand", "-d", "y", "-i", "x", "-n", "2", "--progression", "x"], 0, "d^2y/dx^2");
    expect(&["expand", "-d", "y", "-i", "x", "-n", "1"], 0, "dy/dx");
    expect(
        &["--style", "latex", "expand", "-d", "y", "-i", "x", "-n", "1"],
        0,
        r"\frac{\mathrm{d}y}{\mathrm{d}x}",
    );
}

#[test]
fn evaluation() {
    expect(&["eval", "dy/dx", "--param", "x=t^2,y=t^6", "--at", "1"], 0, "3");
    expect(&["eval", "dx", "--param", "x=t", "--at", "0"], 0, "1");
    expect(&["eval", "d^2y/dx^2 - dy/dx * d^2x/dx^2", "--param", "x=t^2,y=t^6", "--at", "1"], 0, "6");
}

#[test]
fn verifications() {
    let chain = stdout(&leibniz(&["verify", "chain2", "--y", "x^3", "--x", "t^2"]));
    assert!(chain.contains("naive:        24t^4"), "{chain}");
    assert!(chain.contains("direct:       30t^4"), "{chain}");
    assert!(chain.contains("full-form identity: holds"), "{chain}");
    let dxdx = stdout(&leibniz(&["verify", "dxdx"]));
    assert!(dxdx.contains("D_x^2 x = 0") && dxdx.contains("(zero: no)"), "{dxdx}");
    let inverse = stdout(&leibniz(&["verify", "inverse"]));
    assert!(inverse.contains("D_y^2 x = -2/9/x^5"), "{inverse}");
    let oracle = leibniz(&["--style", "json", "verify", "expansion-oracle", "-n", "3", "--trials", "100", "--seed", "7"]);
    let v: Value = serde_json::from_slice(&oracle.stdout).unwrap();
    assert!(v["report"]["max_rel_err"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["report"]["trials"], 100);
}

#[test]
fn ode() {
    let blown = leibniz(&["solve-ode", "--f", "y", "--y0", "1", "--yprime0", "1", "--x0", "0", "--span", "0.5", "--step", "1e-3"]);
    assert_eq!(blown.status.code(), Some(1));
    assert!(stdout(&blown).contains("x = -1/6 y^3 + c1 y + c2"));
    assert!(stdout(&blown).contains("blows up"));
    let short = leibniz(&["--style", "json", "solve-ode", "--f", "y", "--span", "0.3"]);
    assert_eq!(short.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&short.stdout).unwrap();
    assert!(v["report"]["max_residual_minus_branch"].as_f64().unwrap() <= 1e-6);
    assert!(v["report"]["max_residual_plus_branch"].as_f64().unwrap() >= 1e-3);
    let linear = leibniz(&["--style", "json", "solve-ode", "--f", "0", "--y0", "0.5", "--yprime0", "2"]);
    let v: Value = serde_json::from_slice(&linear.stdout).unwrap();
    assert_eq!(v["solution"], "x = c1 y + c2");
    assert!(v["report"]["max_residual_minus_branch"].as_f64().unwrap() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["diff", "x +* 2"]), 2);
    assert_eq!(exit_code(&["diff", "foo(x)"]), 2);
    assert_eq!(exit_code(&["expand", "-d", "x", "-i", "x", "-n", "2"]), 2);
    assert_eq!(exit_code(&["expand", "-d", "y", "-i", "x", "-n", "0"]), 2);
    assert_eq!(exit_code(&["solve-ode", "--f", "q"]), 2);
    assert_eq!(exit_code(&["eval", "dy/dx", "--param", "x=t^2", "--at", "1"]), 2);
    assert_eq!(exit_code(&["eval", "dy/dx", "--param", "x=t^2,y=t^6", "--at", "0"]), 1);
    assert_eq!(exit_code(&["verify", "inverse", "--y", "5"]), 2);
    assert_eq!(exit_code(&["no-such-command"]), 2);
    assert_eq!(exit_code(&["--style", "html", "diff", "x"]), 2);
    let err = leibniz(&["diff", "x +* 2"]);
    let msg = String::from_utf8(err.stderr).unwrap();
    assert!(msg.contains("3..4") && msg.contains('^'), "{msg}");
}

#[test]
fn style_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .args(["diff", "x^3"])
        .env("LEIBNIZ_STYLE", "json")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"], "3x^2 dx");
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .args(["--style", "plain", "diff", "x^3"])
        .env("LEIBNIZ_STYLE", "json")
        .output()
        .unwrap();
    assert_eq!(stdout(&flag_wins).trim_end(), "3x^2 dx");
}

#[test]
fn deterministic_given_seed() {
    let args = ["--style", "json", "verify", "expansion-oracle", "-n", "4", "--trials", "50", "--seed", "11"];
    assert_eq!(leibniz(&args).stdout, leibniz(&args).stdout);
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(format!("{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

#[test]
fn json_matches_schemas() {
    let cases: [(&str, &[&str]); 11] = [
        ("diff", &["diff", "x*y", "-n", "2"]),
        ("expand", &["expand", "-d", "y", "-i", "x", "-n", "3"]),
        ("expand", &["expand", "-d", "y", "-i", "x", "-n", "2", "--progression", "x"]),
        ("verify-chain2", &["verify", "chain2"]),
        ("verify-inverse", &["verify", "inverse", "--y", "x^3 + x"]),
        ("verify-dxdx", &["verify", "dxdx", "--symbol", "y"]),
        ("verify-expansion-oracle", &["verify", "expansion-oracle", "-n", "2", "--trials", "20"]),
        ("solve-ode", &["solve-ode", "--f", "y", "--span", "0.3"]),
        ("solve-ode", &["solve-ode", "--f", "y", "--span", "0.5"]),
        ("eval", &["eval", "dy/dx", "--param", "x=t^2,y=t^6", "--at", "1", "--dt", "0.5"]),
        ("eval", &["eval", "sin(x) dx", "--param", "x=t", "--at", "0.3"]),
    ];
    for (name, args) in cases {
        let mut full = vec!["--style", "json"];
        full.extend_from_slice(args);
        let out = leibniz(&full);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        let validator = schema(name);
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}\n{v}");
        let reparsed: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(reparsed, v);
    }
    let mut extra: Value = serde_json::from_slice(&leibniz(&["--style", "json", "diff", "x"]).stdout).unwrap();
    extra["unexpected"] = Value::Bool(true);
    assert!(!schema("diff").is_valid(&extra));
}
