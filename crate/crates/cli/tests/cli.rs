use std::process::{Command, Output};

use serde_json::Value;

fn rrunits(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrunits"))
        .args(args)
        .env("RRUNITS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = rrunits(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn expand_psi_level_nine() {
    let v = json(&["expand", "--object", "psi1", "--m", "2", "--n", "2", "--order", "10"]);
    assert_eq!(v["leading_exponent"], "-2/3");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["terms"][0][0], "-2/3");
}

#[test]
fn expand_reports_rationals_as_strings() {
    let v = json(&["expand", "--object", "s", "--ell", "5", "--m", "1", "--order", "5"]);
    assert_eq!(v["coeff_level"], "Q");
    assert!(v["terms"].as_array().unwrap().iter().all(|t| t[0].is_string()));
    let g = json(&["expand", "--object", "G", "--ell", "5", "--m", "2", "--order", "3"]);
    assert!(g["terms"].as_array().is_some());
}

#[test]
fn rank_example_seventeen() {
    let v = json(&["rank", "--ell", "17", "--c", "2"]);
    assert_eq!(v["d"], 4);
    assert_eq!(v["formula_rank"], 6);
    assert_eq!(v["matrix_rank"], 6);
    assert_eq!(v["agree"], true);
    let sweep = json(&["rank", "--sweep-primes", "31"]);
    assert_eq!(sweep.as_array().unwrap().len(), 9);
}

#[test]
fn golden_cusp_limit() {
    let v = json(&["cusp-limit", "--ell", "5", "--m", "1", "--numeric", "20"]);
    assert!(v["numeric"].as_str().unwrap().starts_with("1.61803398874989"));
    assert_eq!(v["minimal_check"], true);
}

#[test]
fn stabilizer_and_unit_check() {
    let v = json(&["stabilizer", "--ell", "7", "--m", "2"]);
    assert_eq!(v["count"], 6);
    assert_eq!(v["is_gamma_d_set"], true);
    let u = json(&["unit-check", "--ell", "9", "--m", "2"]);
    assert_eq!(u["is_unit"], true);
}

#[test]
fn eval_at_rho() {
    let v = json(&["eval", "--object", "s", "--ell", "5", "--m", "1", "--point", "rho", "--prec", "30"]);
    assert!(v["re"].as_str().unwrap().starts_with("2.3916930583"));
    assert!(v["err"].as_f64().unwrap() < 1e-25);
}

#[test]
fn verify_suites_and_exit_codes() {
    let v = json(&["verify", "--suite", "grr", "--m", "2", "--n", "2", "--order", "30"]);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["pass"], 2);
    let v = json(&["verify", "--suite", "stabilizers", "--ell", "5"]);
    assert_eq!(v["cases"][0]["detail"], "count 4 of 240 classes");
    assert_eq!(rrunits(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(rrunits(&["expand", "--object", "s", "--ell", "6", "--m", "1"]).status.code(), Some(2));
    assert_eq!(rrunits(&["rank"]).status.code(), Some(2));
    assert_eq!(rrunits(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn text_format_and_out_file() {
    let out = rrunits(&["verify", "--suite", "selberg", "--order", "20", "--format", "text"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    let path = std::env::temp_dir().join(format!("rrunits-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = rrunits(&["rank", "--ell", "5", "--out", p]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["matrix_rank"], 1);
    std::fs::remove_file(&path).ok();
}

#[test]
fn seed_changes_cases_not_results() {
    let a = json(&["verify", "--suite", "numeric-cm", "--prec", "20", "--seed", "1"]);
    let b = json(&["verify", "--suite", "numeric-cm", "--prec", "20", "--seed", "2"]);
    assert_eq!(a["summary"]["fail"], 0);
    assert_eq!(b["summary"]["fail"], 0);
    assert_eq!(a["cases"][0]["detail"], b["cases"][0]["detail"]);
}
