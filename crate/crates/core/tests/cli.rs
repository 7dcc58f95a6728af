use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const DILATION: &str = r#"{"kind": "lft_hyperbolic", "lambda": 2.0, "b": [0.0, 0.0], "p": 1, "transport": "cayley"}"#;
const DILATION_SIEGEL: &str = r#"{"kind": "lft_hyperbolic", "lambda": 2.0, "b": [0.0, 0.0], "p": 1}"#;
const NEAR_PARABOLIC: &str =
    r#"{"kind": "lft_hyperbolic", "lambda": 1.000000001, "b": [0.0, 0.0], "p": 1, "transport": "cayley"}"#;
const TRANSLATION: &str = r#"{"kind": "lft_parabolic", "b": [1.0, 0.0], "r": 1, "p": 1}"#;
const BLOCKS: &str = r#"{"kind": "lft_hyperbolic", "lambda": 2.0, "b": [0.0, 0.5],
    "D": [[1.4142135623730951, 0.0]], "A": [[[0.5, 0.0]]], "c": [[0.2, 0.1]], "p": 2}"#;
const FLOW: &str = r#"{"kind": "semigroup_affine_siegel", "rate": 1.0, "rotations": [0.3]}"#;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn kobdyn(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kobdyn"));
    cmd.args(args);
    match config {
        Some(p) => cmd.env("KOBDYN_CONFIG", p),
        None => cmd.env_remove("KOBDYN_CONFIG"),
    };
    cmd.output().unwrap()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = kobdyn(args, None);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

fn with_map(cmd: &str, map: &Path, extra: &[&str]) -> (i32, Value) {
    let mut args = vec![cmd, "--map", map.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn classify_dilation() {
    let ws = Workspace::new();
    let (code, rep) = with_map("classify", &ws.file("m.json", DILATION), &[]);
    assert_eq!(code, 0);
    assert_eq!(rep["command"], "classify");
    assert_eq!(rep["status"], "ok");
    assert_eq!(rep["result"]["class"], "hyperbolic");
    assert!((rep["result"]["dilation"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(rep["result"]["dw_point"], serde_json::json!([[1.0, 0.0]]));
    assert_eq!(rep["config"]["tol"], 1e-8);
}

#[test]
fn malformed_spec_exits_1() {
    let ws = Workspace::new();
    let out = kobdyn(&["classify", "--map", ws.file("m.json", "{\"kind\": ").to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("map spec"));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["status"], "error");

    let (code, _) = run(&["classify", "--map", "/nonexistent/map.json"]);
    assert_eq!(code, 1);
    let (code, _) = with_map("model", &ws.file("f.json", FLOW), &[]);
    assert_eq!(code, 1, "model needs a normal form");
}

#[test]
fn near_parabolic_is_inconclusive() {
    let ws = Workspace::new();
    let (code, rep) = with_map("classify", &ws.file("m.json", NEAR_PARABOLIC), &[]);
    assert_eq!(code, 2);
    assert_eq!(rep["status"], "inconclusive");
    assert_eq!(rep["result"]["expected"]["class"], "hyperbolic");
}

#[test]
fn model_reports_base_dimension_and_tau() {
    let ws = Workspace::new();
    let (code, rep) = with_map("model", &ws.file("m.json", BLOCKS), &["--samples", "200"]);
    assert_eq!(code, 0);
    let r = &rep["result"];
    assert_eq!(r["k"], 2);
    assert_eq!(r["limit_metric"]["rank"], 2);
    assert_eq!(r["semi_model"]["tau_params"]["lambda"], 2.0);
    assert_eq!(r["semi_model"]["retraction"]["keep"], 2);
    assert_eq!(r["semi_model"]["omega_description"], "Im z_1 > |z_2|^2 - 0.5");
    assert_eq!(r["omega_consistency"]["contradictions"], 0);
}

#[test]
fn valiron_and_abel_residuals() {
    let ws = Workspace::new();
    let map = ws.file("m.json", BLOCKS);
    let (code, rep) = with_map("valiron", &map, &["--point", "[[0.0, 2.0], [0.1, 0.0], [0.0, 0.1]]"]);
    assert_eq!(code, 0);
    assert!(rep["result"]["residual_sup"].as_f64().unwrap() < 1e-10);
    // Θ(z) = z_1 + b/(λ − 1) for this form.
    let theta = &rep["result"]["theta_at_point"];
    assert!(theta[0].as_f64().unwrap().abs() < 1e-12);
    assert!((theta[1].as_f64().unwrap() - 2.5).abs() < 1e-12);
    let (code, rep) = with_map("abel", &map, &[]);
    assert_eq!(code, 0);
    assert!(rep["result"]["abel"]["residual_sup"].as_f64().unwrap() < 1e-10);
}

#[test]
fn translation_rate_bracket_contains_zero() {
    let ws = Workspace::new();
    let (code, rep) = with_map("divergence-rate", &ws.file("m.json", TRANSLATION), &[]);
    assert_eq!(code, 0);
    let b = &rep["result"]["bracket"];
    assert_eq!(b[0].as_f64().unwrap(), 0.0);
    assert!(b[1].as_f64().unwrap() < 1e-6);
}

#[test]
fn step_of_translation() {
    let ws = Workspace::new();
    let (code, rep) = with_map("step", &ws.file("m.json", TRANSLATION), &[]);
    assert_eq!(code, 0);
    assert!((rep["result"]["limit"].as_f64().unwrap() - 1.5f64.acosh()).abs() < 1e-12);
}

#[test]
fn semigroup_report_parts() {
    let ws = Workspace::new();
    let (code, rep) = with_map("semigroup", &ws.file("m.json", FLOW), &["--samples", "100"]);
    assert_eq!(code, 0, "{rep}");
    let r = &rep["result"];
    assert!(r["law"]["law_residual"].as_f64().unwrap() < 1e-10);
    assert!((r["linearity"]["slope"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert_eq!(r["classification"]["consistent"], true);
    assert!((r["rate"]["c"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn verify_suites_pass() {
    for suite in ["julia", "convexity", "steplimit", "lindelof"] {
        let (code, rep) = run(&["verify", "--suite", suite]);
        assert_eq!(code, 0, "{suite}: {rep}");
        assert_eq!(rep["result"]["passed"], true);
    }
    let (_, rep) = run(&["verify", "--suite", "steplimit"]);
    for p in rep["result"]["properties"].as_array().unwrap() {
        assert!(p["worst_margin"].as_f64().unwrap() < 1e-4);
    }
    let (code, _) = run(&["verify", "--suite", "nope"]);
    assert_eq!(code, 1);
}

fn orbit_rows(map: &Path, steps: &str) -> Vec<Value> {
    let (code, rep) = with_map("orbit", map, &["--steps", steps]);
    assert_eq!(code, 0);
    rep["result"]["rows"].as_array().unwrap().clone()
}

#[test]
fn orbit_columns() {
    let ws = Workspace::new();
    let rows = orbit_rows(&ws.file("d.json", DILATION_SIEGEL), "50");
    assert_eq!(rows.len(), 51);
    for r in &rows {
        let m = r["m"].as_f64().unwrap();
        assert!((r["distance_from_start"].as_f64().unwrap() - m * 2f64.ln()).abs() < 1e-12 * m.max(1.0));
    }
    assert_eq!(orbit_rows(&ws.file("d.json", DILATION_SIEGEL), "0").len(), 1);
    let rows = orbit_rows(&ws.file("t.json", TRANSLATION), "30");
    let first = rows[0]["step_distance"].as_f64().unwrap();
    assert!(rows.iter().all(|r| r["step_distance"].as_f64().unwrap() == first));
}

#[test]
fn orbit_csv_and_truncation() {
    let ws = Workspace::new();
    let map = ws.file("d.json", DILATION_SIEGEL);
    let out = kobdyn(&["orbit", "--map", map.to_str().unwrap(), "--steps", "2", "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,re_z1,im_z1,norm,k_z0_zm,k_zm_zm1");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2].split(',').nth(2).unwrap(), "2.0000000000000000e0");

    let out = kobdyn(&["orbit", "--map", map.to_str().unwrap(), "--steps", "1000", "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("error,"));

    let (code, _) = with_map("classify", &map, &["--format", "csv"]);
    assert_eq!(code, 1, "csv is only for orbits");
}

#[test]
fn reports_are_deterministic() {
    let ws = Workspace::new();
    let map = ws.file("m.json", BLOCKS);
    let a = kobdyn(&["model", "--map", map.to_str().unwrap(), "--samples", "100", "--seed", "5"], None);
    let b = kobdyn(&["model", "--map", map.to_str().unwrap(), "--samples", "100", "--seed", "5"], None);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_overrides() {
    let ws = Workspace::new();
    let cfg = ws.file("cfg.json", r#"{"samples": 7, "seed": 3}"#);
    let map = ws.file("m.json", BLOCKS);
    let out = kobdyn(&["valiron", "--map", map.to_str().unwrap()], Some(&cfg));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["config"]["samples"], 7);
    assert_eq!(rep["result"]["samples"], 7);
    let out = kobdyn(&["valiron", "--map", map.to_str().unwrap(), "--samples", "9"], Some(&cfg));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["config"]["samples"], 9);
    assert_eq!(rep["config"]["seed"], 3);

    let out = kobdyn(&["valiron", "--map", map.to_str().unwrap(), "--tol", "-1"], None);
    assert_eq!(out.status.code(), Some(1));

    let output = ws.dir.path().join("out.json");
    let out = kobdyn(&["valiron", "--map", map.to_str().unwrap(), "--output", output.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(output).unwrap()).unwrap();
    assert_eq!(rep["status"], "ok");
}
