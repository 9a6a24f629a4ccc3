use std::process::{Command, Output};

use serde_json::Value;

fn dochar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dochar")).args(args).output().expect("failed to launch dochar")
}

fn json(args: &[&str]) -> Value {
    let out = dochar(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

#[test]
fn missing_k_is_a_usage_error() {
    let out = dochar(&["classify", "--a0", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));
}

#[test]
fn inverted_window_is_rejected() {
    let out = dochar(&["spectrum", "--family", "B", "--k", "2", "--z", "0", "--eps", "0", "--window", "10,-0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_for_classify_is_rejected() {
    let out = dochar(&["--format", "csv", "classify", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(dochar(&["--help"]).status.code(), Some(0));
}

#[test]
fn classify_examples() {
    let v = json(&["classify", "--k", "1", "--a0", "3", "--flat"]);
    assert_eq!(v["solvable"], false);
    assert_eq!(v["rule"], "FlatExceptional");
    assert_eq!(v["exceptional_set_used"], "odd_integers");
    assert_eq!(v["config"]["model"]["k"], 1);

    let v = json(&["classify", "--k", "4", "--a0", "5", "--flat"]);
    assert_eq!(v["solvable"], true);
    assert_eq!(v["rule"], "Subelliptic");
}

#[test]
fn harmonic_spectrum() {
    let v = json(&["spectrum", "--family", "B", "--k", "2", "--z", "0", "--eps", "0", "--a0", "1", "--window", "-0.5,10"]);
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert_eq!(eig.len(), 6);
    for (i, e) in eig.iter().enumerate() {
        assert!((e - 2.0 * i as f64).abs() < 1e-7, "level {i}: {e}");
    }
    assert_eq!(v["converged"], true);
}

#[test]
fn spectrum_csv_lists_levels() {
    let out = dochar(&[
        "--format", "csv", "spectrum", "--family", "B", "--k", "2", "--z", "0", "--eps", "0", "--window", "-0.5,5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,eigenvalue");
    assert_eq!(lines.len(), 4);
}

#[test]
fn exact_second_order_shifts() {
    let v = json(&["perturb", "--k", "3", "--n", "1", "--exact"]);
    assert_eq!(v["lambda1"], "0");
    assert_eq!(v["lambda2"], "2");
    assert_eq!(v["matches_closed_form"], true);

    let v = json(&["perturb", "--k", "1", "--n", "4", "--exact"]);
    assert_eq!(v["lambda2"], "0");
}

#[test]
fn fitted_second_order_shift() {
    let v = json(&["perturb", "--k", "2", "--n", "1", "--fit", "0.02,0.04,0.08"]);
    let c2 = v["c2"].as_f64().unwrap();
    assert!((0.98..=1.02).contains(&c2), "c2 = {c2}");
}

#[test]
fn map_is_deterministic_for_a_seed() {
    let args = ["map", "--k", "1", "--a0", "1", "--coeffs", "0,0,1", "--region", "C", "--q", "8..10", "--samples", "32"];
    let run = |seed: &str| {
        let mut a = vec!["--seed", seed];
        a.extend_from_slice(&args);
        let out = dochar(&a);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("7"), run("7"));
}

#[test]
fn map_csv_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = dochar(&[
        "--seed", "7", "--format", "csv", "--output", path.to_str().unwrap(),
        "map", "--k", "1", "--a0", "1", "--coeffs", "0,0,1", "--region", "C", "--q", "8..10", "--samples", "32",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let got = std::fs::read_to_string(&path).unwrap();
    let want = include_str!("golden/map_k1_c.csv");
    assert_eq!(got, want);
}

#[test]
fn config_file_supplies_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, r#"{"k": 3, "a0": -1.0, "coeff_kind": "flat"}"#).unwrap();
    let v = json(&["--config", path.to_str().unwrap(), "classify"]);
    assert_eq!(v["solvable"], false);
    assert_eq!(v["config"]["model"]["k"], 3);

    let v = json(&["--config", path.to_str().unwrap(), "classify", "--a0", "2"]);
    assert_eq!(v["solvable"], true);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, r#"{"k": 3, "bogus": 1}"#).unwrap();
    let out = dochar(&["--config", path.to_str().unwrap(), "classify"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn probe_budget_maps_to_exit_two() {
    let out = dochar(&["witness", "--k", "2", "--a0", "1", "--flat", "--lambdas", "16,512"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn l2_witness_reports_exponents() {
    let v = json(&["witness", "--k", "3", "--a0", "1", "--coeffs", "0,0,0,0,1", "--l2", "--lambdas", "2,4,8"]);
    let r = v["ratio_exponent"].as_f64().unwrap();
    assert!(r < -1.5, "ratio exponent {r}");
}
