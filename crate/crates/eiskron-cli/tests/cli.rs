//! End-to-end tests of the binary surface: JSON shapes, exit codes,
//! determinism of reports and tables, and the frozen smoke value.

use std::process::{Command, Output};

fn eiskron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eiskron"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn eval_theta_produces_one_value() {
    let out = eiskron(&["eval", "theta", "--z", "0.3+0.1i", "--tau", "2i"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["function"], "theta");
    assert!(v["value"]["re"].is_f64());
    assert!(v["value"]["im"].is_f64());
}

#[test]
fn eval_f_matches_golden_file() {
    let out = eiskron(&[
        "eval", "F", "--k", "4", "--a", "1", "--b", "0", "--N", "4", "--tau", "2i",
    ]);
    assert!(out.status.success());
    let golden = include_str!("golden/eval_f.json");
    assert_eq!(stdout(&out), golden, "smoke value drifted from the golden file");
    let v: serde_json::Value = serde_json::from_str(golden).unwrap();
    assert_eq!(v["route"], "lattice");
}

#[test]
fn eval_df_passes_through_modular_df() {
    let out = eiskron(&[
        "eval", "DF", "--k", "2", "--a", "1", "--b", "0", "--N", "4", "--D", "3", "--tau", "2i",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["route"], "wp");
    assert!(v["value"]["re"].is_f64());
}

#[test]
fn eval_rejects_unknown_function_and_bad_literals() {
    let out = eiskron(&["eval", "nope", "--tau", "2i"]);
    assert!(!out.status.success());
    let out = eiskron(&["eval", "theta", "--z", "1 + 2i", "--tau", "2i"]);
    assert!(!out.status.success());
    // tau must lie in the upper half plane
    let out = eiskron(&["eval", "theta", "--z", "0.1i", "--tau", "-2i"]);
    assert!(!out.status.success());
}

#[test]
fn verify_legendre_passes_with_schema() {
    let out = eiskron(&["verify", "legendre"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["suite"], "legendre");
    assert!(v["config_hash"].is_string());
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert!(c["name"].is_string());
        assert!(c["max_error"].is_f64());
        assert!(c["tolerance"].is_f64());
        assert_eq!(c["passed"], true);
    }
    // checks are ordered by name
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn verify_reports_are_deterministic() {
    let a = eiskron(&["verify", "automorphy-cocycle", "--seed", "5"]);
    let b = eiskron(&["verify", "automorphy-cocycle", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b), "reports must be byte-identical");
    let c = eiskron(&["verify", "automorphy-cocycle", "--seed", "6"]);
    let va: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let vc: serde_json::Value = serde_json::from_str(&stdout(&c)).unwrap();
    assert_ne!(va["config_hash"], vc["config_hash"]);
}

#[test]
fn verify_unknown_suite_fails() {
    let out = eiskron(&["verify", "no-such-suite"]);
    assert!(!out.status.success());
}

#[test]
fn verify_exit_status_reflects_failing_checks() {
    // grossly loosened truncation target makes the series too short for the
    // pinned tolerances; the report must show failures and exit nonzero
    let out = eiskron(&["verify", "legendre", "--q-tail-eps", "1e-2"]);
    assert!(!out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["passed"] == false));
}

#[test]
fn precision_flags_are_validated() {
    let out = eiskron(&[
        "eval", "theta", "--z", "0.1i", "--tau", "2i", "--quad-points", "100",
    ]);
    assert!(!out.status.success(), "non power-of-two node count must be rejected");
}

#[test]
fn table_has_contracted_row_count_and_is_deterministic() {
    let dir = std::env::temp_dir().join("eiskron-table-test");
    std::fs::create_dir_all(&dir).unwrap();
    let p1 = dir.join("t1.csv");
    let p2 = dir.join("t2.csv");
    for p in [&p1, &p2] {
        let out = eiskron(&[
            "table", "F", "--k", "3", "--N", "3", "--a", "1", "--b", "0",
            "--tau-im-start", "1", "--tau-im-end", "5", "--steps", "5",
            "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let b1 = std::fs::read(&p1).unwrap();
    let b2 = std::fs::read(&p2).unwrap();
    assert_eq!(b1, b2, "reruns with equal config must be byte-identical");
    let text = String::from_utf8(b1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# eiskron"));
    assert!(lines[0].contains("config="));
    assert!(lines[0].contains("q_tail_eps="));
    assert_eq!(lines[1], "tau_re,tau_im,value_re,value_im");
    assert_eq!(lines.len(), 2 + 5, "five data rows");
}

#[test]
fn table_eis_class_column_equals_f3() {
    // degree 1 class coefficient is N^0 F^(3)
    let a = eiskron(&[
        "table", "eis_class", "--n", "1", "--N", "4", "--a", "1", "--b", "1",
        "--tau-im-start", "1", "--tau-im-end", "3", "--steps", "3", "--format", "json",
    ]);
    let b = eiskron(&[
        "table", "F", "--k", "3", "--N", "4", "--a", "1", "--b", "1",
        "--tau-im-start", "1", "--tau-im-end", "3", "--steps", "3", "--format", "json",
    ]);
    assert!(a.status.success() && b.status.success());
    let va: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let vb: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    let ra = va["rows"].as_array().unwrap();
    let rb = vb["rows"].as_array().unwrap();
    assert_eq!(ra.len(), rb.len());
    for (x, y) in ra.iter().zip(rb.iter()) {
        let dx = (x["value_re"].as_f64().unwrap() - y["value_re"].as_f64().unwrap()).abs();
        let dy = (x["value_im"].as_f64().unwrap() - y["value_im"].as_f64().unwrap()).abs();
        assert!(dx < 1e-12 && dy < 1e-12);
    }
}
