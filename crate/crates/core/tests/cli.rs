use std::process::{Command, Output};

fn cosource(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosource"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("run.json");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "{\"distribution\": ");
    let out = cosource(&["--config", &path, "compare"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn unknown_fields_and_bad_values_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{"distribution": {"kind": "uniform", "lo": 1, "hi": 2}, "colour": 1}"#,
    );
    assert_eq!(cosource(&["--config", &path, "compare"]).status.code(), Some(2));
    let bad = r#"{"kind": "uniform", "lo": 5, "hi": 1}"#;
    assert_eq!(cosource(&["--distribution", bad, "solve-exact"]).status.code(), Some(2));
    assert_eq!(
        cosource(&["--config", "/nonexistent/run.json", "compare"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cosource(&["reproduce-table", "table9"]).status.code(), Some(2));
    assert_eq!(
        cosource(&[
            "--gamma",
            "0",
            "--distribution",
            r#"{"kind":"degenerate","value":3}"#,
            "solve-exact"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn newsvendor_policy_as_json() {
    let out = cosource(&[
        "--distribution",
        r#"{"kind":"uniform","lo":90,"hi":110}"#,
        "policy",
        "--kind",
        "nv",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["N"], 108);
    assert_eq!(v["kind"], "nv");
    assert_eq!(v["routing"], "optimal-per-realization");
}

#[test]
fn solve_exact_summary_and_curve() {
    let dist = r#"{"kind":"uniform","lo":90,"hi":110}"#;
    let out = cosource(&["--distribution", dist, "solve-exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("label,lambda,n_opt,c_opt,n_max,regime,boundary_flag")
    );
    assert_eq!(
        lines.next(),
        Some("\"U[90,110]\",100,121,12.7131,173,co-sourcing,false")
    );

    let out = cosource(&["--distribution", dist, "--n-max", "130", "solve-exact", "--curve"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("N,expected_cost"));
    assert_eq!(text.lines().count(), 132);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("beta.csv");
    let out = cosource(&["reproduce-table", "ec-beta", "-o", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert_eq!(text.lines().next(), Some("c,beta_low,beta_mid,beta_high"));
    assert_eq!(text.lines().nth(3), Some("0.1,2.1109,4.6235,7.6149"));
}

#[test]
fn figure7_grid_from_flags_and_empty_grid() {
    let dist = r#"{"kind":"uniform","lo":20,"hi":780}"#;
    let out = cosource(&[
        "--distribution",
        dist,
        "figure7",
        "--n-from",
        "400",
        "--n-to",
        "420",
        "--n-step",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("N,exact,approx,difference"));
    assert_eq!(text.lines().count(), 4);
    let out = cosource(&["--distribution", dist, "figure7", "--n-from", "420", "--n-to", "400"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{"simulate": {"servers": 4, "rate": 3.5, "threshold": 6, "horizon": 3000}}"#,
    );
    let a = cosource(&["--config", &path, "simulate", "--seed", "11"]);
    let b = cosource(&["--config", &path, "simulate", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["config"]["seed"], 11);
    assert_eq!(v["config"]["warmup"], 300.0);
    assert!(v["estimate"]["z"]["half_width"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_without_section_is_a_config_error() {
    let out = cosource(&["--distribution", r#"{"kind":"degenerate","value":5}"#, "simulate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_quotes_labels_and_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        r#"{"scenarios": [
            {"distribution": {"kind": "uniform", "lo": 10, "hi": 190}},
            {"label": "flat", "distribution": {"kind": "degenerate", "value": 100}, "costs": {"c": 0.2}}
        ]}"#,
    );
    let out = cosource(&["--config", &path, "compare"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("\"U[10,190]\",178,"));
    assert!(rows[2].starts_with("flat,"));
}
