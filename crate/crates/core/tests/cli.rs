use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rtn-entangle"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn coherence_without_coupling_is_one() {
    let out = run(
        &["coherence", "--config", "-"],
        r#"{"qubit_a": {"v": 0, "omega": 0}, "grid": {"t_max": 3, "n_points": 4}}"#,
    );
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["gamma_t", "re_q", "im_q", "abs_q"]);
    assert!(rows.iter().all(|r| r[3] == "1"));
}

#[test]
fn strong_coupling_coherence_crosses_zero() {
    let out = run(
        &["coherence", "--config", "-", "--format", "json"],
        r#"{"qubit_a": {"v": 5}, "grid": {"t_max": 6, "n_points": 601}}"#,
    );
    let v = json(&out);
    let re: Vec<f64> = v["re_q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(re.iter().any(|&x| x < 0.0));
    let abs: Vec<f64> = v["abs_q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(
        abs.windows(2).any(|w| w[1] > w[0]),
        "modulus should be non-monotone"
    );
}

#[test]
fn header_echo_repeats_exactly() {
    let cfg = r#"{"qubit_a": {"v": 0.3, "delta_p0": 0.2}, "grid": {"t_max": 2, "n_points": 3}}"#;
    let a = stdout(&run(&["coherence", "--config", "-"], cfg));
    let b = stdout(&run(&["coherence", "--config", "-"], cfg));
    assert!(a.starts_with("# {\"command\":\"coherence\""));
    assert_eq!(a.lines().next(), b.lines().next());
}

#[test]
fn fig1a_preset_starts_at_initial_concurrence() {
    let (header, rows) = csv_rows(&stdout(&run(&["concurrence", "--preset", "fig1a"], "")));
    assert_eq!(header, ["gamma_t", "c_dp0=0", "c_dp0=pm1"]);
    assert_eq!(rows[0], ["0", "0.865", "0.865"]);
}

#[test]
fn fig3b_inset_has_three_curves() {
    let (header, _) = csv_rows(&stdout(&run(
        &["concurrence", "--preset", "fig3b-inset"],
        "",
    )));
    assert_eq!(
        header,
        ["gamma_t", "c_gA=1.1_gB=5", "c_gA=5_gB=5", "c_gA=10_gB=5"]
    );
}

#[test]
fn concurrence_starts_at_its_initial_value() {
    let cfg = r#"{"qubit_a": {"v": 2}, "qubit_b": {"v": 0.4}, "state": {"family": "two_excitation", "r": 0.8, "a_mod": 0.6}}"#;
    let (header, rows) = csv_rows(&stdout(&run(&["concurrence", "--config", "-"], cfg)));
    assert_eq!(header, ["gamma_t", "concurrence"]);
    let c0 = rtn_entangle::initial_concurrence(0.8, 0.6).unwrap();
    assert!((rows[0][1].parse::<f64>().unwrap() - c0).abs() < 1e-12);
}

#[test]
fn pure_state_has_no_sudden_death() {
    let cfg = r#"{"qubit_a": {"v": 0.5}, "state": {"family": "one_excitation", "r": 1, "a_mod": 0.7071067811865476}}"#;
    let v = json(&run(&["events", "--config", "-", "--format", "json"], cfg));
    assert!(v["curves"][0]["events"]["esd_time"].is_null());
    assert!(v["curves"][0]["esd_time_numeric"].is_null());
}

#[test]
fn weak_coupling_esd_matches_estimate() {
    let v = json(&run(
        &["events", "--config", "-", "--format", "json"],
        r#"{"qubit_a": {"v": 0.1}}"#,
    ));
    let c = &v["curves"][0];
    let numeric = c["esd_time_numeric"].as_f64().unwrap();
    assert!((numeric - 600.0).abs() < 10.0, "{numeric}");
    assert!(c["esd_rel_diff"].as_f64().unwrap() < 0.05);
}

#[test]
fn strong_coupling_events() {
    let v = json(&run(
        &["events", "--config", "-", "--format", "json"],
        r#"{"qubit_a": {"v": 5}}"#,
    ));
    let e = &v["curves"][0]["events"];
    assert!(!e["revivals"].as_array().unwrap().is_empty());
    assert!(e["final_death_time"].as_f64().unwrap() < 5.0);
}

#[test]
fn threshold_at_pure_state_is_one() {
    let cfg = r#"{"qubit_a": {"v": 1}, "threshold": {"r": 1.0}}"#;
    let v = json(&run(
        &["threshold", "--config", "-", "--format", "json"],
        cfg,
    ));
    let g = v["results"][0]["result"]["g_th"].as_f64().unwrap();
    assert!((g - 1.0).abs() < 0.02, "{g}");
}

#[test]
fn threshold_bracket_failure_is_reported() {
    let cfg = r#"{"qubit_a": {"v": 1}, "threshold": {"r": 0.91, "search": {"bracket": [3, 8]}}}"#;
    let out = run(&["threshold", "--config", "-"], cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bracket"));
}

#[test]
fn threshold_curve_rises_toward_low_mixing() {
    let (_, rows) = csv_rows(&stdout(&run(&["threshold", "--preset", "fig1b"], "")));
    let g: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(rows.first().unwrap()[0], "0.6");
    assert!(g.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn sweep_rows_follow_the_grid() {
    let cfg = r#"{"qubit_a": {"v": 1}, "sweep": {"g_a": [0.2, 0.6], "r": [0.91], "a_mod": [0.7071067811865476], "delta_p0_a": [0]}}"#;
    let (header, rows) = csv_rows(&stdout(&run(&["sweep", "--config", "-"], cfg)));
    assert_eq!(header[0], "index");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][1], "0.6");
    let out = run(&["sweep", "--config", "-"], r#"{"qubit_a": {"v": 1}}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_validate_passes_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mc.csv");
    let cfg = r#"{"qubit_a": {"v": 0.5}, "grid": {"t_max": 10, "n_points": 41}, "mc": {"n_trajectories": 100000, "seed": 3}}"#;
    let out = run(
        &[
            "mc-validate",
            "--config",
            "-",
            "--out",
            path.to_str().unwrap(),
        ],
        cfg,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let (header, rows) = csv_rows(&text);
    assert_eq!(
        header,
        ["gamma_t", "abs_mean", "std_err", "abs_q", "z", "pass"]
    );
    assert_eq!(rows.len(), 41);
    assert_eq!(
        std::fs::read_dir(dir.path()).unwrap().count(),
        1,
        "temporary file left behind"
    );
}

#[test]
fn mc_validate_without_coupling_has_zero_z() {
    let cfg = r#"{"qubit_a": {"v": 0}, "grid": {"t_max": 5, "n_points": 6}, "mc": {"n_trajectories": 100}}"#;
    let v = json(&run(
        &["mc-validate", "--config", "-", "--format", "json"],
        cfg,
    ));
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["z"] == 0.0));
}

#[test]
fn doubled_flip_rate_fails_validation() {
    let cfg = r#"{"qubit_a": {"v": 0.5}, "grid": {"t_max": 10, "n_points": 41}, "mc": {"n_trajectories": 20000}}"#;
    let out = run(
        &["mc-validate", "--config", "-", "--flip-rate-scale", "2"],
        cfg,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_flag_changes_the_estimate() {
    let cfg = r#"{"qubit_a": {"v": 0.5}, "grid": {"t_max": 4, "n_points": 5}, "mc": {"n_trajectories": 1000}}"#;
    let a = stdout(&run(&["mc-validate", "--config", "-", "--seed", "1"], cfg));
    let b = stdout(&run(&["mc-validate", "--config", "-", "--seed", "2"], cfg));
    let c = stdout(&run(&["mc-validate", "--config", "-", "--seed", "1"], cfg));
    let data = |s: &str| s.lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_ne!(data(&a), data(&b));
    assert_eq!(a, c);
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: [(&[&str], &str); 6] = [
        (
            &["coherence", "--config", "-"],
            r#"{"qubit_a": {"v": 1, "bogus": 0}}"#,
        ),
        (
            &["coherence", "--config", "-"],
            r#"{"qubit_a": {"v": 1}, "grid": {"t_max": 0, "n_points": 10}}"#,
        ),
        (
            &["coherence", "--config", "-"],
            r#"{"qubit_a": {"v": 1}, "mc": {"n_trajectories": 10}}"#,
        ),
        (
            &["mc-validate", "--config", "-"],
            r#"{"qubit_a": {"v": 1}}"#,
        ),
        (&["coherence", "--config", "/nonexistent/cfg.json"], ""),
        (&["coherence"], ""),
    ];
    for (args, input) in cases {
        let out = run(args, input);
        assert_eq!(out.status.code(), Some(2), "{args:?} {input}");
        assert!(!out.stderr.is_empty());
    }
    let out = run(
        &[
            "coherence",
            "--preset",
            "fig1a",
            "--out",
            "/nonexistent/dir/out.csv",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
}
