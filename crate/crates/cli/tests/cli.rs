//! End-to-end behavior of the `pseudocyl` binary: artifact writing, summary
//! schemas, exit codes, verdict flags, and the output-directory override.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pseudocyl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must spawn")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, got {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout must be valid JSON")
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

// ---------------------------------------------------------------------------
// solve-fowler
// ---------------------------------------------------------------------------

#[test]
fn solve_fowler_writes_artifacts_and_a_complete_summary() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("orbit");
    let out = run(&[
        "solve-fowler",
        "--n",
        "4",
        "--period",
        "6",
        "--out",
        stem.to_str().unwrap(),
    ]);
    let summary = stdout_json(&out);

    assert_eq!(summary["schema_version"], "1");
    assert_eq!(summary["family"], "fowler");
    assert_eq!(summary["n"], 4);
    assert!((summary["T"].as_f64().unwrap() - 6.0).abs() < 1e-8);
    assert!(summary["E"].as_f64().unwrap() < 0.0);
    let u_min = summary["u_min"].as_f64().unwrap();
    let u_max = summary["u_max"].as_f64().unwrap();
    assert!(0.0 < u_min && u_min < u_max);
    assert!(summary["residual_max"].as_f64().unwrap() <= 1e-8);

    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,u,u_prime"));
    let samples = summary["samples"].as_u64().unwrap() as usize;
    assert_eq!(lines.count(), samples);

    let header: Value =
        serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(header["family"], "fowler");
    assert_eq!(header["schema_version"], "1");
}

#[test]
fn below_limit_period_exits_3_citing_the_threshold() {
    let out = run(&["solve-fowler", "--n", "4", "--period", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr_text(&out).contains("4.4428"),
        "the message must cite the threshold: {}",
        stderr_text(&out)
    );
}

#[test]
fn dimension_below_3_exits_2() {
    let out = run(&["solve-fowler", "--n", "2", "--period", "6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = run(&["solve-fowler", "--n", "4", "--period", "6", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// solve-derdzinski
// ---------------------------------------------------------------------------

fn solve_derdzinski_into(dir: &Path) -> std::path::PathBuf {
    let stem = dir.join("warp-orbit");
    let out = run(&[
        "solve-derdzinski",
        "--m",
        "3",
        "--R",
        "6",
        "--C",
        "2",
        "--energy-offset",
        "0.5",
        "--out",
        stem.to_str().unwrap(),
    ]);
    let summary = stdout_json(&out);
    assert_eq!(summary["family"], "derdzinski");
    assert_eq!(summary["m"], 3);
    assert_eq!(summary["R"], 6.0);
    assert_eq!(summary["C"], 2.0);
    stem
}

#[test]
fn solve_derdzinski_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let stem = solve_derdzinski_into(dir.path());
    assert!(stem.with_extension("csv").exists());
    assert!(stem.with_extension("json").exists());
}

#[test]
fn window_boundary_offsets_exit_2() {
    for offset in ["0", "1"] {
        let out = run(&[
            "solve-derdzinski",
            "--m",
            "3",
            "--R",
            "6",
            "--C",
            "2",
            "--energy-offset",
            offset,
        ]);
        assert_eq!(out.status.code(), Some(2), "offset {offset}");
    }
}

#[test]
fn nonpositive_stiffness_exits_2() {
    let out = run(&[
        "solve-derdzinski",
        "--m",
        "3",
        "--R",
        "6",
        "--C",
        "0",
        "--energy-offset",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// period-table
// ---------------------------------------------------------------------------

fn read_table(n: &str, dir: &Path) -> (Value, Vec<(f64, f64)>) {
    let path = dir.join(format!("table-{n}"));
    let out = run(&["period-table", "--n", n, "--out", path.to_str().unwrap()]);
    let summary = stdout_json(&out);
    let csv = std::fs::read_to_string(path.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("E,T"));
    let rows = lines
        .map(|l| {
            let (e, t) = l.split_once(',').unwrap();
            (e.parse().unwrap(), t.parse().unwrap())
        })
        .collect();
    (summary, rows)
}

#[test]
fn period_table_pins_the_limit_and_increases() {
    let dir = tempfile::tempdir().unwrap();
    let (summary, rows) = read_table("4", dir.path());

    let limit = 2.0 * std::f64::consts::PI / 2.0f64.sqrt();
    assert!((summary["limit_period"].as_f64().unwrap() - limit).abs() < 1e-12);
    assert_eq!(rows.len(), 50);
    assert!(
        (rows[0].1 - limit).abs() <= 1e-4,
        "first row {} vs limit {limit}",
        rows[0].1
    );
    for pair in rows.windows(2) {
        assert!(
            pair[0].1 < pair[1].1,
            "period column must increase strictly: {pair:?}"
        );
    }

    let (_, rows3) = read_table("3", dir.path());
    assert!(
        (rows3[0].1 - 2.0 * std::f64::consts::PI).abs() <= 1e-4,
        "n = 3 first row {} vs 2 pi",
        rows3[0].1
    );
}

// ---------------------------------------------------------------------------
// curvature-report
// ---------------------------------------------------------------------------

#[test]
fn cylinder_factor_is_harmonic_and_parallel() {
    let out = run(&["curvature-report", "--factor", "cylinder", "--n", "4"]);
    let verdict = &stdout_json(&out)["verdict"];
    assert_eq!(verdict["harmonic"], true);
    assert_eq!(verdict["parallel"], true);
    assert_eq!(verdict["weyl_flat"], true);
    assert_eq!(verdict["oracle_agreement"], true);
}

#[test]
fn solved_orbit_factor_is_harmonic_but_not_parallel() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("orbit");
    run(&[
        "solve-fowler",
        "--n",
        "4",
        "--period",
        "6",
        "--out",
        stem.to_str().unwrap(),
    ]);
    let out = run(&["curvature-report", "--orbit", stem.to_str().unwrap()]);
    let verdict = &stdout_json(&out)["verdict"];
    assert_eq!(verdict["harmonic"], true);
    assert_eq!(verdict["parallel"], false);
    assert_eq!(verdict["weyl_flat"], true);
    assert_eq!(verdict["oracle_agreement"], true);
}

#[test]
fn sine_factor_is_not_harmonic() {
    let out = run(&["curvature-report", "--factor", "sine", "--n", "4"]);
    let verdict = &stdout_json(&out)["verdict"];
    assert_eq!(verdict["harmonic"], false);
    // The closed forms still match the oracle on a non-solution factor.
    assert_eq!(verdict["oracle_agreement"], true);
}

#[test]
fn missing_orbit_file_exits_7() {
    let out = run(&["curvature-report", "--orbit", "/nonexistent/orbit"]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn warp_equation_orbits_are_rejected_for_reports() {
    let dir = tempfile::tempdir().unwrap();
    let stem = solve_derdzinski_into(dir.path());
    let out = run(&["curvature-report", "--orbit", stem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_text(&out).contains("identification"));
}

// ---------------------------------------------------------------------------
// verify and output plumbing
// ---------------------------------------------------------------------------

#[test]
fn verify_written_report_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let out = run(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    let report = stdout_json(&out);
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 11);
}

#[test]
fn default_artifacts_honor_the_output_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["solve-fowler", "--n", "4", "--period", "6"])
        .env("PSEUDOCYL_OUT_DIR", dir.path())
        .output()
        .expect("binary must spawn");
    assert!(out.status.success(), "{}", stderr_text(&out));
    assert!(dir.path().join("fowler-orbit.csv").exists());
    assert!(dir.path().join("fowler-orbit.json").exists());
}

#[test]
fn csv_format_streams_the_written_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("orbit");
    let out = run(&[
        "solve-fowler",
        "--n",
        "4",
        "--period",
        "6",
        "--format",
        "csv",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let file = std::fs::read(stem.with_extension("csv")).unwrap();
    assert_eq!(out.stdout, file);
}
