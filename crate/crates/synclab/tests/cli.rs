//! Black-box checks of the binary: exit codes, output shape, and the
//! documented flag/env-var behavior.

use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_synclab"));
    cmd.env_remove("SYNCLAB_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn spectrum_happy_path() {
    let out = run(&["spectrum", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("5.00000000000e-1"));
    assert!(text.contains("2.50000000000e-1"));
    assert!(text.contains("block dimensions: 1 2 1"));
    assert!(text.contains("spectrum: PASS"));
}

#[test]
fn spectrum_rejects_trivial_clock() {
    let out = run(&["spectrum", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n must be >= 2"));
}

#[test]
fn spectrum_n12_is_fast() {
    let start = Instant::now();
    let out = run(&["spectrum", "--n", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert!(stdout(&out).contains("spectrum: PASS"));
}

#[test]
fn protocol_audit_passes() {
    let out = run(&["protocol", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for label in ["initial", "alice-conditional", "bob-conditional", "time-forgotten"] {
        assert!(text.contains(label), "missing stage {label}");
    }
    assert!(text.contains("audit: PASS"));
}

#[test]
fn bounds_reports_both_inequalities() {
    let out = run(&["bounds", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("dE = 2.00000000000e0"));
    assert!(text.contains("theorem1:"));
    assert!(text.contains("HOLDS"));
    assert!(text.contains("lemma1: N/A (dt > T/12)"));
}

#[test]
fn bounds_control_product_is_unsynchronized() {
    let out = run(&["bounds", "--n", "2", "--control-product"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("derivative norm = 0.00000000000e0"));
    assert!(text.contains("T/sqrt(12)"));
}

#[test]
fn discord_holds_and_prints_basis() {
    let out = run(&["discord", "--n", "2", "--restarts", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("delta(B|A) = 2.157615543"));
    assert!(text.contains("theorem2: min delta >="));
    assert!(text.contains("HOLDS"));
    assert!(text.contains("u0 = ("));
}

#[test]
fn restarts_must_be_positive() {
    let out = run(&["discord", "--n", "2", "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("restarts must be >= 1"));

    let out = run(&["sweep", "--n-min", "2", "--n-max", "3", "--restarts", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discord_grid_needs_a_qubit() {
    let out = run(&["discord", "--n", "3", "--grid", "--restarts", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn sweep_row_count_and_header() {
    let out = run(&["sweep", "--n-min", "2", "--n-max", "8", "--restarts", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8, "header + 7 data rows");
    assert_eq!(lines[0], synclab::cli::CSV_HEADER);
    for (line, n) in lines[1..].iter().zip(2..) {
        assert!(line.starts_with(&format!("{n},")));
    }
}

#[test]
fn sweep_rejects_bad_range() {
    let out = run(&["sweep", "--n-min", "1", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n-min must be >= 2"));
}

#[test]
fn sweep_writes_file_or_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(&[
        "sweep",
        "--n-min",
        "2",
        "--n-max",
        "3",
        "--restarts",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with(synclab::cli::CSV_HEADER));
    assert_eq!(written.lines().count(), 3);

    let bad = run(&[
        "sweep",
        "--n-min",
        "2",
        "--n-max",
        "2",
        "--out",
        "/nonexistent-dir/report.csv",
    ]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("cannot write"));
}

#[test]
fn selftest_prints_suite_lines() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("qmat / pinsker: 100 checks PASS"));
    assert!(text.contains("discord / deficit-decomposition:"));
    assert!(text.contains("selftest: PASS"));
}

#[test]
fn thread_flag_and_env_validation() {
    let out = run(&["spectrum", "--n", "2", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["spectrum", "--n", "2"])
        .env("SYNCLAB_THREADS", "notanumber")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("SYNCLAB_THREADS"));

    let out = bin()
        .args(["spectrum", "--n", "2"])
        .env("SYNCLAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn help_and_unknown_flags() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in ["spectrum", "protocol", "bounds", "discord", "sweep", "selftest"] {
        assert!(stdout(&out).contains(sub));
    }

    let out = run(&["spectrum", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discord_output_is_seed_stable() {
    let args = ["discord", "--n", "2", "--restarts", "4", "--seed", "13"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
