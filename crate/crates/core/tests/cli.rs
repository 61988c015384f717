use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cech_monopole::cli::{
    ActionCommandReport, CollateReport, ContradictionCommandReport, CoverCommandReport,
    WindingReport,
};
use cech_monopole::cohomology::BettiReport;
use cech_monopole::collation::QuantizationReport;
use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::TempDir;

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    report: String,
    figure: String,
    stderr: String,
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = TempDir::new().unwrap();
    let report: PathBuf = dir.path().join("report.json");
    let figure: PathBuf = dir.path().join("figure.csv");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cech-monopole"));
    cmd.args(args)
        .arg("--output")
        .arg(&report)
        .arg("--figure-data")
        .arg(&figure)
        .env_remove("CECH_MONOPOLE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stderr, .. } = cmd.output().unwrap();
    Run {
        code: status.code().unwrap(),
        report: std::fs::read_to_string(&report).unwrap_or_default(),
        figure: std::fs::read_to_string(&figure).unwrap_or_default(),
        stderr: String::from_utf8_lossy(&stderr).into_owned(),
    }
}

fn run(args: &[&str]) -> Run {
    run_with_env(args, &[])
}

/// Parses a report and checks it serializes back to the same JSON value.
fn reparse<T: DeserializeOwned + Serialize>(json: &str) -> T {
    let value: T = serde_json::from_str(json).unwrap();
    let original: serde_json::Value = serde_json::from_str(json).unwrap();
    assert_eq!(serde_json::to_value(&value).unwrap(), original);
    value
}

#[test]
fn quantize_passes_at_half() {
    let r = run(&[
        "quantize",
        "--cover",
        &data("three_caps.json"),
        "-G",
        "0.5",
        "-q",
        "1",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: QuantizationReport = reparse(&r.report);
    assert_eq!(report.sum_epsilon, 1);
    assert!(r.figure.starts_with("simplex,component,theta,phi,eta\n"));
}

#[test]
fn quantize_fails_at_point_three_and_still_writes_the_report() {
    let r = run(&["quantize", "-G", "0.3", "-q", "1"]);
    assert_eq!(r.code, 1);
    let report: QuantizationReport = reparse(&r.report);
    assert!((report.max_residual - 0.2).abs() < 1e-6);
}

#[test]
fn cohomology_of_the_tetrahedral_cover() {
    let r = run(&["cohomology", "--cover", &data("tetra.json")]);
    assert_eq!(r.code, 0);
    let report: BettiReport = reparse(&r.report);
    assert_eq!(report.betti, vec![1, 0, 1]);
    assert!(r.report.contains("\"torsion\""));
    let r = run(&[
        "cohomology",
        "--cover",
        &data("three_caps.json"),
        "--coefficients",
        "R",
    ]);
    let report: BettiReport = reparse(&r.report);
    assert_eq!(report.betti, vec![1, 0, 0]);
    assert!(!report.warnings.is_empty());
}

#[test]
fn every_report_round_trips() {
    let r = run(&["cover", "--cover", "wu-yang", "--samples", "50000"]);
    assert_eq!(r.code, 0);
    reparse::<CoverCommandReport>(&r.report);
    let r = run(&["collate", "-G", "1", "--samples", "100000"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c: CollateReport = reparse(&r.report);
    assert!(c.flux_error < 1e-6 && c.linearity_error < 1e-6);
    let r = run(&["winding", "-G", "-1.5"]);
    assert_eq!(r.code, 0);
    assert_eq!(reparse::<WindingReport>(&r.report).winding, -3);
    let r = run(&["demo-contradiction", "-G", "0.5"]);
    assert_eq!(r.code, 0);
    reparse::<ContradictionCommandReport>(&r.report);
    let r = run(&[
        "action",
        "--worldline",
        &data("equator.json"),
        "-G",
        "0.5",
        "--trials",
        "20",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let a: ActionCommandReport = reparse(&r.report);
    assert_eq!(a.sweep.trials.len(), 20);
}

#[test]
fn action_fails_when_not_quantized() {
    let r = run(&["action", "--worldline", &data("equator.json"), "-G", "0.3"]);
    assert_eq!(r.code, 1);
    let a: ActionCommandReport = reparse(&r.report);
    assert!(a.sweep.max_phase_deviation > 0.1);
}

#[test]
fn zero_trials_give_a_header_only_figure() {
    let r = run(&[
        "action",
        "--worldline",
        &data("equator.json"),
        "--trials",
        "0",
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.figure.lines().count(), 1);
}

#[test]
fn winding_figure_ends_at_two_pi_n() {
    let r = run(&["winding", "-G", "1"]);
    let last = r.figure.lines().last().unwrap();
    let qg: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((qg - 4.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"patches": [{"center": [0, 0, 1]}]}"#).unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec![
            "quantize".into(),
            "--cover".into(),
            bad.to_string_lossy().into_owned(),
        ],
        vec![
            "quantize".into(),
            "--cover".into(),
            "/no/such/file.json".into(),
        ],
        vec!["quantize".into(), "--tolerance".into(), "0".into()],
        vec!["quantize".into(), "-q".into(), "0".into()],
        vec!["frobnicate".into()],
        vec!["action".into()],
        vec![
            "cohomology".into(),
            "--cover".into(),
            "three-caps".into(),
            "--coefficients".into(),
            "Q".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
    let r = run_with_env(
        &["demo-contradiction"],
        &[("CECH_MONOPOLE_THREADS", "many")],
    );
    assert_eq!(r.code, 2);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "quantize",
        "-G",
        "1.5",
        "--seed",
        "3",
        "--samples",
        "100000",
    ];
    let a = run_with_env(&args, &[("CECH_MONOPOLE_THREADS", "1")]);
    let b = run_with_env(&args, &[("CECH_MONOPOLE_THREADS", "4")]);
    assert_eq!(a.code, 0);
    assert_eq!(a.report, b.report);
    assert_eq!(a.figure, b.figure);
    let args = [
        "action",
        "--worldline",
        &data("equator.json"),
        "-G",
        "0.3",
        "--trials",
        "30",
        "--seed",
        "5",
    ];
    let (a, b) = (
        run(&args),
        run_with_env(&args, &[("CECH_MONOPOLE_THREADS", "2")]),
    );
    assert_eq!(a.report, b.report);
}
