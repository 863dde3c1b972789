use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use kernel_entropy::formats::{parse_profile_csv, parse_report_json, profile_csv_string};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernel-entropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn status(args: &[&str]) -> i32 {
    bin(args).status.code().expect("exit code")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("kernel-entropy-it-{}-{name}", std::process::id()))
}

#[test]
fn parse_errors_exit_one() {
    assert_eq!(status(&[]), 1);
    assert_eq!(status(&["frobnicate"]), 1);
    assert_eq!(status(&["entropy", "--family", "bogus", "--n", "2"]), 1);
    assert_eq!(status(&["entropy", "--family", "bernstein", "--n", "two"]), 1);
    assert_eq!(status(&["verify", "--suite", "nonexistent-id"]), 1);
    assert_eq!(status(&["durrmeyer", "--n", "0"]), 1);
    assert_eq!(status(&["multivariate", "--n", "2", "--check", "diagonal"]), 1);
}

#[test]
fn help_and_version_exit_zero() {
    let out = bin(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["entropy", "verify", "durrmeyer", "legendre", "multivariate"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    assert_eq!(status(&["--version"]), 0);
    assert_eq!(status(&["verify", "--help"]), 0);
}

#[test]
fn entropy_to_stdout_puts_the_manifest_on_stderr() {
    let out = bin(&["entropy", "--family", "bernstein", "--n", "2", "--x-min", "0", "--x-max", "1", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows = parse_profile_csv(&csv).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0].point.s, 1.0);
    assert_eq!(profile_csv_string(&rows).unwrap(), csv);
    let manifest: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stderr).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(manifest["command"], "entropy");
    assert_eq!(manifest["config"]["family"], "bernstein");
}

#[test]
fn every_family_produces_a_profile() {
    let cases: &[&[&str]] = &[
        &["--family", "szasz", "--n", "3", "--x-max", "2"],
        &["--family", "baskakov", "--n", "3", "--c", "2"],
        &["--family", "kantorovich", "--n", "3"],
        &["--family", "gauss-weierstrass", "--r", "0.5", "--x-min", "-1"],
        &["--family", "uniform-convolution", "--width", "2"],
        &["--family", "post-widder", "--n", "3", "--x-min", "0.5", "--x-max", "2"],
        &["--family", "durrmeyer", "--n", "3"],
        &["--family", "genuine-bd", "--n", "3"],
    ];
    for case in cases {
        let mut args = vec!["entropy", "--steps", "11"];
        args.extend_from_slice(case);
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(0), "{case:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(parse_profile_csv(&String::from_utf8(out.stdout).unwrap()).unwrap().len(), 11);
    }
    // post-widder needs x > 0
    assert_eq!(status(&["entropy", "--family", "post-widder", "--n", "3"]), 1);
}

#[test]
fn verify_reports_are_deterministic() {
    let (a, b) = (tmp("a.json"), tmp("b.json"));
    let args = |p: &PathBuf| {
        vec![
            "verify".to_string(),
            "--n-max".into(),
            "6".into(),
            "--grid-points".into(),
            "33".into(),
            "-o".into(),
            p.to_str().unwrap().to_string(),
        ]
    };
    let run = |p: &PathBuf| {
        Command::new(env!("CARGO_BIN_EXE_kernel-entropy"))
            .args(args(p))
            .status()
            .unwrap()
            .code()
    };
    assert_eq!(run(&a), Some(0));
    assert_eq!(run(&b), Some(0));
    let (da, db) = (
        parse_report_json(&fs::read_to_string(&a).unwrap()).unwrap(),
        parse_report_json(&fs::read_to_string(&b).unwrap()).unwrap(),
    );
    assert!(da.violations.is_empty());
    let body = |d: &kernel_entropy::formats::ReportDocument| {
        serde_json::to_string(&(&d.violations, &d.findings, &d.grazing, &d.numerical_failures)).unwrap()
    };
    assert_eq!(body(&da), body(&db));
    assert_eq!(da.manifest.config, db.manifest.config);
    let _ = fs::remove_file(&a);
    let _ = fs::remove_file(&b);
}

#[test]
fn legendre_crossover_prints_t_star() {
    let out = bin(&["legendre", "--n", "1", "--crossover"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.091089"));
}
