//! End-to-end runs of the `rkverify` binary: exit codes, report files,
//! determinism, config precedence.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rkverify"));
    // Keep the ambient environment from leaking a seed into the tests.
    c.env_remove("RK_SEED");
    c
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn check(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn appendix_run_is_deterministic_and_passes() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = bin()
            .args(["verify", "appendix", "--samples", "20", "--seed", "7", "--out"])
            .arg(d.path())
            .output()
            .unwrap();
        check(&out, 0);
    }
    let r1 = std::fs::read(d1.path().join("report.jsonl")).unwrap();
    let r2 = std::fs::read(d2.path().join("report.jsonl")).unwrap();
    assert_eq!(r1, r2, "same config must produce byte-identical reports");

    let text = String::from_utf8(r1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 160, "8 identities x 20 draws");
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["kind"], "identity");
        assert_eq!(v["pass"], true, "failing draw: {line}");
        assert!(v["lhs"]["re"].is_f64(), "complex fields are re/im objects");
    }

    let s: serde_json::Value =
        serde_json::from_str(&read(&d1.path().join("summary.json"))).unwrap();
    assert_eq!(s["records"], 160);
    assert_eq!(s["failed"], 0);
    assert_eq!(s["all_pass"], true);
    assert_eq!(s["seed"], 7);
}

#[test]
fn injected_failure_exits_1_but_still_writes_reports() {
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify",
            "appendix",
            "--samples",
            "1",
            "--seed",
            "7",
            "--tol",
            "a1_mellin_spherical=1e-30",
            "--out",
        ])
        .arg(d.path())
        .output()
        .unwrap();
    check(&out, 1);
    let text = read(&d.path().join("report.jsonl"));
    assert_eq!(text.lines().count(), 8, "reports flushed despite the failure");
    let s: serde_json::Value = serde_json::from_str(&read(&d.path().join("summary.json"))).unwrap();
    assert!(s["failed"].as_u64().unwrap() >= 1);
    assert_eq!(s["all_pass"], false);
    // serde_json's fast float parse can be a ULP off, so compare loosely
    let tol = s["tol_overrides"]["a1_mellin_spherical"].as_f64().unwrap();
    assert!((tol / 1e-30 - 1.0).abs() < 1e-9, "logged override {tol}");
}

#[test]
fn config_errors_exit_2_without_reports() {
    let d = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["verify", "appendix", "--tol", "nosuch=1e-6"],
        &["verify", "appendix", "--samples", "0"],
        &["verify", "appendix", "--config", "/nonexistent/rk.conf"],
        &["verify", "nosuch"],
        &["sweep", "bump", "--t-values", "8"],
        &["sweep", "bump", "--t-values", "2,8"],
    ];
    for args in cases {
        let out = bin()
            .args(*args)
            .args(["--out"])
            .arg(d.path())
            .output()
            .unwrap();
        check(&out, 2);
    }
    assert!(
        !d.path().join("report.jsonl").exists(),
        "config errors must be rejected before any work"
    );
}

#[test]
fn rk_seed_env_is_a_fallback_below_the_flag() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let d3 = tempfile::tempdir().unwrap();

    let out = bin()
        .args(["verify", "reciprocity", "--samples", "5", "--out"])
        .arg(d1.path())
        .env("RK_SEED", "123")
        .output()
        .unwrap();
    check(&out, 0);
    let out = bin()
        .args(["verify", "reciprocity", "--samples", "5", "--seed", "123", "--out"])
        .arg(d2.path())
        .output()
        .unwrap();
    check(&out, 0);
    let r1 = std::fs::read(d1.path().join("report.jsonl")).unwrap();
    let r2 = std::fs::read(d2.path().join("report.jsonl")).unwrap();
    assert_eq!(r1, r2, "RK_SEED=123 must match --seed 123");

    let out = bin()
        .args(["verify", "reciprocity", "--samples", "5", "--seed", "5", "--out"])
        .arg(d3.path())
        .env("RK_SEED", "123")
        .output()
        .unwrap();
    check(&out, 0);
    let r3 = std::fs::read(d3.path().join("report.jsonl")).unwrap();
    assert_ne!(r1, r3, "an explicit --seed wins over RK_SEED");

    let out = bin()
        .args(["verify", "reciprocity", "--samples", "5"])
        .env("RK_SEED", "notanumber")
        .output()
        .unwrap();
    check(&out, 2);
}

#[test]
fn csv_headers_match_the_printed_schema() {
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify",
            "reciprocity",
            "--samples",
            "5",
            "--format",
            "csv",
            "--out",
        ])
        .arg(d.path())
        .output()
        .unwrap();
    check(&out, 0);
    assert!(
        stdout(&out).contains("constancy spread"),
        "spread line missing from stdout: {}",
        stdout(&out)
    );

    let csv = read(&d.path().join("reciprocity.csv"));
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "index,lambda1_im,lambda2_im,lambda3_im,tau_im,t,value,rel_dev,pass"
    );
    assert_eq!(csv.lines().count(), 6, "header plus five rows");

    let schema = bin().args(["schema"]).output().unwrap();
    check(&schema, 0);
    assert!(
        stdout(&schema).contains(header),
        "schema output must list the exact csv header"
    );
}

#[test]
fn bump_sweep_recovers_the_decay_slope() {
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep", "bump", "--t-values", "8,16", "--out"])
        .arg(d.path())
        .output()
        .unwrap();
    check(&out, 0);

    let csv = read(&d.path().join("bump.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "family,t,abs_value,scaled_value");
    assert_eq!(lines.count(), 4, "two families x two scales");

    let s: serde_json::Value = serde_json::from_str(&read(&d.path().join("summary.json"))).unwrap();
    for key in ["bump_slope_origin", "bump_slope_scaled"] {
        let slope = s[key].as_f64().unwrap();
        assert!(
            (slope + 1.5).abs() <= 0.1,
            "{key} = {slope}, expected -3/2 within 0.1"
        );
    }
}

#[test]
fn config_file_applies_with_flag_precedence() {
    let d0 = tempfile::tempdir().unwrap();
    let conf = d0.path().join("run.conf");
    std::fs::write(&conf, "# sweep settings\nseed=9\nsamples=4\nformat=csv\n").unwrap();

    let d1 = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "reciprocity", "--config"])
        .arg(&conf)
        .args(["--out"])
        .arg(d1.path())
        .output()
        .unwrap();
    check(&out, 0);
    let from_file = read(&d1.path().join("reciprocity.csv"));
    assert_eq!(from_file.lines().count(), 5, "header plus samples=4 rows");

    let d2 = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "verify",
            "reciprocity",
            "--seed",
            "9",
            "--samples",
            "4",
            "--format",
            "csv",
            "--out",
        ])
        .arg(d2.path())
        .output()
        .unwrap();
    check(&out, 0);
    assert_eq!(from_file, read(&d2.path().join("reciprocity.csv")));

    let d3 = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify", "reciprocity", "--config"])
        .arg(&conf)
        .args(["--seed", "11", "--out"])
        .arg(d3.path())
        .output()
        .unwrap();
    check(&out, 0);
    assert_ne!(
        from_file,
        read(&d3.path().join("reciprocity.csv")),
        "a --seed flag overrides the config file seed"
    );

    let bad = d0.path().join("bad.conf");
    std::fs::write(&bad, "speed=9\n").unwrap();
    let out = bin()
        .args(["verify", "reciprocity", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    check(&out, 2);
}
