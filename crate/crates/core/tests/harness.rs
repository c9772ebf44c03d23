use std::path::Path;
use std::process::Command;

use szt_core::harness::{self, fit_loglog, Config, RunOptions, CSV_HEADER};
use szt_core::Error;

const BIN: &str = env!("CARGO_BIN_EXE_szt");

fn field_of(result: szt_core::Result<Config>) -> String {
    match result {
        Err(Error::Config { field, .. }) => field,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn fit_recovers_exact_power_law() {
    let rs = [3.0, 4.0, 5.0, 6.0, 8.0];
    let counts: Vec<f64> = rs.iter().map(|r: &f64| 5000.0 / r.powi(3)).collect();
    let (slope, intercept, residuals) = fit_loglog(&rs, &counts).unwrap();
    assert!((slope + 3.0).abs() < 1e-12);
    assert!((intercept - 5000f64.ln()).abs() < 1e-9);
    assert!(residuals.iter().all(|e| e.abs() < 1e-12));

    let flat = fit_loglog(&rs, &[7.0; 5]).unwrap();
    assert!(flat.0.abs() < 1e-12);
}

#[test]
fn fit_needs_three_distinct_points() {
    assert!(matches!(fit_loglog(&[2.0, 3.0], &[1.0, 2.0]), Err(Error::FitUndefined(_))));
    assert!(matches!(fit_loglog(&[2.0; 3], &[1.0, 2.0, 3.0]), Err(Error::FitUndefined(_))));
    assert!(matches!(fit_loglog(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]), Err(Error::FitUndefined(_))));
}

#[test]
fn config_errors_name_the_field() {
    let base = r#""basis":{"type":"integers"},"n":1089"#;
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":0.6,"r":3}}"#))), "alpha");
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":"3/5","r":3}}"#))), "alpha");
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":"1/2","r":1}}"#))), "r");
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":"1/2","r":3,"c1":"2"}}"#))), "c1");
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":"1/2","r":3,"x":1}}"#))), "x");
    // the tagged basis enum is buffered, so the path stops at `basis`
    assert_eq!(
        field_of(Config::from_json(r#"{"basis":{"type":"quadratic","k":"2"},"n":9,"alpha":"1/2","r":3}"#)),
        "basis"
    );
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"r":3}}"#))), "alpha");
    assert_eq!(field_of(Config::from_json(&format!(r#"{{{base},"alpha":"1/2","r":3,"r_list":[3,4,5]}}"#))), "r_list");
}

#[test]
fn run_is_reproducible_from_its_echo() {
    let config = Config::from_json(
        r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r":3,"c1":"auto","seed":7}"#,
    )
    .unwrap();
    let first = harness::run(&config, &RunOptions::default()).unwrap().report;
    assert_eq!(first.frac_r_rich, 1.0);
    assert_eq!(first.seed, 7);
    assert!(first.runtime_ms.is_none());

    let text = serde_json::to_string(&first.echo).unwrap();
    let again = harness::run(&Config::from_json(&text).unwrap(), &RunOptions::default())
        .unwrap()
        .report;
    assert_eq!(first, again);

    let serial = RunOptions { workers: Some(1), timings: false };
    assert_eq!(harness::run(&config, &serial).unwrap().report, first);
}

#[test]
fn oracle_on_small_run() {
    let config =
        Config::from_json(r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r":5,"c1":"auto"}"#).unwrap();
    let outcome = harness::oracle(&config, &RunOptions::default()).unwrap();
    let o = outcome.report.oracle.unwrap();
    assert!(o.subset);
    assert_eq!(o.family_lines, outcome.report.num_lines);
    assert!(o.oracle_lines >= o.family_lines);
    assert!(o.coverage > 0.0 && o.coverage <= 1.0);
}

#[test]
fn csv_has_the_fixed_header() {
    let config =
        Config::from_json(r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r":3,"c1":"auto"}"#).unwrap();
    let report = harness::run(&config, &RunOptions::default()).unwrap().report;
    let mut buf = Vec::new();
    harness::write_csv(&mut buf, &[report]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), CSV_HEADER.len());
    assert_eq!(row[0], "integers");
    assert_eq!(row[14], "");
}

#[test]
fn selftest_passes_everywhere() {
    let results = harness::selftest(3, 200).unwrap();
    assert_eq!(results.len(), harness::SUITES.len() * harness::selftest_bases().len());
    for r in &results {
        assert!(r.passed(), "{} on {}: {:?}", r.suite, r.basis, r.first_failure);
    }
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn cli_sweep_output_ignores_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sweep.json",
        r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r_list":[3,4,5],"c1":"auto"}"#,
    );
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out = tmp.path().join(format!("w{workers}"));
        let status = Command::new(BIN)
            .args(["sweep", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push((
            std::fs::read(out.join("sweep.csv")).unwrap(),
            std::fs::read(out.join("reports.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn cli_reports_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    for (text, field) in [
        (r#"{"basis":{"type":"integers"},"n":1089,"alpha":0.6,"r":3}"#, "`alpha`"),
        (r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r":1}"#, "`r`"),
    ] {
        let cfg = write_config(tmp.path(), "bad.json", text);
        let out = Command::new(BIN).args(["construct", "--config"]).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("config error at {field}")), "{err}");
    }
}

#[test]
fn cli_construct_dumps_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"basis":{"type":"integers"},"n":1089,"alpha":"1/2","r":3,"c1":"auto"}"#,
    );
    let out = tmp.path().join("out");
    let status = Command::new(BIN)
        .args(["construct", "--dump-points", "--dump-lines", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success());
    for f in ["report.json", "report.csv", "points.txt", "points_embedded.csv", "lines.txt"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let report: harness::ExperimentReport =
        serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    let points = std::fs::read_to_string(out.join("points.txt")).unwrap();
    assert_eq!(points.lines().filter(|l| !l.trim().is_empty()).count(), report.p_realized);
}
