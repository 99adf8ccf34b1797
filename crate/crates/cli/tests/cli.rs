//! End-to-end checks of the command-line interface: output schemas,
//! determinism, config-file handling and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn freqloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freqloc"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn sweep_is_deterministic_and_flagged() {
    let args = [
        "sweep",
        "--prefilter",
        "bspline",
        "--order",
        "2",
        "--weight",
        "monomial",
        "--s",
        "2",
        "--lambda",
        "0.45",
        "--lambda",
        "0.5",
        "--window",
        "-2:2:41",
        "--band",
        "6",
    ];
    let a = freqloc(&args);
    let b = freqloc(&args);
    assert_eq!(a.stdout, b.stdout, "identical runs must be byte-identical");
    let text = stdout_str(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,sup_rel,bound_sqrt,critical_lambda,status"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",ok"));
    // lambda = 0.5 is a spline resonance: flagged, not dropped
    assert!(rows[1].contains("resonant-interval"), "row: {}", rows[1]);
    assert_eq!(a.status.code(), Some(1), "failed rows must fail the command");
}

#[test]
fn sweep_with_empty_lambda_list_emits_header_only() {
    let dir = std::env::temp_dir().join("freqloc-cli-empty");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("empty.cfg");
    std::fs::write(&cfg, "lambda=\nprefilter=gauss\nbeta=2\n").unwrap();
    let out = freqloc(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_str(&out),
        "lambda,sup_rel,bound_sqrt,critical_lambda,status\n"
    );
}

#[test]
fn interp_emits_time_and_frequency_columns() {
    let out = freqloc(&[
        "interp",
        "--prefilter",
        "sinc",
        "--beta",
        "4",
        "--lambda",
        "0.25",
        "--window",
        "-1:1:5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "trace,x,phi_int,xi,phi_int_hat");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    // the Nyquist trace of the ideal low-pass peaks at one
    let center: Vec<&str> = rows[2].split(',').collect();
    assert_eq!(center[0], "lambda=0.25");
    let phi0: f64 = center[2].parse().unwrap();
    assert!((phi0 - 1.0).abs() < 1e-12);
}

#[test]
fn interp_rejects_resonant_interval_with_message() {
    let out = freqloc(&[
        "interp",
        "--prefilter",
        "bspline",
        "--order",
        "2",
        "--lambda",
        "0.5",
        "--window",
        "-1:1:3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lambda=0.5"), "stderr: {err}");
}

#[test]
fn bounds_report_has_the_full_schema() {
    let out = freqloc(&[
        "bounds",
        "--prefilter",
        "sinc",
        "--beta",
        "4",
        "--weight",
        "sincscaled",
        "--s",
        "4",
        "--lambda",
        "0.25",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    for key in [
        "config",
        "m_w",
        "series_value",
        "bound_sq",
        "critical_lambda",
        "sup_rel",
        "lattice_mismatch_max",
        "terms_used",
        "remainder",
    ] {
        assert!(json.get(key).is_some(), "missing key {key}");
    }
    // the band-scaled weight on the ideal low-pass integrates to 1/beta
    assert!((json["m_w"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!(json["sup_rel"].is_null());
    assert!(json["config"]["lambda"][0].as_f64().unwrap() == 0.25);
}

#[test]
fn bounds_rejects_divergent_moments() {
    let out = freqloc(&[
        "bounds",
        "--prefilter",
        "bspline",
        "--order",
        "2",
        "--weight",
        "monomial",
        "--s",
        "3.5",
        "--lambda",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("diverges"), "stderr: {err}");
}

#[test]
fn walter_table_shows_decay_and_contrast() {
    let out = freqloc(&[
        "walter",
        "--prefilter",
        "bspline",
        "--order",
        "3",
        "--n-terms",
        "100",
        "--n-terms",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n_terms,partial_sum,remainder_bound,centered_denominator_at_pi"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1][1].abs() < rows[0][1].abs(), "partial sums must decay");
    assert!(rows[0][3] > 1e-2 && rows[1][3] > 1e-2);

    let even = freqloc(&["walter", "--order", "4"]);
    assert_eq!(even.status.code(), Some(2));
}

#[test]
fn reconstruct_writes_csv_and_report() {
    let dir = std::env::temp_dir().join("freqloc-cli-rec");
    std::fs::create_dir_all(&dir).unwrap();
    let csv_path: PathBuf = dir.join("rec.csv");
    let out = freqloc(&[
        "reconstruct",
        "--prefilter",
        "gauss",
        "--beta",
        "2",
        "--weight",
        "gaussexp",
        "--lambda",
        "0.4",
        "--band",
        "8",
        "--window",
        "-2:2:21",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("x,re_g,re_g_tilde,abs_err\n"));
    assert_eq!(text.lines().count(), 22);
    assert!(!text.contains('\r'), "LF line endings only");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("rec.report.json")).unwrap())
            .unwrap();
    let sup_rel = report["sup_rel"].as_f64().unwrap();
    let bound_sq = report["bound_sq"].as_f64().unwrap();
    assert!(sup_rel * sup_rel <= bound_sq + 1e-12);
    assert!(report["lattice_mismatch_max"].as_f64().unwrap() < 1e-9);
}

#[test]
fn reconstruct_json_format_prints_only_the_report() {
    let out = freqloc(&[
        "reconstruct",
        "--prefilter",
        "gauss",
        "--beta",
        "2",
        "--weight",
        "gaussexp",
        "--lambda",
        "0.4",
        "--band",
        "8",
        "--window",
        "-2:2:11",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(json["sup_rel"].as_f64().unwrap() >= 0.0);
}

#[test]
fn config_file_fills_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join("freqloc-cli-cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("base.cfg");
    std::fs::write(
        &cfg,
        "prefilter=sinc\nbeta=4\nweight=sincscaled\ns=4\nlambda=0.25\n",
    )
    .unwrap();
    let from_file = freqloc(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&from_file)).unwrap();
    assert_eq!(json["config"]["prefilter"], "sinc");
    assert!((json["m_w"].as_f64().unwrap() - 0.25).abs() < 1e-12);

    // the explicit flag must win over the file entry
    let overridden = freqloc(&[
        "bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "8",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&overridden)).unwrap();
    assert!((json["m_w"].as_f64().unwrap() - 0.125).abs() < 1e-12);

    let bad = dir.join("bad.cfg");
    std::fs::write(&bad, "nonsense=1\n").unwrap();
    let out = freqloc(&["bounds", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
