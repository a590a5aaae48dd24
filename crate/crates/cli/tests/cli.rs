use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_ssl-lab");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn ssl_lab(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SSL_LAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ssl_lab(args);
    assert!(
        out.status.success(),
        "ssl-lab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL_SIM: [&str; 14] = [
    "simulate", "--s", "1", "--d", "2", "--nl", "20", "--nu", "2000", "--methods", "sl", "--replicates", "1", "--quiet",
];

#[test]
fn simulate_twice_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let mut args = SMALL_SIM.to_vec();
        args.extend(["--seed", "7", "--out", path(out)]);
        ok(&args);
    }
    let ca = fs::read(a.join("results.csv")).unwrap();
    assert_eq!(ca, fs::read(b.join("results.csv")).unwrap());
    assert!(a.join("manifest.json").is_file());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    let mut bytes = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(threads);
        ok(&[
            "simulate", "--s", "1", "--d", "3", "--nl", "10", "--nu", "300", "--methods", "sl,ulplus,sslw",
            "--replicates", "8", "--grid", "0.5,1.5", "--seed", "11", "--threads", threads, "--out", path(&out),
            "--quiet",
        ]);
        bytes.push(fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn manifest_reproduces_results() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first");
    let mut args = SMALL_SIM.to_vec();
    args.extend(["--methods", "sl,ulplus", "--seed", "3", "--out", path(&first)]);
    ok(&args);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["base_seed"], 3);
    assert!(manifest["wall_clock_seconds"].is_number());

    let second = dir.path().join("second");
    let m = first.join("manifest.json");
    ok(&["simulate", "--config", path(&m), "--out", path(&second), "--quiet"]);
    assert_eq!(
        fs::read(first.join("results.csv")).unwrap(),
        fs::read(second.join("results.csv")).unwrap()
    );
}

#[test]
fn flags_override_config_values() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("first");
    let mut args = SMALL_SIM.to_vec();
    args.extend(["--seed", "3", "--out", path(&first)]);
    ok(&args);
    let second = dir.path().join("second");
    let m = first.join("manifest.json");
    ok(&["simulate", "--config", path(&m), "--replicates", "2", "--out", path(&second), "--quiet"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(second.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["resolved"]["replicates"], 2);
    assert_eq!(manifest["resolved"]["trial"]["n_u"], 2000);
}

#[test]
fn preset_and_config_conflict() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, "{}").unwrap();
    let out = ssl_lab(&["simulate", "--preset", "fig1a", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = ssl_lab(&["simulate", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig1a"));
}

#[test]
fn zero_threads_rejected() {
    assert_eq!(ssl_lab(&["--threads", "0", "theory", "--s", "1", "--d", "2", "--nl", "1", "--nu", "1"]).status.code(), Some(2));
}

#[test]
fn out_dir_from_environment_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    let env_dir = dir.path().join("env");
    let flag_dir = dir.path().join("flag");
    let mut args = SMALL_SIM.to_vec();
    args.extend(["--seed", "1"]);
    let run = |extra: &[&str]| {
        let mut a = args.clone();
        a.extend(extra);
        let out = Command::new(BIN).args(&a).env("SSL_LAB_OUT_DIR", &env_dir).output().unwrap();
        assert!(out.status.success());
    };
    run(&[]);
    assert!(env_dir.join("results.csv").is_file());
    fs::remove_dir_all(&env_dir).unwrap();
    run(&["--out", path(&flag_dir)]);
    assert!(flag_dir.join("results.csv").is_file());
    assert!(!env_dir.exists());
}

#[test]
fn theory_example_excess_rate() {
    let out = ok(&["theory", "--s", "1", "--d", "10", "--nl", "10", "--nu", "0"]);
    let v = json(&out);
    let rate = v["excess_rate"].as_f64().unwrap();
    assert!((rate - (-0.5f64).exp()).abs() < 1e-12, "{rate}");
}

#[test]
fn theory_low_snr_regime() {
    let out = ok(&["theory", "--s", "0.001", "--nu", "1000", "--nl", "10", "--d", "2"]);
    assert_eq!(json(&out)["regime"], "LowSNR");
}

#[test]
fn theory_missing_flag_is_usage_error() {
    let out = ssl_lab(&["theory", "--s", "1", "--d", "10", "--nl", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn theory_rejects_negative_snr() {
    let out = ssl_lab(&["theory", "--s=-1", "--d", "2", "--nl", "10", "--nu", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

fn fit(dir: &Path, extra: &[&str]) -> serde_json::Value {
    let csv = data("blobs.csv");
    let mut args = vec![
        "fit", "--data", path(&csv), "--label", "label", "--nl", "20", "--seed", "5", "--out", path(dir), "--quiet",
    ];
    args.extend(extra);
    json(&ok(&args))
}

#[test]
fn fit_reports_errors_and_compatibility() {
    let dir = TempDir::new().unwrap();
    let v = fit(dir.path(), &["--replicates", "3"]);
    let methods = v["methods"].as_array().unwrap();
    assert_eq!(methods.len(), 5);
    for m in methods {
        let e = m["mean_test_error"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&e), "{m}");
        assert_eq!(m["failures"], 0);
    }
    let rho = v["compatibility"]["rho"].as_f64().unwrap();
    assert!(rho.is_finite() && rho > 0.0);
    assert_eq!(v["dim"], 3);
    let csv = fs::read_to_string(dir.path().join("fit.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(dir.path().join("fit.json").is_file());
    assert!(dir.path().join("manifest.json").is_file());
}

#[test]
fn fit_with_pca_works_in_reduced_dimension() {
    let dir = TempDir::new().unwrap();
    let v = fit(dir.path(), &["--pca", "2", "--methods", "sl,sslw"]);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["methods"].as_array().unwrap().len(), 2);
}

#[test]
fn fit_is_seeded() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(fit(a.path(), &["--replicates", "2"]), fit(b.path(), &["--replicates", "2"]));
}

#[test]
fn fit_missing_file_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = ssl_lab(&["fit", "--data", path(&missing), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_pca_out_of_range_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let csv = data("blobs.csv");
    let out = ssl_lab(&["fit", "--data", path(&csv), "--pca", "4", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

fn sweep_csv(dir: &Path) -> PathBuf {
    let out = dir.join("sim");
    ok(&[
        "simulate", "--preset", "fig1a", "--grid", "0.5,1,2", "--replicates", "3", "--seed", "1", "--out", path(&out),
        "--quiet",
    ]);
    out.join("results.csv")
}

fn parse_svg(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    roxmltree::Document::parse(&text).expect("valid XML");
    text
}

#[test]
fn report_draws_one_series_per_method() {
    let dir = TempDir::new().unwrap();
    let csv = sweep_csv(dir.path());
    let out = dir.path().join("rep");
    ok(&["report", path(&csv), "--log-y", "--out", path(&out), "--quiet"]);
    let text = parse_svg(&out.join("results_excess.svg"));
    let doc = roxmltree::Document::parse(&text).unwrap();
    let series: Vec<_> = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("series"))
        .collect();
    assert!(series.len() >= 3, "{} series", series.len());
    let labels: String = doc
        .descendants()
        .filter(|n| matches!(n.attribute("class"), Some("x-label" | "y-label")))
        .filter_map(|n| n.text())
        .collect();
    assert!(labels.contains("SNR"));
    assert!(labels.contains("excess risk"));
    assert!(!text.contains("href"));
}

#[test]
fn report_gap_chart_has_single_series() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    ok(&[
        "simulate", "--s", "1", "--d", "2", "--nl", "20", "--nu", "500", "--methods", "ssls,sslw", "--grid", "0.5,1",
        "--replicates", "2", "--out", path(&out), "--quiet",
    ]);
    let rep = dir.path().join("rep");
    let csv = out.join("results.csv");
    ok(&["report", path(&csv), "--gap", "sls", "sslw", "--metric", "estimation", "--out", path(&rep), "--quiet"]);
    let text = parse_svg(&rep.join("results_estimation_gap_ssls_sslw.svg"));
    assert_eq!(text.matches(r#"class="series""#).count(), 1);
}

#[test]
fn report_empty_csv_is_runtime_error() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = ssl_lab(&["report", path(&empty), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());

    let header_only = dir.path().join("header.csv");
    fs::write(
        &header_only,
        "#schema_version=1;axis=snr\naxis_name,axis_value,method,replicates,mean_excess,std_excess,mean_estimation,std_estimation,mean_test_error,std_test_error,extra\n",
    )
    .unwrap();
    let out = ssl_lab(&["report", path(&header_only), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}
