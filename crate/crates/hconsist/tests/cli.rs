use std::path::Path;
use std::process::{Command, Output};

use hconsist::cli::{read_manifest, VerifySummary};

fn hcb(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcb")).args(args).arg("--out").arg(out).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn counterexample_values_and_ordering() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hcb(tmp.path(), &["counterexample", "0.99", "0.51"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("hinge pair regret: 0.48\n"));
    let o = hcb(tmp.path(), &["counterexample", "0.75", "0.51"]);
    assert!(stdout(&o).contains("hinge pair regret: 0.24\n"));
    let o = hcb(tmp.path(), &["counterexample", "0.6", "0.7"]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&hcb(tmp.path(), &["verify", "tools", "--config", "/nonexistent/run.json"])), 2);
    assert_eq!(code(&hcb(tmp.path(), &["verify", "nothing"])), 2);
    assert_eq!(code(&hcb(tmp.path(), &["experiment", "adaboost-rankboost", "--emit-plot", "maybe"])), 2);
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "trails": 10}"#).unwrap();
    let o = hcb(tmp.path(), &["verify", "tools", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
}

#[test]
fn verify_writes_summary_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hcb(tmp.path(), &["verify", "tsybakov", "--seed", "7", "--trials", "200"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let run = tmp.path().join("run-0001");
    let s: VerifySummary = serde_json::from_str(&std::fs::read_to_string(run.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s.total_violations, 0);
    assert_eq!(s.bounds.len(), 6);
    let m = read_manifest(&run).unwrap();
    assert_eq!(m.command, "verify tsybakov");
    assert_eq!(m.seed, 7);
    assert_eq!(m.outputs, vec!["summary.json", "records.csv"]);
    let o = hcb(tmp.path(), &["verify", "tools", "--seed", "7", "--trials", "200"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("tools-sqrt"));
}

#[test]
fn halved_gamma_suites_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("neg.json");
    std::fs::write(&cfg, r#"{"schema_version": 1, "gamma_scale": 0.5, "trials": 300}"#).unwrap();
    for suite in ["tools", "constrained", "tsybakov", "ranking"] {
        assert_eq!(code(&hcb(tmp.path(), &["verify", suite, "--config", cfg.to_str().unwrap()])), 1, "{suite}");
    }
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    hcb(tmp.path(), &["verify", "ranking", "--seed", "3", "--trials", "100"]);
    hcb(tmp.path(), &["verify", "ranking", "--seed", "3", "--trials", "100", "--workers", "1"]);
    let a = std::fs::read(tmp.path().join("run-0001/records.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("run-0002/records.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn experiments_write_csv_and_optional_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hcb(tmp.path(), &["experiment", "adaboost-rankboost", "--seed", "2"]);
    assert_eq!(code(&o), 0);
    let with_plot = tmp.path().join("run-0001");
    let csv = std::fs::read_to_string(with_plot.join("trajectory.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("iteration,surrogate_err,pair_err,bound_rhs,slack"));
    let slacks: Vec<f64> = rows.map(|r| r.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(slacks.len(), 51);
    assert!(slacks.iter().all(|s| *s >= 0.0));
    assert!(std::fs::read_to_string(with_plot.join("trajectory.svg")).unwrap().starts_with("<svg"));

    assert_eq!(code(&hcb(tmp.path(), &["experiment", "adaboost-rankboost", "--seed", "2", "--emit-plot", "false"])), 0);
    let without = tmp.path().join("run-0002");
    assert!(!without.join("trajectory.svg").exists());
    assert_eq!(std::fs::read(without.join("trajectory.csv")).unwrap(), csv.as_bytes());
    assert_eq!(read_manifest(&without).unwrap().outputs, vec!["trajectory.csv"]);

    assert_eq!(code(&hcb(tmp.path(), &["experiment", "logistic-ranking", "--iterations", "0"])), 0);
    let zero = std::fs::read_to_string(tmp.path().join("run-0003/trajectory.csv")).unwrap();
    assert_eq!(zero.lines().count(), 2);
    assert!(zero.lines().nth(1).unwrap().starts_with("0,"));
}
