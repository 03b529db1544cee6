//! `hcb` command-line driver. Exit codes: 0 success, 1 violation found,
//! 2 usage or config error.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{
    audit_trajectory, ranking_instance, train_boosting, train_logistic, write_trajectory_csv, Init, StepPolicy,
    StumpPool, TrajectoryPoint, Which,
};
use crate::oracle::{audit_bound, audit_fkg, write_records_csv, AuditConfig, AuditSummary, BoundId, FkgAudit};
use crate::ranking::hinge_counterexample;

pub mod config;
pub mod manifest;
pub mod svg;

pub use config::{ExperimentConfig, RunConfig, SCHEMA_VERSION};
pub use manifest::{new_run_dir, read_manifest, write_manifest, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SUMMARY_FILE: &str = "summary.json";
pub const RECORDS_FILE: &str = "records.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const PLOT_FILE: &str = "trajectory.svg";

#[derive(Debug, Parser)]
#[command(name = "hcb", version, about = "Audit H-consistency bounds on finite-support distributions")]
pub struct Cli {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Audit a suite of registered bounds over random instances.
    Verify { suite: Suite },
    /// Train on a seeded instance and audit the ranking bound along the way.
    Experiment {
        kind: ExperimentKind,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, action = ArgAction::Set, default_value_t = true)]
        emit_plot: bool,
    },
    /// Hinge-ranking counterexample on two points.
    Counterexample { eta0: f64, eta0p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tools,
    Constrained,
    Tsybakov,
    Ranking,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Tools => "tools",
            Suite::Constrained => "constrained",
            Suite::Tsybakov => "tsybakov",
            Suite::Ranking => "ranking",
            Suite::All => "all",
        }
    }

    pub fn bounds(&self) -> Vec<BoundId> {
        BoundId::ALL.into_iter().filter(|b| *self == Suite::All || b.suite() == self.name()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    AdaboostRankboost,
    LogisticRanking,
}

/// JSON written by `verify` (schema version [`SCHEMA_VERSION`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub schema_version: u32,
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub gamma_scale: f64,
    pub bounds: Vec<AuditSummary>,
    /// Tool bounds on point masses where the pointwise assumption is tight;
    /// a failure is any `|slack| > tolerance`.
    pub tightness: Vec<TightnessSummary>,
    pub fkg: Option<FkgAudit>,
    pub total_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessSummary {
    pub bound: BoundId,
    pub trials: usize,
    pub failures: usize,
    pub max_abs_slack: f64,
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hcb: {e}");
            EXIT_USAGE
        }
    }
}

struct Resolved {
    cfg: RunConfig,
    seed: u64,
}

fn resolve(cli: &Cli) -> Result<Resolved> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig { schema_version: SCHEMA_VERSION, ..RunConfig::default() },
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    Ok(Resolved { cfg, seed })
}

pub fn run(cli: &Cli) -> Result<i32> {
    let r = resolve(cli)?;
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    let start = Instant::now();
    let (name, dir, outputs, code) = match &cli.command {
        Command::Verify { suite } => {
            let dir = new_run_dir(&cli.out)?;
            let (outputs, code) = cmd_verify(cli, &r, *suite, &dir)?;
            (format!("verify {}", suite.name()), Some(dir), outputs, code)
        }
        Command::Experiment { kind, iterations, emit_plot } => {
            let dir = new_run_dir(&cli.out)?;
            let (outputs, code) = cmd_experiment(cli, &r, *kind, *iterations, *emit_plot, &dir)?;
            let kind = match kind {
                ExperimentKind::AdaboostRankboost => "adaboost-rankboost",
                ExperimentKind::LogisticRanking => "logistic-ranking",
            };
            (format!("experiment {kind}"), Some(dir), outputs, code)
        }
        Command::Counterexample { eta0, eta0p } => {
            (String::from("counterexample"), None, vec![], cmd_counterexample(*eta0, *eta0p)?)
        }
    };
    if let Some(dir) = dir {
        let m = RunManifest {
            command: name,
            config_path: cli.config.as_ref().map(|p| p.display().to_string()),
            seed: r.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            wall_time_s: start.elapsed().as_secs_f64(),
            exit_code: code,
        };
        write_manifest(&dir, &m)?;
        println!("run directory: {}", dir.display());
    }
    Ok(code)
}

fn audit_config(cli: &Cli, r: &Resolved) -> Result<AuditConfig> {
    let d = AuditConfig::default();
    let c = AuditConfig {
        trials: cli.trials.or(r.cfg.trials).unwrap_or(d.trials),
        seed: r.seed,
        tolerance: cli.tolerance.or(r.cfg.tolerance).unwrap_or(d.tolerance),
        max_support: r.cfg.max_support.unwrap_or(d.max_support),
        max_labels: r.cfg.max_labels.unwrap_or(d.max_labels),
        gamma_scale: r.cfg.gamma_scale.unwrap_or(1.0),
        tight: false,
        factors: None,
    };
    c.validate()?;
    Ok(c)
}

fn cmd_verify(cli: &Cli, r: &Resolved, suite: Suite, dir: &Path) -> Result<(Vec<String>, i32)> {
    let cfg = audit_config(cli, r)?;
    let mut ids = suite.bounds();
    if let Some(sel) = &r.cfg.bounds {
        ids.retain(|b| sel.contains(b));
        if ids.is_empty() {
            return Err(Error::Config(format!("config selects no bound of suite {}", suite.name())));
        }
    }
    let mut bounds = Vec::new();
    for id in &ids {
        let s = audit_bound(&cfg, *id)?;
        println!(
            "{:34} trials {:6} violations {:6} inapplicable {:6} worst slack {:+.3e}",
            id.name(),
            s.trials,
            s.violations,
            s.inapplicable,
            s.worst_slack
        );
        bounds.push(s);
    }
    let mut tightness = Vec::new();
    let mut fkg = None;
    let tools: Vec<BoundId> = ids.iter().cloned().filter(|b| b.suite() == "tools").collect();
    for id in &tools {
        let t = audit_bound(&AuditConfig { tight: true, ..cfg.clone() }, *id)?;
        let max_abs = t.records.iter().map(|x| x.slack.abs()).fold(0.0, f64::max);
        let failures = t.records.iter().filter(|x| x.slack.abs() > cfg.tolerance).count();
        println!("{:34} tight probes {:6} failures {:6} max |slack| {:.3e}", id.name(), t.trials, failures, max_abs);
        tightness.push(TightnessSummary { bound: *id, trials: t.trials, failures, max_abs_slack: max_abs });
    }
    if !tools.is_empty() {
        let f = audit_fkg(&cfg)?;
        println!(
            "{:34} compared {:6} violations {:6} max gamma excess {:+.3e}",
            "tools-fkg", f.compared, f.violations, f.worst_excess
        );
        fkg = Some(f);
    }
    let fkg_bad = fkg.as_ref().map(|f| f.violations + usize::from(f.worst_excess > cfg.tolerance)).unwrap_or(0);
    let total_violations = bounds.iter().map(|b| b.violations).sum::<usize>()
        + tightness.iter().map(|t| t.failures).sum::<usize>()
        + fkg_bad;
    let summary = VerifySummary {
        schema_version: SCHEMA_VERSION,
        suite,
        seed: cfg.seed,
        trials: cfg.trials,
        tolerance: cfg.tolerance,
        gamma_scale: cfg.gamma_scale,
        bounds,
        tightness,
        fkg,
        total_violations,
    };
    std::fs::write(dir.join(SUMMARY_FILE), serde_json::to_string_pretty(&summary)? + "\n")?;
    let records: Vec<_> = summary.bounds.iter().flat_map(|b| b.records.iter().cloned()).collect();
    write_records_csv(&records, std::fs::File::create(dir.join(RECORDS_FILE))?)?;
    println!("total violations: {total_violations}");
    let code = if total_violations == 0 { EXIT_OK } else { EXIT_VIOLATION };
    Ok((vec![SUMMARY_FILE.into(), RECORDS_FILE.into()], code))
}

/// Trajectory of the named experiment on the instance drawn from `seed`.
pub fn experiment_trajectory(
    kind: ExperimentKind,
    ex: &ExperimentConfig,
    iterations: usize,
    seed: u64,
) -> Result<Vec<TrajectoryPoint>> {
    let dist = ranking_instance(seed, ex.points, ex.feature_dim)?;
    match kind {
        ExperimentKind::AdaboostRankboost => {
            let pool = StumpPool::build(&dist, ex.include_constant)?;
            let traj = train_boosting(&dist, &pool, iterations, seed)?;
            audit_trajectory(&traj, &dist, Which::ExpBound)
        }
        ExperimentKind::LogisticRanking => {
            let traj =
                train_logistic(&dist, iterations, StepPolicy::Backtracking { initial: ex.step_initial }, Init::Zero)?;
            audit_trajectory(&traj, &dist, Which::LogBound)
        }
    }
}

fn cmd_experiment(
    cli: &Cli,
    r: &Resolved,
    kind: ExperimentKind,
    iterations: Option<usize>,
    emit_plot: bool,
    dir: &Path,
) -> Result<(Vec<String>, i32)> {
    let ex = r.cfg.experiment.clone().unwrap_or_default();
    let tol = cli.tolerance.or(r.cfg.tolerance).unwrap_or(crate::bounds::VIOLATION_TOL);
    if !(tol > 0.0) {
        return Err(Error::Config("tolerance must be positive".into()));
    }
    let iters = iterations.unwrap_or(ex.iterations);
    let pts = experiment_trajectory(kind, &ex, iters, r.seed)?;
    write_trajectory_csv(&pts, std::fs::File::create(dir.join(TRAJECTORY_FILE))?)?;
    let mut outputs = vec![TRAJECTORY_FILE.to_string()];
    if emit_plot {
        let lhs: Vec<f64> = pts.iter().map(|p| p.pair_estimation_error).collect();
        let rhs: Vec<f64> = pts.iter().map(|p| p.bound_rhs).collect();
        let title = match kind {
            ExperimentKind::AdaboostRankboost => "exp-loss ranking bound along boosting",
            ExperimentKind::LogisticRanking => "log-loss ranking bound along logistic regression",
        };
        let plot = svg::line_plot(
            title,
            &[svg::Series { name: "pair regret", values: &lhs }, svg::Series { name: "bound", values: &rhs }],
        );
        std::fs::write(dir.join(PLOT_FILE), plot)?;
        outputs.push(PLOT_FILE.into());
    }
    let worst = pts.iter().map(|p| p.slack).fold(f64::INFINITY, f64::min);
    let bad = pts.iter().filter(|p| p.slack < -tol).count();
    println!("iterations {} worst slack {:+.3e} violations {}", pts.len() - 1, worst, bad);
    Ok((outputs, if bad == 0 { EXIT_OK } else { EXIT_VIOLATION }))
}

fn cmd_counterexample(eta0: f64, eta0p: f64) -> Result<i32> {
    let c = hinge_counterexample(eta0, eta0p)?;
    println!("support: x0 (eta = {eta0}), x0' (eta = {eta0p}), mass 1/2 each");
    println!("scorer: h0 = 1 on both points");
    println!("hinge point regrets: {:.6e} {:.6e}", c.point_regrets[0], c.point_regrets[1]);
    println!("hinge pair regret: {}", fmt_short(c.delta_pair_regret));
    Ok(EXIT_OK)
}

/// Rounds away the last few ulps so `0.99 − 0.51` prints as `0.48`.
fn fmt_short(v: f64) -> String {
    let r: f64 = format!("{v:.12}").parse().unwrap_or(v);
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_args(tmp: &Path, rest: &[&str]) -> Vec<String> {
        let mut v = vec!["hcb".to_string()];
        v.extend(rest.iter().map(|s| s.to_string()));
        v.push("--out".into());
        v.push(tmp.display().to_string());
        v
    }

    #[test]
    fn counterexample_exit_codes() {
        let tmp = tempfile::tempdir().unwrap();
        assert_eq!(run_from(tmp_args(tmp.path(), &["counterexample", "0.99", "0.51"])), 0);
        assert_eq!(run_from(tmp_args(tmp.path(), &["counterexample", "0.6", "0.7"])), 2);
        assert_eq!(run_from(tmp_args(tmp.path(), &["bogus"])), 2);
    }

    #[test]
    fn missing_config_is_usage_error() {
        let tmp = tempfile::tempdir().unwrap();
        let args = tmp_args(tmp.path(), &["verify", "tools", "--config", "/nonexistent/cfg.json"]);
        assert_eq!(run_from(args), 2);
    }

    #[test]
    fn short_format() {
        assert_eq!(fmt_short(0.99 - 0.51), "0.48");
        assert_eq!(fmt_short(0.75 - 0.51), "0.24");
    }

    #[test]
    fn suites_cover_registry() {
        let n: usize =
            [Suite::Tools, Suite::Constrained, Suite::Tsybakov, Suite::Ranking].iter().map(|s| s.bounds().len()).sum();
        assert_eq!(n, BoundId::ALL.len());
        assert_eq!(Suite::All.bounds().len(), n);
    }
}
