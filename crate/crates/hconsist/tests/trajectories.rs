//! Boosting and logistic-regression trajectories against the exact ranking
//! bounds, plus golden CSVs for ten seeded instances.
//!
//! Regenerate the fixtures with `HCONSIST_BLESS=1 cargo test --test trajectories`.

use std::path::PathBuf;

use hconsist::experiments::logistic::logistic_objective;
use hconsist::experiments::{
    audit_trajectory, ranking_instance, read_trajectory_csv, train_boosting, train_logistic, write_trajectory_csv,
    Init, StepPolicy, StumpPool, TrajectoryPoint, Which,
};
use hconsist::hypothesis::HypothesisKind;
use hconsist::losses::{LossSpec, PhiSpec};
use hconsist::regret::generalization_error;

const SEEDS: std::ops::Range<u64> = 0..10;
const POINTS: usize = 20;
const ITERATIONS: usize = 50;
const CROSS_PLATFORM_TOL: f64 = 1e-10;

fn boosting(seed: u64) -> Vec<TrajectoryPoint> {
    let d = ranking_instance(seed, POINTS, 2).unwrap();
    let pool = StumpPool::build(&d, true).unwrap();
    audit_trajectory(&train_boosting(&d, &pool, ITERATIONS, seed).unwrap(), &d, Which::ExpBound).unwrap()
}

fn logistic(seed: u64) -> Vec<TrajectoryPoint> {
    let d = ranking_instance(seed, POINTS, 2).unwrap();
    audit_trajectory(&train_logistic(&d, ITERATIONS, StepPolicy::default(), Init::Zero).unwrap(), &d, Which::LogBound)
        .unwrap()
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/trajectories").join(name)
}

fn check_golden(name: &str, pts: &[TrajectoryPoint]) {
    let path = fixture(name);
    if std::env::var_os("HCONSIST_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        write_trajectory_csv(pts, std::fs::File::create(&path).unwrap()).unwrap();
        return;
    }
    let want = read_trajectory_csv(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(want.len(), pts.len(), "{name}");
    for (a, b) in want.iter().zip(pts) {
        assert_eq!(a.iteration, b.iteration);
        for (x, y) in [
            (a.surrogate_estimation_error, b.surrogate_estimation_error),
            (a.pair_estimation_error, b.pair_estimation_error),
            (a.bound_rhs, b.bound_rhs),
            (a.slack, b.slack),
        ] {
            assert!((x - y).abs() <= CROSS_PLATFORM_TOL, "{name} iteration {}: {x} vs {y}", a.iteration);
        }
    }
}

#[test]
fn boosting_trajectories_hold_and_match_golden() {
    for seed in SEEDS {
        let pts = boosting(seed);
        assert_eq!(pts.len(), ITERATIONS + 1);
        assert!(pts.iter().all(|p| !p.violated()), "seed {seed}");
        assert!(pts[0].slack >= 0.0);
        check_golden(&format!("boosting-seed{seed}.csv"), &pts);
    }
}

#[test]
fn logistic_trajectories_hold_and_match_golden() {
    for seed in SEEDS {
        let pts = logistic(seed);
        assert!(pts.iter().all(|p| !p.violated()), "seed {seed}");
        assert!(pts[0].slack >= 0.0);
        check_golden(&format!("logistic-seed{seed}.csv"), &pts);
    }
}

#[test]
fn boosting_exp_loss_is_non_increasing() {
    let exp = LossSpec::margin(PhiSpec::Exp);
    for seed in SEEDS {
        let d = ranking_instance(seed, POINTS, 2).unwrap();
        let pool = StumpPool::build(&d, true).unwrap();
        let traj = train_boosting(&d, &pool, ITERATIONS, seed).unwrap();
        let v: Vec<f64> = traj.iter().map(|h| generalization_error(&exp, h, &d).unwrap()).collect();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-12), "seed {seed}");
        // the constant stump is in the pool
        assert!(pool.stumps.iter().any(|s| s.is_constant()));
    }
}

#[test]
fn logistic_objective_is_non_increasing() {
    for seed in SEEDS {
        let d = ranking_instance(seed, POINTS, 2).unwrap();
        let traj = train_logistic(&d, ITERATIONS, StepPolicy::default(), Init::Zero).unwrap();
        let v: Vec<f64> = traj
            .iter()
            .map(|h| match &h.kind {
                HypothesisKind::Linear { weights, bias } => {
                    let mut p = weights[0].clone();
                    p.push(bias[0]);
                    logistic_objective(&d, &p).unwrap().0
                }
                _ => unreachable!(),
            })
            .collect();
        assert!((v[0] - 2f64.ln()).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] <= w[0]), "seed {seed}");
    }
}

#[test]
fn trajectories_are_bitwise_reproducible() {
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_trajectory_csv(&boosting(3), &mut a).unwrap();
    write_trajectory_csv(&boosting(3), &mut b).unwrap();
    assert_eq!(a, b);
}
