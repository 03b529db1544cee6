//! Exact audits of the ranking bounds along training trajectories.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundReport, VIOLATION_TOL};
use crate::dist::{sample_distribution, DiscreteDistribution, SampleConstraints};
use crate::error::{input, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{LossSpec, PhiSpec};
use crate::ranking::{exp_ranking_bound, log_ranking_bound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    ExpBound,
    LogBound,
}

impl Which {
    pub fn surrogate(&self) -> LossSpec {
        match self {
            Which::ExpBound => LossSpec::margin(PhiSpec::Exp),
            Which::LogBound => LossSpec::margin(PhiSpec::Logistic),
        }
    }

    pub fn report(&self, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<BoundReport> {
        match self {
            Which::ExpBound => exp_ranking_bound(h, dist),
            Which::LogBound => log_ranking_bound(h, dist),
        }
    }
}

/// One iteration of an audited trajectory. Both errors include the
/// minimizability gap on the complete set, i.e. they are expected regrets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub surrogate_estimation_error: f64,
    pub pair_estimation_error: f64,
    pub bound_rhs: f64,
    pub slack: f64,
}

impl TrajectoryPoint {
    pub fn violated(&self) -> bool {
        self.slack < -VIOLATION_TOL
    }
}

pub fn audit_trajectory(
    trajectory: &[Hypothesis],
    dist: &DiscreteDistribution,
    which: Which,
) -> Result<Vec<TrajectoryPoint>> {
    if trajectory.is_empty() {
        return input("empty trajectory");
    }
    trajectory
        .iter()
        .enumerate()
        .map(|(it, h)| {
            let r = which.report(h, dist)?;
            Ok(TrajectoryPoint {
                iteration: it,
                surrogate_estimation_error: r.diagnostic("surrogate_regret").unwrap_or(f64::NAN),
                pair_estimation_error: r.lhs,
                bound_rhs: r.rhs,
                slack: r.slack,
            })
        })
        .collect()
}

/// CSV with header `iteration,surrogate_err,pair_err,bound_rhs,slack`.
/// Floats use the shortest round-trip representation, so output is
/// byte-stable for identical inputs.
pub fn write_trajectory_csv<W: Write>(points: &[TrajectoryPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "surrogate_err", "pair_err", "bound_rhs", "slack"])?;
    for p in points {
        w.write_record([
            p.iteration.to_string(),
            p.surrogate_estimation_error.to_string(),
            p.pair_estimation_error.to_string(),
            p.bound_rhs.to_string(),
            p.slack.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: std::io::Read>(input: R) -> Result<Vec<TrajectoryPoint>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| crate::error::Error::Input(format!("bad trajectory field {i}")))
        };
        out.push(TrajectoryPoint {
            iteration: f(0)? as usize,
            surrogate_estimation_error: f(1)?,
            pair_estimation_error: f(2)?,
            bound_rhs: f(3)?,
            slack: f(4)?,
        });
    }
    Ok(out)
}

/// Seeded binary instance with uniform features in `[0, 1)^feature_dim`.
pub fn ranking_instance(seed: u64, points: usize, feature_dim: usize) -> Result<DiscreteDistribution> {
    sample_distribution(seed, points, 2, SampleConstraints { feature_dim, ..SampleConstraints::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{train_boosting, StumpPool};

    #[test]
    fn zero_scorer_has_non_negative_slack() {
        let d = ranking_instance(5, 8, 2).unwrap();
        for w in [Which::ExpBound, Which::LogBound] {
            let p = audit_trajectory(&[Hypothesis::zero_scalar(8)], &d, w).unwrap();
            assert!(p[0].slack >= 0.0);
        }
    }

    #[test]
    fn deterministic_log_factor_is_two() {
        let d = DiscreteDistribution::binary(&[1.0, 0.0, 1.0], &[0.3, 0.3, 0.4]).unwrap();
        let h = Hypothesis::scalar(&[0.1, 0.4, -0.2]);
        let r = log_ranking_bound(&h, &d).unwrap();
        assert!((r.rhs - 2.0 * r.diagnostic("surrogate_regret").unwrap()).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let d = ranking_instance(9, 10, 1).unwrap();
        let t = train_boosting(&d, &StumpPool::build(&d, true).unwrap(), 5, 1).unwrap();
        let pts = audit_trajectory(&t, &d, Which::ExpBound).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&pts, &mut buf).unwrap();
        assert!(buf.starts_with(b"iteration,surrogate_err,pair_err,bound_rhs,slack\n"));
        assert_eq!(read_trajectory_csv(&buf[..]).unwrap(), pts);
    }
}
