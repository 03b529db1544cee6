//! Brute-force cross-checks: grid infima against every closed form, and a
//! registry of randomized audits that drive each bound checker.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::tables::{table_transform, tsybakov_scale};
use crate::bounds::tools::tightness_alpha;
use crate::bounds::{
    constrained_enhanced_bound_with, evaluate_power_bound, evaluate_tool_bound, pair_partial_infimum, tsybakov_bound,
    BoundReport, FactorSpec, GammaConstants, Setting, ToolSetup, Transform, TsybakovSetup, Variant, VIOLATION_TOL,
};
use crate::dist::{dirichlet, fit_tsybakov_envelope, sample_distribution, DiscreteDistribution, SampleConstraints};
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{CompSumFamily, LossSpec, PhiSpec};
use crate::optim::golden_section;
use crate::ranking::{
    exp_ranking_bound, log_ranking_bound, pair_best_from_weights, pair_conditional_from_diff, pair_inequality_report,
    PairFactor,
};
use crate::regret::{
    binary_best_closed, comp_sum_best, conditional_error_scores, constrained_best, regrets, HypothesisSet,
};

/// Refinement tolerance of [`grid_infimum`].
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Interval {
        lo: f64,
        hi: f64,
        points: usize,
    },
    /// Tensor grid with `points` nodes per axis.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        points: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub value: f64,
    pub argmin: Vec<f64>,
}

fn finite(v: f64, x: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("objective is {v} at {x:?}")))
    }
}

/// Grid minimum refined by golden-section search (1-D) or a pattern search
/// along axes and pairwise diagonals (low-D). Any non-finite value met on
/// the grid is an error.
pub fn grid_infimum<F: Fn(&[f64]) -> f64>(f: F, domain: &Domain) -> Result<GridResult> {
    match domain {
        Domain::Interval { lo, hi, points } => {
            if !(hi >= lo) || *points < 2 {
                return input("interval grid needs lo <= hi and at least two points");
            }
            let step = (hi - lo) / (points - 1) as f64;
            let mut best = (0, f64::INFINITY);
            for i in 0..*points {
                let x = lo + step * i as f64;
                let v = finite(f(&[x]), &[x])?;
                if v < best.1 {
                    best = (i, v);
                }
            }
            let x0 = lo + step * best.0 as f64;
            let r = golden_section(|x| f(&[x]), (x0 - step).max(*lo), (x0 + step).min(*hi), ORACLE_TOL);
            Ok(if r.value.is_finite() && r.value < best.1 {
                GridResult { value: r.value, argmin: vec![r.x] }
            } else {
                GridResult { value: best.1, argmin: vec![x0] }
            })
        }
        Domain::Box { lo, hi, points } => {
            let d = lo.len();
            if d == 0 || hi.len() != d || *points < 2 || lo.iter().zip(hi).any(|(a, b)| !(b >= a)) {
                return input("box grid needs matching non-empty bounds and at least two points");
            }
            let steps: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / (points - 1) as f64).collect();
            let mut idx = vec![0usize; d];
            let mut best = (lo.clone(), f64::INFINITY);
            loop {
                let x: Vec<f64> = (0..d).map(|k| lo[k] + steps[k] * idx[k] as f64).collect();
                let v = finite(f(&x), &x)?;
                if v < best.1 {
                    best = (x, v);
                }
                let mut k = 0;
                while k < d {
                    idx[k] += 1;
                    if idx[k] < *points {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
            let (x, v) = pattern_search(&f, best.0, best.1, steps.iter().cloned().fold(0.0, f64::max));
            Ok(GridResult { value: v, argmin: x })
        }
    }
}

fn pattern_search<F: Fn(&[f64]) -> f64>(f: &F, mut x: Vec<f64>, mut v: f64, mut step: f64) -> (Vec<f64>, f64) {
    let d = x.len();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        dirs.push(e);
        for j in i + 1..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = std::f64::consts::FRAC_1_SQRT_2;
                e[j] = s * std::f64::consts::FRAC_1_SQRT_2;
                dirs.push(e);
            }
        }
    }
    let at = |x: &[f64], e: &[f64], t: f64| -> Vec<f64> { x.iter().zip(e).map(|(a, b)| a + t * b).collect() };
    while step > ORACLE_TOL {
        let mut improved = false;
        for e in &dirs {
            let r = golden_section(|t| f(&at(&x, e, t)), -step, step, ORACLE_TOL.max(step * 1e-6));
            if r.value.is_finite() && r.value < v - 1e-16 {
                x = at(&x, e, r.x);
                v = r.value;
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, v)
}

/// Closed forms with a registered brute-force counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormId {
    ZeroOneRegretBinary,
    ZeroOneRegretMulti,
    BinaryBestHinge,
    BinaryBestLogistic,
    BinaryBestExp,
    BinaryBestSqHinge,
    ConstrainedBestHinge,
    ConstrainedBestExp,
    ConstrainedBestSqHinge,
    CompSumBestLogistic,
    CompSumBestSumExp,
    CompSumBestGce,
    CompSumBestMae,
    PairBestExp,
    PairBestHinge,
    PairBestLogistic,
    PairBestSqHinge,
    PairBestZeroOne,
    PartialInfimumExp,
    PartialInfimumHinge,
    PartialInfimumSqHinge,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 21] = [
        ClosedFormId::ZeroOneRegretBinary,
        ClosedFormId::ZeroOneRegretMulti,
        ClosedFormId::BinaryBestHinge,
        ClosedFormId::BinaryBestLogistic,
        ClosedFormId::BinaryBestExp,
        ClosedFormId::BinaryBestSqHinge,
        ClosedFormId::ConstrainedBestHinge,
        ClosedFormId::ConstrainedBestExp,
        ClosedFormId::ConstrainedBestSqHinge,
        ClosedFormId::CompSumBestLogistic,
        ClosedFormId::CompSumBestSumExp,
        ClosedFormId::CompSumBestGce,
        ClosedFormId::CompSumBestMae,
        ClosedFormId::PairBestExp,
        ClosedFormId::PairBestHinge,
        ClosedFormId::PairBestLogistic,
        ClosedFormId::PairBestSqHinge,
        ClosedFormId::PairBestZeroOne,
        ClosedFormId::PartialInfimumExp,
        ClosedFormId::PartialInfimumHinge,
        ClosedFormId::PartialInfimumSqHinge,
    ];
}

/// GCE parameter used by the comp-sum check.
pub const GCE_A: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub id: ClosedFormId,
    pub draws: usize,
    pub max_discrepancy: f64,
    pub worst_params: Vec<f64>,
}

/// `(closed form, oracle, params)` for one random draw.
fn draw_pair(id: ClosedFormId, rng: &mut ChaCha8Rng) -> Result<(f64, f64, Vec<f64>)> {
    use ClosedFormId::*;
    let interval = |lo: f64, hi: f64, points: usize| Domain::Interval { lo, hi, points };
    let binary = |phi: PhiSpec, eta: f64| -> Result<(f64, f64, Vec<f64>)> {
        let l = LossSpec::margin(phi);
        let p = [eta, 1.0 - eta];
        let o = grid_infimum(|u| conditional_error_scores(&l, &p, u).unwrap_or(f64::NAN), &interval(-40.0, 40.0, 801))?;
        Ok((binary_best_closed(phi, eta).expect("closed form"), o.value, vec![eta]))
    };
    // sum-zero scores (h₁, h₂, −h₁−h₂)
    let constrained = |phi: PhiSpec, p: Vec<f64>, r: f64, points: usize| -> Result<(f64, f64, Vec<f64>)> {
        let l = LossSpec::constrained(phi);
        let o = grid_infimum(
            |h| conditional_error_scores(&l, &p, &[h[0], h[1], -h[0] - h[1]]).unwrap_or(f64::NAN),
            &Domain::Box { lo: vec![-r; 2], hi: vec![r; 2], points },
        )?;
        Ok((constrained_best(phi, &p)?, o.value, p))
    };
    // the last score is pinned to 0 (shift invariance)
    let comp_sum = |family: CompSumFamily, p: Vec<f64>, r: f64, points: usize| -> Result<(f64, f64, Vec<f64>)> {
        let l = LossSpec::CompSum { family };
        let o = grid_infimum(
            |h| conditional_error_scores(&l, &p, &[h[0], h[1], 0.0]).unwrap_or(f64::NAN),
            &Domain::Box { lo: vec![-r; 2], hi: vec![r; 2], points },
        )?;
        Ok((comp_sum_best(family, &p), o.value, p))
    };
    let pair = |l: LossSpec, a: f64, b: f64, dom: Domain| -> Result<(f64, f64, Vec<f64>)> {
        let o = grid_infimum(|d| pair_conditional_from_diff(&l, a, b, d[0]).unwrap_or(f64::NAN), &dom)?;
        Ok((pair_best_from_weights(&l, a, b)?.0, o.value, vec![a, b]))
    };
    let partial = |phi: PhiSpec, a: f64, b: f64, s: f64| -> Result<(f64, f64, Vec<f64>)> {
        let o = grid_infimum(
            |u| a * phi.eval(-u[0]) + b * phi.eval(-(s - u[0])),
            &interval(s / 2.0 - 40.0, s / 2.0 + 40.0, 801),
        )?;
        Ok((pair_partial_infimum(phi, a, b, s)?, o.value, vec![a, b, s]))
    };
    let simplex3 = |rng: &mut ChaCha8Rng| dirichlet(rng, 3, 1.0);
    match id {
        ZeroOneRegretBinary => {
            let eta: f64 = rng.random();
            let u: f64 = rng.random_range(-2.0..2.0);
            let p = [eta, 1.0 - eta];
            let dist = DiscreteDistribution::point_mass(p.to_vec())?;
            let closed =
                regrets(&LossSpec::ZeroOneBinary, &Hypothesis::scalar(&[u]), &dist, &HypothesisSet::Complete)?[0];
            let l = LossSpec::ZeroOneBinary;
            let o =
                grid_infimum(|v| conditional_error_scores(&l, &p, v).unwrap_or(f64::NAN), &interval(-1.0, 1.0, 201))?;
            Ok((closed, conditional_error_scores(&l, &p, &[u])? - o.value, vec![eta, u]))
        }
        ZeroOneRegretMulti => {
            let p = simplex3(rng);
            let h: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let dist = DiscreteDistribution::point_mass(p.clone())?;
            let closed = regrets(
                &LossSpec::ZeroOneMulti,
                &Hypothesis::tabular(vec![h.clone()]),
                &dist,
                &HypothesisSet::Complete,
            )?[0];
            let l = LossSpec::ZeroOneMulti;
            // every argmax pattern appears on the {−1, 0, 1}³ grid
            let o = grid_infimum(
                |v| conditional_error_scores(&l, &p, v).unwrap_or(f64::NAN),
                &Domain::Box { lo: vec![-1.0; 3], hi: vec![1.0; 3], points: 3 },
            )?;
            let mut params = p.clone();
            params.extend(&h);
            Ok((closed, conditional_error_scores(&l, &p, &h)? - o.value, params))
        }
        BinaryBestHinge => binary(PhiSpec::Hinge, rng.random()),
        BinaryBestLogistic => binary(PhiSpec::Logistic, rng.random()),
        BinaryBestExp => binary(PhiSpec::Exp, rng.random()),
        BinaryBestSqHinge => binary(PhiSpec::SqHinge, rng.random()),
        // the hinge minimizer (−1, −1, 2) sits on the 61-point grid over [−3, 3]
        ConstrainedBestHinge => constrained(PhiSpec::Hinge, simplex3(rng), 3.0, 61),
        ConstrainedBestExp => constrained(PhiSpec::Exp, simplex3(rng), 10.0, 41),
        ConstrainedBestSqHinge => constrained(PhiSpec::SqHinge, simplex3(rng), 4.0, 41),
        CompSumBestLogistic => comp_sum(CompSumFamily::MultinomialLogistic, simplex3(rng), 20.0, 41),
        CompSumBestSumExp => comp_sum(CompSumFamily::SumExp, simplex3(rng), 20.0, 41),
        CompSumBestGce => comp_sum(CompSumFamily::Gce { a: GCE_A }, simplex3(rng), 40.0, 41),
        CompSumBestMae => comp_sum(CompSumFamily::Mae, simplex3(rng), 40.0, 41),
        PairBestExp => {
            pair(LossSpec::RankingPair { phi: PhiSpec::Exp }, rng.random(), rng.random(), interval(-40.0, 40.0, 801))
        }
        PairBestHinge => {
            pair(LossSpec::RankingPair { phi: PhiSpec::Hinge }, rng.random(), rng.random(), interval(-5.0, 5.0, 101))
        }
        PairBestLogistic => pair(
            LossSpec::RankingPair { phi: PhiSpec::Logistic },
            rng.random(),
            rng.random(),
            interval(-40.0, 40.0, 801),
        ),
        PairBestSqHinge => {
            pair(LossSpec::RankingPair { phi: PhiSpec::SqHinge }, rng.random(), rng.random(), interval(-5.0, 5.0, 101))
        }
        PairBestZeroOne => pair(LossSpec::RankingZeroOne, rng.random(), rng.random(), interval(-1.0, 1.0, 201)),
        PartialInfimumExp => partial(PhiSpec::Exp, rng.random(), rng.random(), rng.random_range(-3.0..3.0)),
        PartialInfimumHinge => partial(PhiSpec::Hinge, rng.random(), rng.random(), rng.random_range(-3.0..3.0)),
        PartialInfimumSqHinge => partial(PhiSpec::SqHinge, rng.random(), rng.random(), rng.random_range(-3.0..3.0)),
    }
}

/// Largest `|closed − oracle|` over `draws` seeded parameter draws.
pub fn check_closed_form(id: ClosedFormId, draws: usize, seed: u64) -> Result<OracleCheck> {
    if draws == 0 {
        return input("draws must be positive");
    }
    let diffs: Vec<(f64, Vec<f64>)> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let (c, o, p) = draw_pair(id, &mut rng)?;
            Ok(((c - o).abs(), p))
        })
        .collect::<Result<_>>()?;
    let (max_discrepancy, worst_params) =
        diffs.into_iter().fold((0.0, vec![]), |acc, (d, p)| if d > acc.0 || d.is_nan() { (d, p) } else { acc });
    Ok(OracleCheck { id, draws, max_discrepancy, worst_params })
}

pub fn check_all_closed_forms(draws: usize, seed: u64) -> Result<Vec<OracleCheck>> {
    ClosedFormId::ALL.iter().map(|&id| check_closed_form(id, draws, seed)).collect()
}

/// Registered bound checkers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundId {
    /// Concave tool, linear Γ (hinge surrogate), random α and β.
    ToolsLinear,
    /// Concave tool, square-root Γ (exp, logistic, squared hinge).
    ToolsSqrt,
    /// Power form with `s = 2` on the square-root entries.
    ToolsPower,
    ConstrainedExp,
    ConstrainedHinge,
    ConstrainedSqHinge,
    /// Exponential constrained bound with label-count aware constants.
    ConstrainedExpLabelAware,
    ConstrainedSqHingeLabelAware,
    TsybakovBinaryLogistic,
    TsybakovBinaryExp,
    TsybakovBinarySqHinge,
    TsybakovMultiLogistic,
    TsybakovMultiExp,
    TsybakovMultiSqHinge,
    /// Aggregate exponential ranking bound.
    RankExp,
    /// Aggregate logistic ranking bound.
    RankLog,
    /// Pointwise exponential pair inequality.
    RankExpPair,
    /// Pointwise logistic pair inequality.
    RankLogPair,
}

impl BoundId {
    pub const ALL: [BoundId; 18] = [
        BoundId::ToolsLinear,
        BoundId::ToolsSqrt,
        BoundId::ToolsPower,
        BoundId::ConstrainedExp,
        BoundId::ConstrainedHinge,
        BoundId::ConstrainedSqHinge,
        BoundId::ConstrainedExpLabelAware,
        BoundId::ConstrainedSqHingeLabelAware,
        BoundId::TsybakovBinaryLogistic,
        BoundId::TsybakovBinaryExp,
        BoundId::TsybakovBinarySqHinge,
        BoundId::TsybakovMultiLogistic,
        BoundId::TsybakovMultiExp,
        BoundId::TsybakovMultiSqHinge,
        BoundId::RankExp,
        BoundId::RankLog,
        BoundId::RankExpPair,
        BoundId::RankLogPair,
    ];

    pub fn name(&self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Input(format!("unknown bound id {s:?}")))
    }

    /// Suite the bound belongs to in the command-line driver.
    pub fn suite(&self) -> &'static str {
        use BoundId::*;
        match self {
            ToolsLinear | ToolsSqrt | ToolsPower => "tools",
            ConstrainedExp
            | ConstrainedHinge
            | ConstrainedSqHinge
            | ConstrainedExpLabelAware
            | ConstrainedSqHingeLabelAware => "constrained",
            TsybakovBinaryLogistic
            | TsybakovBinaryExp
            | TsybakovBinarySqHinge
            | TsybakovMultiLogistic
            | TsybakovMultiExp
            | TsybakovMultiSqHinge => "tsybakov",
            RankExp | RankLog | RankExpPair | RankLogPair => "ranking",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Largest support size; instances draw 1..=max_support points.
    #[serde(default = "default_support")]
    pub max_support: usize,
    /// Largest label count for multi-class instances.
    #[serde(default = "default_labels")]
    pub max_labels: usize,
    /// Multiplies every Γ (1 for the bound itself, ½ for negative controls).
    /// Applicability is always judged with the true Γ.
    #[serde(default = "default_scale")]
    pub gamma_scale: f64,
    /// Tools only: point masses with α set to make the pointwise
    /// assumption an equality.
    #[serde(default)]
    pub tight: bool,
    /// Tools only: fixed (α, β) shapes instead of a random pick per trial.
    #[serde(default)]
    pub factors: Option<(FactorChoice, FactorChoice)>,
}

fn default_tolerance() -> f64 {
    VIOLATION_TOL
}
fn default_support() -> usize {
    6
}
fn default_labels() -> usize {
    5
}
fn default_scale() -> f64 {
    1.0
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            trials: 1000,
            seed: 0,
            tolerance: VIOLATION_TOL,
            max_support: default_support(),
            max_labels: default_labels(),
            gamma_scale: 1.0,
            tight: false,
            factors: None,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.max_support == 0 || self.max_labels < 2 {
            return Err(Error::Config("need max_support >= 1 and max_labels >= 2".into()));
        }
        if !(self.gamma_scale > 0.0 && self.gamma_scale.is_finite()) {
            return Err(Error::Config("gamma_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub bound: BoundId,
    pub trial: usize,
    pub applicable: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub worst_point: Option<i64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub bound: BoundId,
    pub trials: usize,
    pub violations: usize,
    pub inapplicable: usize,
    /// Smallest slack over applicable trials (`inf` when none applied).
    pub worst_slack: f64,
    pub gamma_scale: f64,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

fn random_scores(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    // mix wide and near-zero scorers; the latter sit close to equality
    let r = if rng.random::<f64>() < 0.3 { 0.3 } else { 3.0 };
    (0..k).map(|_| rng.random_range(-r..r)).collect()
}

fn random_sum_zero(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Result<Hypothesis> {
    let r = if rng.random::<f64>() < 0.3 { 0.3 } else { 2.5 };
    let table = (0..k)
        .map(|_| {
            let mut row: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
            let m = row.iter().sum::<f64>() / n as f64;
            row.iter_mut().for_each(|a| *a -= m);
            row
        })
        .collect();
    Hypothesis::sum_zero_tabular(table)
}

/// Shape of an α or β weight in the tool audits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorChoice {
    One,
    /// Constant drawn from `[0.5, 2)`.
    Const,
    /// Disagreement indicator plus 0.1.
    DisagreementPlusEps,
    /// Conditional error of the surrogate.
    ConditionalError,
    UMax,
}

impl FactorChoice {
    pub const ALL: [FactorChoice; 5] = [
        FactorChoice::One,
        FactorChoice::Const,
        FactorChoice::DisagreementPlusEps,
        FactorChoice::ConditionalError,
        FactorChoice::UMax,
    ];

    fn spec(self, rng: &mut ChaCha8Rng, surrogate: LossSpec) -> FactorSpec {
        match self {
            FactorChoice::One => FactorSpec::One,
            FactorChoice::Const => FactorSpec::Const { v: rng.random_range(0.5..2.0) },
            FactorChoice::DisagreementPlusEps => FactorSpec::DisagreementPlusEps { eps: 0.1 },
            FactorChoice::ConditionalError => FactorSpec::ConditionalErrorOf { loss: surrogate },
            FactorChoice::UMax => FactorSpec::UMax,
        }
    }
}

fn random_factor(rng: &mut ChaCha8Rng, surrogate: LossSpec) -> FactorSpec {
    FactorChoice::ALL[rng.random_range(0..5)].spec(rng, surrogate)
}

fn factor_name(f: &FactorSpec) -> String {
    serde_json::to_value(f)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str().map(String::from)))
        .unwrap_or_default()
}

fn binary_instance(
    rng: &mut ChaCha8Rng,
    cfg: &AuditConfig,
    trial: usize,
    features: usize,
) -> Result<DiscreteDistribution> {
    // every fifth trial is a point mass
    let k = if trial.is_multiple_of(5) { 1 } else { rng.random_range(1..=cfg.max_support) };
    sample_distribution(rng.random(), k, 2, SampleConstraints { feature_dim: features, ..SampleConstraints::default() })
}

/// One trial: the report under the true Γ and a detail string.
fn run_trial(bound: BoundId, cfg: &AuditConfig, trial: usize) -> Result<(BoundReport, String)> {
    use BoundId::*;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64 + 1);
    match bound {
        ToolsLinear | ToolsSqrt | ToolsPower => {
            let phis: &[PhiSpec] = match bound {
                ToolsLinear => &[PhiSpec::Hinge],
                _ => &[PhiSpec::Exp, PhiSpec::Logistic, PhiSpec::SqHinge],
            };
            let phi = phis[rng.random_range(0..phis.len())];
            let surrogate = LossSpec::margin(phi);
            let transform = table_transform(&surrogate, 2).expect("table entry");
            let mut setup = ToolSetup::new(LossSpec::ZeroOneBinary, surrogate, HypothesisSet::Complete, transform);
            let (dist, h) = if cfg.tight {
                let dist = sample_distribution(rng.random(), 1, 2, SampleConstraints::default())?;
                // a wrong-side score keeps both regrets positive
                let s = -(2.0 * dist.eta(0) - 1.0).signum() * rng.random_range(0.01..1.0);
                let h = Hypothesis::scalar(&[s]);
                let a = tightness_alpha(&setup, &h, &dist)?;
                setup = setup.factors(FactorSpec::Const { v: a }, FactorSpec::One);
                (dist, h)
            } else {
                let dist = binary_instance(&mut rng, cfg, trial, 0)?;
                let h = Hypothesis::scalar(&random_scores(&mut rng, dist.len()));
                setup = match cfg.factors {
                    Some((a, b)) => setup.factors(a.spec(&mut rng, surrogate), b.spec(&mut rng, surrogate)),
                    None => setup.factors(random_factor(&mut rng, surrogate), random_factor(&mut rng, surrogate)),
                };
                (dist, h)
            };
            let detail = format!(
                "{} alpha={} beta={} k={}",
                phi.name(),
                factor_name(&setup.alpha),
                factor_name(&setup.beta),
                dist.len()
            );
            let r = if bound == ToolsPower {
                let t = Transform::power(2.0, transform.scale);
                evaluate_power_bound(&ToolSetup { transform: t, ..setup }, &h, &dist)?
            } else {
                evaluate_tool_bound(&setup, &h, &dist, Variant::SupForm)?
            };
            Ok((r, detail))
        }
        ConstrainedExp
        | ConstrainedHinge
        | ConstrainedSqHinge
        | ConstrainedExpLabelAware
        | ConstrainedSqHingeLabelAware => {
            let (phi, constants) = match bound {
                ConstrainedExp => (PhiSpec::Exp, GammaConstants::Stated),
                ConstrainedHinge => (PhiSpec::Hinge, GammaConstants::Stated),
                ConstrainedSqHinge => (PhiSpec::SqHinge, GammaConstants::Stated),
                ConstrainedExpLabelAware => (PhiSpec::Exp, GammaConstants::LabelAware),
                _ => (PhiSpec::SqHinge, GammaConstants::LabelAware),
            };
            let n = rng.random_range(2..=cfg.max_labels);
            let k = if trial.is_multiple_of(5) { 1 } else { rng.random_range(1..=cfg.max_support) };
            let dist = sample_distribution(rng.random(), k, n, SampleConstraints::default())?;
            let h = random_sum_zero(&mut rng, k, n)?;
            let b = constrained_enhanced_bound_with(phi, &h, &dist, constants, 1.0)?;
            Ok((b.enhanced, format!("{} n={n} k={k} lambda={}", phi.name(), b.lambda)))
        }
        TsybakovBinaryLogistic
        | TsybakovBinaryExp
        | TsybakovBinarySqHinge
        | TsybakovMultiLogistic
        | TsybakovMultiExp
        | TsybakovMultiSqHinge => {
            let multi = matches!(bound, TsybakovMultiLogistic | TsybakovMultiExp | TsybakovMultiSqHinge);
            let (surrogate, hset) = match bound {
                TsybakovBinaryLogistic => (LossSpec::margin(PhiSpec::Logistic), HypothesisSet::Complete),
                TsybakovBinaryExp => (LossSpec::margin(PhiSpec::Exp), HypothesisSet::Complete),
                TsybakovBinarySqHinge => (LossSpec::margin(PhiSpec::SqHinge), HypothesisSet::Complete),
                TsybakovMultiLogistic => {
                    (LossSpec::CompSum { family: CompSumFamily::MultinomialLogistic }, HypothesisSet::Complete)
                }
                TsybakovMultiExp => (LossSpec::constrained(PhiSpec::Exp), HypothesisSet::SumZeroComplete),
                _ => (LossSpec::constrained(PhiSpec::SqHinge), HypothesisSet::SumZeroComplete),
            };
            let n = if multi { rng.random_range(3..=cfg.max_labels.max(3)) } else { 2 };
            let k = if trial.is_multiple_of(5) { 1 } else { rng.random_range(1..=cfg.max_support) };
            let dist = sample_distribution(
                rng.random(),
                k,
                n,
                SampleConstraints { massart_floor: Some(0.3), ..SampleConstraints::default() },
            )?;
            let h = match (multi, &surrogate) {
                (false, _) => Hypothesis::scalar(&random_scores(&mut rng, k)),
                (true, LossSpec::Constrained { .. }) => random_sum_zero(&mut rng, k, n)?,
                (true, _) => Hypothesis::tabular((0..k).map(|_| random_scores(&mut rng, n)).collect()),
            };
            let alpha = rng.random_range(0.05..0.95);
            let noise = fit_tsybakov_envelope(&dist, alpha)?;
            let setting = if multi { Setting::Multiclass } else { Setting::Binary };
            let setup = TsybakovSetup::new(setting, surrogate, hset, 2.0)?;
            let r = tsybakov_bound(&setup, &h, &dist, &noise)?;
            Ok((
                r,
                format!(
                    "{} n={n} k={k} alpha={alpha:.3} K={}",
                    surrogate.name(),
                    tsybakov_scale(&surrogate).unwrap_or(f64::NAN)
                ),
            ))
        }
        RankExp | RankLog | RankExpPair | RankLogPair => {
            let dist = binary_instance(&mut rng, cfg, trial, 0)?;
            let h = Hypothesis::scalar(&random_scores(&mut rng, dist.len()));
            let r = match bound {
                RankExp => exp_ranking_bound(&h, &dist)?,
                RankLog => log_ranking_bound(&h, &dist)?,
                RankExpPair => pair_inequality_report(PairFactor::ExpError, &h, &dist, 1.0)?,
                _ => pair_inequality_report(PairFactor::UMax, &h, &dist, 1.0)?,
            };
            Ok((r, format!("k={}", dist.len())))
        }
    }
}

/// Runs `cfg.trials` seeded instances through the named checker. Trials
/// whose theorem hypothesis fails are counted as inapplicable, never as
/// violations.
pub fn audit_bound(cfg: &AuditConfig, bound: BoundId) -> Result<AuditSummary> {
    cfg.validate()?;
    if cfg.tight && bound.suite() != "tools" {
        return input("tight instances exist for the tool bounds only");
    }
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let (r, detail) = run_trial(bound, cfg, t)?;
            let rhs = cfg.gamma_scale * r.rhs;
            Ok(TrialRecord {
                bound,
                trial: t,
                applicable: r.applicable,
                lhs: r.lhs,
                rhs,
                slack: rhs - r.lhs,
                worst_point: r.worst_point,
                detail,
            })
        })
        .collect::<Result<_>>()?;
    let violations = records.iter().filter(|r| r.applicable && r.slack < -cfg.tolerance).count();
    let inapplicable = records.iter().filter(|r| !r.applicable).count();
    let worst_slack = records.iter().filter(|r| r.applicable).map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Ok(AuditSummary {
        bound,
        trials: cfg.trials,
        violations,
        inapplicable,
        worst_slack,
        gamma_scale: cfg.gamma_scale,
        records,
    })
}

pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bound", "trial", "applicable", "lhs", "rhs", "slack", "worst_point", "detail"])?;
    for r in records {
        w.write_record([
            r.bound.name(),
            r.trial.to_string(),
            r.applicable.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.worst_point.map(|p| p.to_string()).unwrap_or_default(),
            r.detail.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Comparison of the two γ(h) forms of the tool bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkgAudit {
    pub trials: usize,
    /// Trials where the monotonicity precondition held.
    pub compared: usize,
    /// Largest `γ_fkg − γ_sup` (should be ≤ 0).
    pub worst_excess: f64,
    /// Applicable trials where the FKG-form bound failed.
    pub violations: usize,
}

pub fn audit_fkg(cfg: &AuditConfig) -> Result<FkgAudit> {
    cfg.validate()?;
    let rows: Vec<Option<(f64, bool)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xf6);
            rng.set_stream(t as u64);
            let k = rng.random_range(2..=cfg.max_support.clamp(2, 4));
            let dist = sample_distribution(
                rng.random(),
                k,
                2,
                SampleConstraints { feature_dim: 1, ..SampleConstraints::default() },
            )?;
            let phi = [PhiSpec::Hinge, PhiSpec::Exp, PhiSpec::Logistic, PhiSpec::SqHinge][rng.random_range(0..4)];
            let surrogate = LossSpec::margin(phi);
            let setup = ToolSetup::new(
                LossSpec::ZeroOneBinary,
                surrogate,
                HypothesisSet::Complete,
                table_transform(&surrogate, 2).expect("entry"),
            )
            .factors(random_factor(&mut rng, surrogate), random_factor(&mut rng, surrogate));
            let h = Hypothesis::scalar(&random_scores(&mut rng, k));
            let sup = evaluate_tool_bound(&setup, &h, &dist, Variant::SupForm)?;
            match evaluate_tool_bound(&setup, &h, &dist, Variant::FkgForm) {
                Ok(f) => Ok(Some((f.gamma_h - sup.gamma_h, f.applicable && f.slack < -cfg.tolerance))),
                Err(Error::Precondition(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let cmp: Vec<(f64, bool)> = rows.into_iter().flatten().collect();
    Ok(FkgAudit {
        trials: cfg.trials,
        compared: cmp.len(),
        worst_excess: cmp.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max),
        violations: cmp.iter().filter(|c| c.1).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_pair_example() {
        let r = grid_infimum(
            |d| 0.36 * (-d[0]).exp() + 0.06 * d[0].exp(),
            &Domain::Interval { lo: -10.0, hi: 10.0, points: 201 },
        )
        .unwrap();
        assert!((r.value - 2.0 * (0.36f64 * 0.06).sqrt()).abs() < 1e-12);
        assert!((r.value - 0.293939).abs() < 1e-6);
        assert!((r.argmin[0] - 0.5 * 6f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn hinge_at_half_and_constant() {
        let l = LossSpec::margin(PhiSpec::Hinge);
        let r = grid_infimum(
            |u| conditional_error_scores(&l, &[0.5, 0.5], u).unwrap(),
            &Domain::Interval { lo: -1.0, hi: 1.0, points: 21 },
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let c = grid_infimum(|_| 3.5, &Domain::Box { lo: vec![0.0; 2], hi: vec![1.0; 2], points: 5 }).unwrap();
        assert_eq!(c.value, 3.5);
    }

    #[test]
    fn non_finite_is_an_error() {
        let r = grid_infimum(|x| 1.0 / x[0], &Domain::Interval { lo: 0.0, hi: 1.0, points: 3 });
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn closed_forms_small_run() {
        for c in check_all_closed_forms(20, 1).unwrap() {
            assert!(c.max_discrepancy <= 1e-6, "{c:?}");
        }
    }

    #[test]
    fn ids_round_trip() {
        for b in BoundId::ALL {
            assert_eq!(BoundId::parse(&b.name()).unwrap(), b);
        }
        assert!(BoundId::parse("nope").is_err());
    }

    #[test]
    fn tight_probe_and_negative_control() {
        let cfg = AuditConfig { trials: 1, tight: true, ..AuditConfig::default() };
        let s = audit_bound(&cfg, BoundId::ToolsLinear).unwrap();
        assert!(s.worst_slack.abs() <= 1e-9);
        let bad = AuditConfig { trials: 50, tight: true, gamma_scale: 0.5, ..AuditConfig::default() };
        assert!(audit_bound(&bad, BoundId::ToolsSqrt).unwrap().violations > 0);
    }
}
