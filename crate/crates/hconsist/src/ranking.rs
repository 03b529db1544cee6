//! Bipartite ranking: pair conditional errors and regrets, the ranking
//! tool, the family test for ranking calibration, the exponential and
//! logistic pair inequalities, and the hinge counterexample.
//!
//! Pair `(x, x')` carries weights `a = η(x)(1 − η(x'))` (the `(+1, −1)`
//! labelling) and `b = η(x')(1 − η(x))`, and with `δ = h(x) − h(x')` a
//! pair loss built from Φ costs `a·Φ(δ) + b·Φ(−δ)`.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate_factor, BoundReport, FactorSpec, Transform, HYPOTHESIS_TOL};
use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{LossSpec, PhiSpec};
use crate::optim::{gradient_descent, GdOptions};
use crate::regret::{conditional_error, regrets, scalar_protocol, HypothesisSet, Method, BRACKET};

fn binary_only(dist: &DiscreteDistribution) -> Result<()> {
    if !dist.is_binary() {
        return input("ranking needs a binary distribution");
    }
    Ok(())
}

/// `(a, b)` for the pair at indices `(x, xp)`.
pub fn pair_weights(dist: &DiscreteDistribution, x: usize, xp: usize) -> (f64, f64) {
    let (e, ep) = (dist.eta(x), dist.eta(xp));
    (e * (1.0 - ep), ep * (1.0 - e))
}

fn pair_phi(loss: &LossSpec) -> Result<Option<PhiSpec>> {
    match loss {
        LossSpec::RankingPair { phi } => Ok(Some(*phi)),
        LossSpec::RankingZeroOne => Ok(None),
        other => input(format!("{} is not a pair loss", other.name())),
    }
}

/// `a·L(δ) + b·L(−δ)` for a pair loss given the score difference δ.
pub fn pair_conditional_from_diff(loss: &LossSpec, a: f64, b: f64, delta: f64) -> Result<f64> {
    Ok(match pair_phi(loss)? {
        Some(phi) => {
            let fa = if a > 0.0 { a * phi.eval(delta) } else { 0.0 };
            let fb = if b > 0.0 { b * phi.eval(-delta) } else { 0.0 };
            fa + fb
        }
        None => {
            if delta > 0.0 {
                b
            } else if delta < 0.0 {
                a
            } else {
                0.5 * (a + b)
            }
        }
    })
}

pub fn pair_conditional_error(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    x: usize,
    xp: usize,
) -> Result<f64> {
    binary_only(dist)?;
    dist.check_index(x)?;
    dist.check_index(xp)?;
    let (a, b) = pair_weights(dist, x, xp);
    pair_conditional_from_diff(loss, a, b, h.score(dist, x)? - h.score(dist, xp)?)
}

/// `inf_δ a·L(δ) + b·L(−δ)`; closed forms where available.
pub fn pair_best_from_weights(loss: &LossSpec, a: f64, b: f64) -> Result<(f64, Method)> {
    loss.validate()?;
    if a == 0.0 || b == 0.0 {
        // the remaining side can be driven to its infimum 0
        pair_phi(loss)?;
        return Ok((0.0, Method::ClosedForm));
    }
    let closed = match pair_phi(loss)? {
        None => Some(a.min(b)),
        Some(PhiSpec::Exp) => Some(2.0 * (a * b).sqrt()),
        Some(PhiSpec::Hinge) => Some(2.0 * a.min(b)),
        Some(PhiSpec::Logistic) => Some(a * ((a + b) / a).ln() + b * ((a + b) / b).ln()),
        Some(PhiSpec::SqHinge) => Some(4.0 * a * b / (a + b)),
        Some(_) => None,
    };
    match closed {
        Some(v) => Ok((v, Method::ClosedForm)),
        None => {
            let (_, v, m) = scalar_protocol(|d| pair_conditional_from_diff(loss, a, b, d).unwrap(), -BRACKET, BRACKET);
            Ok((v, m))
        }
    }
}

/// `C̄*(H, x, x')` over the complete set. On the diagonal the score
/// difference is pinned at 0.
pub fn pair_best_in_class(
    loss: &LossSpec,
    dist: &DiscreteDistribution,
    x: usize,
    xp: usize,
    hset: &HypothesisSet,
) -> Result<(f64, Method)> {
    binary_only(dist)?;
    if *hset != HypothesisSet::Complete {
        return Err(Error::Unsupported("pair best-in-class needs the complete set".into()));
    }
    dist.check_index(x)?;
    dist.check_index(xp)?;
    let (a, b) = pair_weights(dist, x, xp);
    if x == xp {
        return Ok((pair_conditional_from_diff(loss, a, b, 0.0)?, Method::ClosedForm));
    }
    pair_best_from_weights(loss, a, b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRegretRecord {
    pub x: i64,
    pub x_prime: i64,
    pub cond_error: f64,
    pub best_in_class: f64,
    pub regret: f64,
}

/// Records for every ordered pair, diagonal included, row-major.
pub fn pair_regret_records(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
) -> Result<Vec<PairRegretRecord>> {
    binary_only(dist)?;
    let k = dist.len();
    (0..k * k)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            let c = pair_conditional_error(loss, h, dist, i, j)?;
            let (best, _) = pair_best_in_class(loss, dist, i, j, &HypothesisSet::Complete)?;
            Ok(PairRegretRecord {
                x: dist.id(i),
                x_prime: dist.id(j),
                cond_error: c,
                best_in_class: best,
                regret: c - best,
            })
        })
        .collect()
}

fn pair_mass(dist: &DiscreteDistribution, idx: usize) -> f64 {
    let k = dist.len();
    dist.marginal()[idx / k] * dist.marginal()[idx % k]
}

/// `E_L(h)` as the exact double sum over ordered pairs.
pub fn ranking_generalization_error(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    binary_only(dist)?;
    let k = dist.len();
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            s += dist.marginal()[i] * dist.marginal()[j] * pair_conditional_error(loss, h, dist, i, j)?;
        }
    }
    Ok(s)
}

/// `E_{X,X'}[ΔC̄(h, X, X')]`, which equals the estimation error plus the gap.
pub fn expected_pair_regret(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    let recs = pair_regret_records(loss, h, dist)?;
    Ok(recs.iter().enumerate().map(|(idx, r)| pair_mass(dist, idx) * r.regret).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankingBest {
    pub value: f64,
    /// Minimizing score per support point, first point pinned at 0.
    pub scores: Vec<f64>,
    pub converged: bool,
    /// Non-convex Φ: multi-start result without a global guarantee.
    pub approximate: bool,
}

pub const RANKING_GRAD_TOL: f64 = 1e-10;
const RANKING_STARTS: usize = 20;

/// `E*_L` over the complete set: minimizes the double sum over the score
/// table with the first score pinned at 0.
pub fn ranking_best_in_class_error(loss: &LossSpec, dist: &DiscreteDistribution) -> Result<RankingBest> {
    binary_only(dist)?;
    let phi = match pair_phi(loss)? {
        Some(phi) if phi.is_smooth() => phi,
        _ => return Err(Error::Unsupported(format!("ranking best-in-class needs a smooth Φ, got {}", loss.name()))),
    };
    let k = dist.len();
    if k == 1 {
        let (a, b) = pair_weights(dist, 0, 0);
        let v = dist.marginal()[0].powi(2) * pair_conditional_from_diff(loss, a, b, 0.0)?;
        return Ok(RankingBest { value: v, scores: vec![0.0], converged: true, approximate: false });
    }
    let m = dist.marginal();
    let objective = |free: &[f64]| {
        let s = |i: usize| if i == 0 { 0.0 } else { free[i - 1] };
        let mut v = 0.0;
        let mut g = vec![0.0; k - 1];
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let w = m[i] * m[j];
                let (a, b) = pair_weights(dist, i, j);
                let d = s(i) - s(j);
                v += w * (a * phi.eval(d) + b * phi.eval(-d));
                let dd = w * (a * phi.derivative(d) - b * phi.derivative(-d));
                if i > 0 {
                    g[i - 1] += dd;
                }
                if j > 0 {
                    g[j - 1] -= dd;
                }
            }
        }
        (v, g)
    };
    let diag: f64 = (0..k)
        .map(|i| {
            let (a, b) = pair_weights(dist, i, i);
            m[i] * m[i] * (a + b) * phi.eval(0.0)
        })
        .sum();
    let opts = GdOptions { grad_tol: RANKING_GRAD_TOL, ..GdOptions::default() };
    let approximate = !phi.is_convex();
    let starts = if approximate { RANKING_STARTS } else { 1 };
    let mut best: Option<crate::optim::GdResult> = None;
    for st in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(st as u64);
        let x0: Vec<f64> = (1..k).map(|_| if st == 0 { 0.0 } else { rng.random_range(-3.0..3.0) }).collect();
        let r = gradient_descent(objective, &x0, opts);
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    let r = best.expect("at least one start");
    let mut scores = vec![0.0];
    scores.extend_from_slice(&r.x);
    Ok(RankingBest { value: r.value + diag, scores, converged: r.converged, approximate })
}

/// `E*_L − E_{X,X'}[C̄*]` over the complete set.
pub fn ranking_minimizability_gap(loss: &LossSpec, dist: &DiscreteDistribution) -> Result<f64> {
    let best = ranking_best_in_class_error(loss, dist)?;
    let k = dist.len();
    let mut inner = 0.0;
    for i in 0..k {
        for j in 0..k {
            inner += dist.marginal()[i]
                * dist.marginal()[j]
                * pair_best_in_class(loss, dist, i, j, &HypothesisSet::Complete)?.0;
        }
    }
    Ok(best.value - inner)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub calibrated: bool,
    /// Mean fitted ν when Φ′ < 0 on the whole grid.
    pub nu: Option<f64>,
    /// Spread (max − min) of the fitted ν over the grid.
    pub spread: f64,
    /// First candidate within tolerance of the fitted ν.
    pub matched: Option<f64>,
}

pub const CALIBRATION_STEP: f64 = 1e-6;
pub const CALIBRATION_TOL: f64 = 1e-5;

/// `t ∈ {±0.1, ±0.2, …, ±5}`.
pub fn default_calibration_grid() -> Vec<f64> {
    (1..=50).flat_map(|i| [i as f64 / 10.0, -(i as f64) / 10.0]).collect()
}

/// Tests `Φ′(t)/Φ′(−t) = e^{−νt}` with a constant ν > 0 over the grid,
/// using central differences.
pub fn calibration_family_check(phi: PhiSpec, nu_candidates: &[f64], grid: &[f64]) -> Calibration {
    let d = |t: f64| (phi.eval(t + CALIBRATION_STEP) - phi.eval(t - CALIBRATION_STEP)) / (2.0 * CALIBRATION_STEP);
    let mut nus = Vec::with_capacity(grid.len());
    for &t in grid.iter().filter(|t| **t != 0.0) {
        let (p, q) = (d(t), d(-t));
        if !(p < 0.0 && q < 0.0) {
            return Calibration { calibrated: false, nu: None, spread: f64::INFINITY, matched: None };
        }
        nus.push((p / q).ln() / -t);
    }
    if nus.is_empty() {
        return Calibration { calibrated: false, nu: None, spread: f64::INFINITY, matched: None };
    }
    let lo = nus.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let nu = nus.iter().sum::<f64>() / nus.len() as f64;
    let spread = hi - lo;
    let matched = nu_candidates.iter().cloned().find(|c| (c - nu).abs() <= CALIBRATION_TOL);
    Calibration { calibrated: spread <= CALIBRATION_TOL && nu > CALIBRATION_TOL, nu: Some(nu), spread, matched }
}

/// Per-point factor in a pair inequality `ΔC̄ ≤ f(x')·ΔC(x) + f(x)·ΔC(x')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFactor {
    /// `f = C_exp(h, ·)`.
    ExpError,
    /// `f = max(η, 1 − η)`.
    UMax,
    /// `f ≡ 1`.
    Unit,
}

impl PairFactor {
    fn phi(&self) -> PhiSpec {
        match self {
            PairFactor::ExpError => PhiSpec::Exp,
            _ => PhiSpec::Logistic,
        }
    }

    fn factor_spec(&self) -> FactorSpec {
        match self {
            PairFactor::ExpError => FactorSpec::ConditionalErrorOf { loss: LossSpec::margin(PhiSpec::Exp) },
            PairFactor::UMax => FactorSpec::UMax,
            PairFactor::Unit => FactorSpec::One,
        }
    }
}

struct PairInputs {
    point_regret: Vec<f64>,
    factor: Vec<f64>,
    pair_regret: Vec<f64>,
}

fn pair_inputs(kind: PairFactor, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<PairInputs> {
    binary_only(dist)?;
    let phi = kind.phi();
    let point_regret = regrets(&LossSpec::margin(phi), h, dist, &HypothesisSet::Complete)?;
    let factor = evaluate_factor(&kind.factor_spec(), h, dist, None)?;
    let pair_regret =
        pair_regret_records(&LossSpec::RankingPair { phi }, h, dist)?.into_iter().map(|r| r.regret).collect();
    Ok(PairInputs { point_regret, factor, pair_regret })
}

impl PairInputs {
    fn residual(&self, k: usize, idx: usize, scale: f64) -> f64 {
        let (i, j) = (idx / k, idx % k);
        scale * (self.factor[j] * self.point_regret[i] + self.factor[i] * self.point_regret[j]) - self.pair_regret[idx]
    }
}

fn pair_residual(kind: PairFactor, h: &Hypothesis, dist: &DiscreteDistribution, x: usize, xp: usize) -> Result<f64> {
    dist.check_index(x)?;
    dist.check_index(xp)?;
    let inp = pair_inputs(kind, h, dist)?;
    Ok(inp.residual(dist.len(), x * dist.len() + xp, 1.0))
}

/// `C_exp(h,x')·ΔC(h,x) + C_exp(h,x)·ΔC(h,x') − ΔC̄_exp(h,x,x')`.
pub fn exp_pair_inequality(h: &Hypothesis, dist: &DiscreteDistribution, x: usize, xp: usize) -> Result<f64> {
    pair_residual(PairFactor::ExpError, h, dist, x, xp)
}

/// `u(x')·ΔC(h,x) + u(x)·ΔC(h,x') − ΔC̄_log(h,x,x')` with `u = max(η, 1 − η)`.
pub fn log_pair_inequality(h: &Hypothesis, dist: &DiscreteDistribution, x: usize, xp: usize) -> Result<f64> {
    pair_residual(PairFactor::UMax, h, dist, x, xp)
}

/// `ΔC(h,x) + ΔC(h,x') − ΔC̄_log(h,x,x')`.
pub fn log_pair_inequality_unit(h: &Hypothesis, dist: &DiscreteDistribution, x: usize, xp: usize) -> Result<f64> {
    pair_residual(PairFactor::Unit, h, dist, x, xp)
}

/// All pair residuals, row-major over ordered pairs.
pub fn pair_inequality_residuals(kind: PairFactor, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<Vec<f64>> {
    let inp = pair_inputs(kind, h, dist)?;
    let k = dist.len();
    Ok((0..k * k).map(|idx| inp.residual(k, idx, 1.0)).collect())
}

/// The pair inequality as a bound: lhs and rhs at the pair with the
/// smallest residual among pairs of positive mass, right side times `scale`.
pub fn pair_inequality_report(
    kind: PairFactor,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    scale: f64,
) -> Result<BoundReport> {
    let inp = pair_inputs(kind, h, dist)?;
    let k = dist.len();
    let res: Vec<f64> = (0..k * k).map(|idx| inp.residual(k, idx, scale)).collect();
    let worst = (0..k * k)
        .filter(|&idx| pair_mass(dist, idx) > 0.0)
        .min_by(|a, b| res[*a].total_cmp(&res[*b]))
        .ok_or_else(|| Error::Input("no pair of positive mass".into()))?;
    let lhs = inp.pair_regret[worst];
    let mut r = BoundReport::new(lhs, lhs + res[worst], scale, true);
    r.worst_point = Some(dist.id(worst / k));
    r.per_point = res;
    Ok(r.note("worst_pair_second", dist.id(worst % k) as f64))
}

/// Pair assumption `ΔC̄_L ≤ Γ₁(α₁(x')·ΔC(x)) + Γ₂(α₂(x)·ΔC(x'))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankingTool {
    pub target: LossSpec,
    pub surrogate: LossSpec,
    pub gamma1: Transform,
    pub gamma2: Transform,
    pub alpha1: FactorSpec,
    pub alpha2: FactorSpec,
}

impl RankingTool {
    pub fn exp() -> Self {
        let a = FactorSpec::ConditionalErrorOf { loss: LossSpec::margin(PhiSpec::Exp) };
        RankingTool {
            target: LossSpec::RankingPair { phi: PhiSpec::Exp },
            surrogate: LossSpec::margin(PhiSpec::Exp),
            gamma1: Transform::identity(),
            gamma2: Transform::identity(),
            alpha1: a,
            alpha2: a,
        }
    }

    pub fn log() -> Self {
        RankingTool {
            target: LossSpec::RankingPair { phi: PhiSpec::Logistic },
            surrogate: LossSpec::margin(PhiSpec::Logistic),
            gamma1: Transform::identity(),
            gamma2: Transform::identity(),
            alpha1: FactorSpec::UMax,
            alpha2: FactorSpec::UMax,
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        RankingTool { gamma1: self.gamma1.scaled(k), gamma2: self.gamma2.scaled(k), ..self }
    }
}

/// `rhs = Γ₁(E[α₁]·D) + Γ₂(E[α₂]·D)` with D the expected surrogate regret.
/// Inapplicable when the pair assumption fails on a pair of positive mass.
pub fn ranking_tool_bound(tool: &RankingTool, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<BoundReport> {
    binary_only(dist)?;
    tool.gamma1.validate()?;
    tool.gamma2.validate()?;
    let k = dist.len();
    let dc = regrets(&tool.surrogate, h, dist, &HypothesisSet::Complete)?;
    let a1 = evaluate_factor(&tool.alpha1, h, dist, None)?;
    let a2 = evaluate_factor(&tool.alpha2, h, dist, None)?;
    let pr: Vec<f64> = pair_regret_records(&tool.target, h, dist)?.into_iter().map(|r| r.regret).collect();
    let res: Vec<f64> = (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            tool.gamma1.gamma(a1[j] * dc[i].max(0.0)) + tool.gamma2.gamma(a2[i] * dc[j].max(0.0)) - pr[idx]
        })
        .collect();
    let applicable = (0..k * k).all(|idx| pair_mass(dist, idx) == 0.0 || res[idx] >= -HYPOTHESIS_TOL);
    let d = dist.expect(|i| dc[i]);
    let (g1, g2) = (dist.expect(|i| a1[i]), dist.expect(|i| a2[i]));
    let lhs: f64 = (0..k * k).map(|idx| pair_mass(dist, idx) * pr[idx]).sum();
    let rhs = tool.gamma1.gamma(g1 * d) + tool.gamma2.gamma(g2 * d);
    let worst = (0..k * k).min_by(|a, b| res[*a].total_cmp(&res[*b]));
    let mut r = BoundReport::new(lhs, rhs, g1, applicable);
    r.worst_point = worst.map(|w| dist.id(w / k));
    r.per_point = res;
    let offset = tool.gamma1.offset + tool.gamma2.offset;
    if offset > 0.0 {
        r = r.note("gamma_zero_offset", offset);
    }
    Ok(r.note("gamma2_h", g2).note("surrogate_regret", d))
}

/// Right-hand side of the tool with the surrogate regret replaced by `d`,
/// e.g. a high-probability upper estimate of it.
pub fn ranking_tool_rhs(tool: &RankingTool, h: &Hypothesis, dist: &DiscreteDistribution, d: f64) -> Result<f64> {
    binary_only(dist)?;
    let a1 = evaluate_factor(&tool.alpha1, h, dist, None)?;
    let a2 = evaluate_factor(&tool.alpha2, h, dist, None)?;
    let (g1, g2) = (dist.expect(|i| a1[i]), dist.expect(|i| a2[i]));
    Ok(tool.gamma1.gamma(g1 * d) + tool.gamma2.gamma(g2 * d))
}

/// `E[ΔC̄_exp] ≤ 2·E_exp(h)·E[ΔC_exp]`.
pub fn exp_ranking_bound(h: &Hypothesis, dist: &DiscreteDistribution) -> Result<BoundReport> {
    exp_ranking_bound_scaled(h, dist, 1.0)
}

pub fn exp_ranking_bound_scaled(h: &Hypothesis, dist: &DiscreteDistribution, scale: f64) -> Result<BoundReport> {
    ranking_tool_bound(&RankingTool::exp().scaled(scale), h, dist)
}

/// `E[ΔC̄_log] ≤ 2·E[u(X)]·E[ΔC_log]`. The pair inequality behind it can
/// fail at individual pairs, so the aggregate is evaluated without that
/// gate; the smallest pair residual is kept as `pointwise_min_residual`.
pub fn log_ranking_bound(h: &Hypothesis, dist: &DiscreteDistribution) -> Result<BoundReport> {
    log_ranking_bound_scaled(h, dist, 1.0)
}

pub fn log_ranking_bound_scaled(h: &Hypothesis, dist: &DiscreteDistribution, scale: f64) -> Result<BoundReport> {
    let mut r = ranking_tool_bound(&RankingTool::log().scaled(scale), h, dist)?;
    let k = dist.len();
    let min_res =
        (0..k * k).filter(|&idx| pair_mass(dist, idx) > 0.0).map(|idx| r.per_point[idx]).fold(f64::INFINITY, f64::min);
    r.applicable = true;
    Ok(r.note("pointwise_min_residual", min_res))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HingeCounterexample {
    pub dist: DiscreteDistribution,
    /// The scorer `h₀ ≡ 1`.
    pub h: Hypothesis,
    pub point_regrets: [f64; 2],
    /// Hinge pair regret at `(x₀, x₀')`.
    pub delta_pair_regret: f64,
    /// Lower bound on `Γ₁(0) + Γ₂(0)` witnessed by this instance.
    pub implied_floor: f64,
}

/// Two points with `η(x₀) = eta0 > η(x₀') = eta0p > ½` and `h₀ ≡ 1`: both
/// hinge point regrets vanish while the pair regret is `eta0 − eta0p`.
pub fn hinge_counterexample(eta0: f64, eta0p: f64) -> Result<HingeCounterexample> {
    if !(eta0 <= 1.0 && eta0 > eta0p && eta0p > 0.5) {
        return input(format!("need 1 >= eta0 > eta0p > 1/2, got ({eta0}, {eta0p})"));
    }
    let dist = DiscreteDistribution::binary(&[eta0, eta0p], &[0.5, 0.5])?;
    let h = Hypothesis::scalar(&[1.0, 1.0]);
    let pr = regrets(&LossSpec::margin(PhiSpec::Hinge), &h, &dist, &HypothesisSet::Complete)?;
    let hinge = LossSpec::RankingPair { phi: PhiSpec::Hinge };
    let c = pair_conditional_error(&hinge, &h, &dist, 0, 1)?;
    let (best, _) = pair_best_in_class(&hinge, &dist, 0, 1, &HypothesisSet::Complete)?;
    let delta = c - best;
    Ok(HingeCounterexample { dist, h, point_regrets: [pr[0], pr[1]], delta_pair_regret: delta, implied_floor: delta })
}

/// Largest pair regret over the queried parameters: every Γ₁, Γ₂ pair
/// bounding hinge pair regrets by point regrets needs `Γ₁(0) + Γ₂(0)` at
/// least this large.
pub fn implied_floor(queries: &[(f64, f64)]) -> Result<f64> {
    let mut floor = 0.0f64;
    for &(a, b) in queries {
        floor = floor.max(hinge_counterexample(a, b)?.delta_pair_regret);
    }
    Ok(floor)
}

/// CSV with header `x,x_prime,cond_error,best_in_class,regret,residual`.
pub fn write_pair_csv<W: Write>(records: &[PairRegretRecord], residuals: &[f64], out: W) -> Result<()> {
    if records.len() != residuals.len() {
        return input("one residual per pair record");
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "x_prime", "cond_error", "best_in_class", "regret", "residual"])?;
    for (r, res) in records.iter().zip(residuals) {
        w.write_record([
            r.x.to_string(),
            r.x_prime.to_string(),
            r.cond_error.to_string(),
            r.best_in_class.to_string(),
            r.regret.to_string(),
            res.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sum of the pointwise exponential losses: `E_exp(h)`.
pub fn exp_generalization(h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    let l = LossSpec::margin(PhiSpec::Exp);
    let mut s = 0.0;
    for i in 0..dist.len() {
        s += dist.marginal()[i] * conditional_error(&l, h, dist, i)?;
    }
    Ok(s)
}
