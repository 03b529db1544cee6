//! Conditional errors, best-in-class conditional errors, regrets, and the
//! estimation-level quantities built from them (generalization error,
//! best-in-class error, minimizability gap).

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{loss_from_scores, softmax, CompSumFamily, LossSpec, PhiSpec};
use crate::optim::{grid_then_golden, project_ball, projected_gradient_descent, GdOptions};

/// Score bracket for numeric minimization.
pub const BRACKET: f64 = 50.0;
pub const GRID_POINTS: usize = 10_000;
pub const GOLDEN_TOL: f64 = 1e-10;
pub const REGRET_TOL: f64 = 1e-10;

pub const LINEAR_RESTARTS: usize = 20;
pub const LINEAR_GRAD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisSet {
    Complete,
    SymmetricComplete,
    SumZeroComplete,
    /// Scores restricted to `[-b, b]`; `b = 0` leaves only the zero scorer.
    Bounded {
        b: f64,
    },
    /// `h(x) = W φ(x)` with Frobenius norm `‖W‖ ≤ w`.
    LinearClass {
        dim: usize,
        w: f64,
    },
}

impl HypothesisSet {
    /// Best-in-class quantities decouple across support points.
    pub fn is_decoupled(&self) -> bool {
        !matches!(self, HypothesisSet::LinearClass { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            HypothesisSet::Bounded { b } if !(b >= 0.0 && b.is_finite()) => {
                input(format!("bound {b} must be finite and >= 0"))
            }
            HypothesisSet::LinearClass { w, .. } if !(w > 0.0) => input(format!("weight bound {w} must be positive")),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    GridRefined,
    ConvexSolve,
    /// Grid minimum on the bracket edge: the infimum may lie beyond it.
    GridBoundary,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::GridRefined => "grid_refined",
            Method::ConvexSolve => "convex_solve",
            Method::GridBoundary => "grid_boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub x: i64,
    pub conditional_error: f64,
    pub best_in_class: f64,
    pub regret: f64,
    pub method: Method,
}

/// `η Φ(h) + (1 − η) Φ(−h)`.
pub fn binary_conditional(phi: PhiSpec, eta: f64, h: f64) -> f64 {
    let a = if eta > 0.0 { eta * phi.eval(h) } else { 0.0 };
    let b = if eta < 1.0 { (1.0 - eta) * phi.eval(-h) } else { 0.0 };
    a + b
}

/// Unconstrained minimizer of [`binary_conditional`] for convex Φ (may be ±∞).
pub fn binary_minimizer(phi: PhiSpec, eta: f64) -> Option<f64> {
    let logit = (eta / (1.0 - eta)).ln();
    match phi {
        PhiSpec::Exp => Some(0.5 * logit),
        PhiSpec::Logistic => Some(logit),
        PhiSpec::Hinge => Some(if eta > 0.5 {
            1.0
        } else if eta < 0.5 {
            -1.0
        } else {
            0.0
        }),
        PhiSpec::SqHinge => Some(2.0 * eta - 1.0),
        _ => None,
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Closed-form `inf_h η Φ(h) + (1 − η) Φ(−h)` over all reals, convex Φ.
pub fn binary_best_closed(phi: PhiSpec, eta: f64) -> Option<f64> {
    match phi {
        PhiSpec::Hinge => Some(2.0 * eta.min(1.0 - eta)),
        PhiSpec::Exp => Some(2.0 * (eta * (1.0 - eta)).sqrt()),
        PhiSpec::Logistic => Some(-xlogx(eta) - xlogx(1.0 - eta)),
        PhiSpec::SqHinge => Some(4.0 * eta * (1.0 - eta)),
        _ => None,
    }
}

fn grid_method(at_boundary: bool) -> Method {
    if at_boundary {
        Method::GridBoundary
    } else {
        Method::GridRefined
    }
}

/// Bracketed grid + golden-section minimization of a scalar objective on
/// `[lo, hi]` with the fixed protocol constants.
pub fn scalar_protocol<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64, Method) {
    let m = grid_then_golden(f, lo, hi, GRID_POINTS, GOLDEN_TOL);
    (m.x, m.value, grid_method(m.at_boundary))
}

fn binary_eta(p: &[f64]) -> Result<f64> {
    if p.len() != 2 {
        return input(format!("binary loss on a {}-label conditional", p.len()));
    }
    Ok(p[0])
}

fn max_prob(p: &[f64]) -> f64 {
    p.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// `C*` for constrained losses over sum-zero scores, closed forms.
pub fn constrained_best(phi: PhiSpec, p: &[f64]) -> Result<f64> {
    let n = p.len() as f64;
    let pm = max_prob(p);
    match phi {
        PhiSpec::Hinge => Ok(n * (1.0 - pm)),
        PhiSpec::RhoMargin { .. } => Ok(1.0 - pm),
        PhiSpec::Exp => {
            if p.iter().any(|&q| q >= 1.0) {
                return Ok(0.0);
            }
            let mean_log: f64 = p.iter().map(|q| (1.0 - q).ln()).sum::<f64>() / n;
            Ok(n * mean_log.exp())
        }
        PhiSpec::SqHinge => {
            if p.iter().any(|&q| q >= 1.0) {
                return Ok(0.0);
            }
            Ok(n * n / p.iter().map(|q| 1.0 / (1.0 - q)).sum::<f64>())
        }
        other => input(format!("no constrained form for {}", other.name())),
    }
}

/// `C*` for comp-sum losses over all score vectors, closed forms.
pub fn comp_sum_best(family: CompSumFamily, p: &[f64]) -> f64 {
    match family {
        CompSumFamily::MultinomialLogistic => -p.iter().map(|q| xlogx(*q)).sum::<f64>(),
        CompSumFamily::SumExp => {
            let s: f64 = p.iter().map(|q| q.sqrt()).sum();
            s * s - 1.0
        }
        CompSumFamily::Gce { a } => {
            let r = 1.0 / (1.0 - a);
            let norm = p.iter().map(|q| q.powf(r)).sum::<f64>().powf(1.0 - a);
            (1.0 - norm) / a
        }
        CompSumFamily::Mae => 1.0 - max_prob(p),
    }
}

/// `C_ℓ(h, x) = Σ_y p(y|x) ℓ(scores, y)`.
pub fn conditional_error_scores(loss: &LossSpec, p: &[f64], scores: &[f64]) -> Result<f64> {
    if let LossSpec::Margin { phi } = loss {
        let eta = binary_eta(p)?;
        if scores.len() != 1 {
            return input("margin loss needs a scalar score");
        }
        return Ok(binary_conditional(*phi, eta, scores[0]));
    }
    if loss.is_pair() {
        return input("pair losses have no per-point conditional error");
    }
    if matches!(loss, LossSpec::ZeroOneBinary) {
        binary_eta(p)?;
    }
    let mut s = 0.0;
    for (y, &py) in p.iter().enumerate() {
        if py > 0.0 {
            s += py * loss_from_scores(loss, scores, y)?;
        }
    }
    Ok(s)
}

pub fn conditional_error(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution, x: usize) -> Result<f64> {
    if matches!(loss, LossSpec::Constrained { .. }) && !h.sum_zero {
        return Err(Error::Contract("constrained loss on a hypothesis without sum_zero".into()));
    }
    conditional_error_scores(loss, dist.conditional(x), &h.scores_at(dist, x)?)
}

/// Best-in-class conditional error for a single conditional vector.
pub fn best_in_class_probs(loss: &LossSpec, p: &[f64], hset: &HypothesisSet) -> Result<(f64, Method)> {
    loss.validate()?;
    hset.validate()?;
    use HypothesisSet::*;
    if let LinearClass { .. } = hset {
        return Err(Error::Unsupported("linear class couples support points; use estimation-level operations".into()));
    }
    let pm = max_prob(p);
    match loss {
        LossSpec::ZeroOneBinary => {
            let eta = binary_eta(p)?;
            match *hset {
                Bounded { b: 0.0 } => Ok((1.0 - eta, Method::ClosedForm)),
                _ => Ok((eta.min(1.0 - eta), Method::ClosedForm)),
            }
        }
        LossSpec::ZeroOneMulti => match *hset {
            Bounded { b: 0.0 } => Ok((1.0 - p[p.len() - 1], Method::ClosedForm)),
            _ => Ok((1.0 - pm, Method::ClosedForm)),
        },
        LossSpec::Margin { phi } => {
            let eta = binary_eta(p)?;
            let f = |h: f64| binary_conditional(*phi, eta, h);
            match *hset {
                Complete | SymmetricComplete => match binary_best_closed(*phi, eta) {
                    Some(v) => Ok((v, Method::ClosedForm)),
                    None => {
                        let (_, v, m) = scalar_protocol(f, -BRACKET, BRACKET);
                        Ok((v, m))
                    }
                },
                Bounded { b } => {
                    if b == 0.0 {
                        return Ok((f(0.0), Method::ClosedForm));
                    }
                    match binary_minimizer(*phi, eta) {
                        Some(h) => Ok((f(h.clamp(-b, b)), Method::ConvexSolve)),
                        None => {
                            let (_, v, m) = scalar_protocol(f, -b, b);
                            Ok((v, m))
                        }
                    }
                }
                SumZeroComplete => Err(Error::Unsupported("sum-zero set for a scalar scorer".into())),
                LinearClass { .. } => unreachable!(),
            }
        }
        LossSpec::Constrained { phi } => match hset {
            Complete | SymmetricComplete | SumZeroComplete => Ok((constrained_best(*phi, p)?, Method::ClosedForm)),
            _ => Err(Error::Unsupported("constrained losses need a sum-zero complete set".into())),
        },
        LossSpec::CompSum { family } => match hset {
            Complete | SymmetricComplete | SumZeroComplete => Ok((comp_sum_best(*family, p), Method::ClosedForm)),
            _ => Err(Error::Unsupported("comp-sum losses need a complete set".into())),
        },
        LossSpec::RankingPair { .. } | LossSpec::RankingZeroOne => {
            input("pair losses: use ranking::pair_best_in_class")
        }
    }
}

pub fn best_in_class_conditional(
    loss: &LossSpec,
    dist: &DiscreteDistribution,
    x: usize,
    hset: &HypothesisSet,
) -> Result<(f64, Method)> {
    dist.check_index(x)?;
    best_in_class_probs(loss, dist.conditional(x), hset)
}

pub fn conditional_regret(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    x: usize,
    hset: &HypothesisSet,
) -> Result<RegretRecord> {
    let c = conditional_error(loss, h, dist, x)?;
    let (best, method) = best_in_class_conditional(loss, dist, x, hset)?;
    Ok(RegretRecord { x: dist.id(x), conditional_error: c, best_in_class: best, regret: c - best, method })
}

/// Regret records for every support point, computed in parallel.
pub fn regret_records(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    hset: &HypothesisSet,
) -> Result<Vec<RegretRecord>> {
    (0..dist.len()).into_par_iter().map(|i| conditional_regret(loss, h, dist, i, hset)).collect()
}

/// Per-point regrets in support order.
pub fn regrets(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution, hset: &HypothesisSet) -> Result<Vec<f64>> {
    Ok(regret_records(loss, h, dist, hset)?.into_iter().map(|r| r.regret).collect())
}

/// `E_X[ΔC(h, X)]`, which equals `E(h) − E* + M` for any set.
pub fn expected_regret(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    hset: &HypothesisSet,
) -> Result<f64> {
    let r = regrets(loss, h, dist, hset)?;
    Ok(dist.expect(|i| r[i]))
}

/// `E_ℓ(h) = Σ_x marginal(x) C_ℓ(h, x)`.
pub fn generalization_error(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    let mut s = 0.0;
    for i in 0..dist.len() {
        s += dist.marginal()[i] * conditional_error(loss, h, dist, i)?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestInClass {
    pub value: f64,
    /// Minimizing hypothesis for coupled classes.
    pub argmin: Option<Hypothesis>,
    pub converged: bool,
}

/// `E*_ℓ(H)`. Decoupled sets sum per-point infima; the linear class runs
/// multi-start projected gradient descent over the weights.
pub fn best_in_class_error(loss: &LossSpec, dist: &DiscreteDistribution, hset: &HypothesisSet) -> Result<BestInClass> {
    hset.validate()?;
    match *hset {
        HypothesisSet::LinearClass { dim, w } => linear_best(loss, dist, dim, w),
        _ => {
            let mut s = 0.0;
            for i in 0..dist.len() {
                s += dist.marginal()[i] * best_in_class_conditional(loss, dist, i, hset)?.0;
            }
            Ok(BestInClass { value: s, argmin: None, converged: true })
        }
    }
}

/// `M_ℓ(H) = E*_ℓ(H) − E_X[C*_ℓ(H, X)]`. For the linear class the inner
/// infimum is over the complete class.
pub fn minimizability_gap(loss: &LossSpec, dist: &DiscreteDistribution, hset: &HypothesisSet) -> Result<f64> {
    let best = best_in_class_error(loss, dist, hset)?;
    let inner_set = if hset.is_decoupled() { *hset } else { HypothesisSet::Complete };
    let mut inner = 0.0;
    for i in 0..dist.len() {
        inner += dist.marginal()[i] * best_in_class_conditional(loss, dist, i, &inner_set)?.0;
    }
    Ok(best.value - inner)
}

pub fn estimation_error(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    hset: &HypothesisSet,
) -> Result<f64> {
    Ok(generalization_error(loss, h, dist)? - best_in_class_error(loss, dist, hset)?.value)
}

/// Conditional error and its gradient with respect to the score vector,
/// for the smooth convex losses the linear solver supports.
pub fn conditional_error_grad(loss: &LossSpec, p: &[f64], scores: &[f64]) -> Result<(f64, Vec<f64>)> {
    match loss {
        LossSpec::Margin { phi } if phi.is_convex() && phi.is_smooth() => {
            let eta = binary_eta(p)?;
            let h = scores[0];
            let v = binary_conditional(*phi, eta, h);
            let g = eta * phi.derivative(h) - (1.0 - eta) * phi.derivative(-h);
            Ok((v, vec![g]))
        }
        LossSpec::CompSum { family: CompSumFamily::MultinomialLogistic } => {
            let s = softmax(scores);
            let v = conditional_error_scores(loss, p, scores)?;
            Ok((v, s.iter().zip(p).map(|(a, b)| a - b).collect()))
        }
        LossSpec::CompSum { family: CompSumFamily::SumExp } => {
            let n = scores.len();
            let v = conditional_error_scores(loss, p, scores)?;
            let g = (0..n)
                .map(|k| {
                    let up: f64 = (0..n).filter(|&y| y != k).map(|y| p[y] * (scores[k] - scores[y]).exp()).sum();
                    let down: f64 = (0..n).filter(|&j| j != k).map(|j| (scores[j] - scores[k]).exp()).sum();
                    up - p[k] * down
                })
                .collect();
            Ok((v, g))
        }
        other => Err(Error::Unsupported(format!("{} is not a smooth convex loss", other.name()))),
    }
}

fn linear_outputs(loss: &LossSpec, dist: &DiscreteDistribution) -> usize {
    match loss {
        LossSpec::Margin { .. } => 1,
        _ => dist.label_count(),
    }
}

/// `(objective, gradient)` of `E_ℓ(W φ)` in the flattened weights.
pub fn linear_objective(loss: &LossSpec, dist: &DiscreteDistribution, weights: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = dist.feature_dim();
    let n_out = linear_outputs(loss, dist);
    if weights.len() != n_out * d {
        return input(format!("expected {} weights, got {}", n_out * d, weights.len()));
    }
    let mut value = 0.0;
    let mut grad = vec![0.0; weights.len()];
    for i in 0..dist.len() {
        let m = dist.marginal()[i];
        if m == 0.0 {
            continue;
        }
        let phi = dist.features(i);
        let scores: Vec<f64> = (0..n_out).map(|r| (0..d).map(|j| weights[r * d + j] * phi[j]).sum()).collect();
        let (v, g) = conditional_error_grad(loss, dist.conditional(i), &scores)?;
        value += m * v;
        for r in 0..n_out {
            for j in 0..d {
                grad[r * d + j] += m * g[r] * phi[j];
            }
        }
    }
    Ok((value, grad))
}

fn linear_best(loss: &LossSpec, dist: &DiscreteDistribution, dim: usize, w: f64) -> Result<BestInClass> {
    if dist.feature_dim() != dim || dim == 0 {
        return input(format!("linear class of dimension {dim} on {}-dimensional features", dist.feature_dim()));
    }
    conditional_error_grad(loss, dist.conditional(0), &vec![0.0; linear_outputs(loss, dist)])?;
    let n_out = linear_outputs(loss, dist);
    let len = n_out * dim;
    let mut rng = ChaCha8Rng::seed_from_u64(0x11ea);
    let opts = GdOptions { grad_tol: LINEAR_GRAD_TOL, ..GdOptions::default() };
    let mut best: Option<crate::optim::GdResult> = None;
    for restart in 0..LINEAR_RESTARTS {
        let mut x0: Vec<f64> =
            if restart == 0 { vec![0.0; len] } else { (0..len).map(|_| rng.random_range(-1.0..1.0)).collect() };
        if w.is_finite() {
            let r = rng.random::<f64>() * w;
            let nrm = x0.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nrm > 0.0 {
                x0.iter_mut().for_each(|a| *a *= r / nrm);
            }
        }
        let obj = |x: &[f64]| linear_objective(loss, dist, x).expect("checked above");
        let res = projected_gradient_descent(obj, &x0, opts, |x| {
            if w.is_finite() {
                project_ball(x, w)
            }
        });
        if best.as_ref().is_none_or(|b| res.value < b.value) {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    let weights: Vec<Vec<f64>> = best.x.chunks(dim).map(|c| c.to_vec()).collect();
    let h = Hypothesis::linear(weights, vec![0.0; n_out]);
    if !best.converged {
        return Err(Error::Convergence {
            message: format!(
                "linear class: gradient mapping norm {} after {} iterations",
                best.grad_norm, best.iterations
            ),
            best: best.value,
        });
    }
    Ok(BestInClass { value: best.value, argmin: Some(h), converged: true })
}

/// Write records as CSV with header `x,conditional_error,best_in_class,regret,method`.
pub fn write_regret_csv<W: Write>(records: &[RegretRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "conditional_error", "best_in_class", "regret", "method"])?;
    for r in records {
        w.write_record([
            r.x.to_string(),
            r.conditional_error.to_string(),
            r.best_in_class.to_string(),
            r.regret.to_string(),
            r.method.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(eta: f64) -> DiscreteDistribution {
        DiscreteDistribution::binary(&[eta], &[1.0]).unwrap()
    }

    #[test]
    fn conditional_error_examples() {
        let e = LossSpec::margin(PhiSpec::Exp);
        assert!((conditional_error(&e, &Hypothesis::scalar(&[0.0]), &bin(0.5), 0).unwrap() - 1.0).abs() < 1e-15);
        let hinge = LossSpec::margin(PhiSpec::Hinge);
        assert!((conditional_error(&hinge, &Hypothesis::scalar(&[1.0]), &bin(0.8), 0).unwrap() - 0.4).abs() < 1e-15);
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.3, 0.2]], &[1.0]).unwrap();
        let h = Hypothesis::tabular(vec![vec![0.0, 0.0, 1.0]]);
        assert!((conditional_error(&LossSpec::ZeroOneMulti, &h, &d, 0).unwrap() - 0.5 - 0.3).abs() < 1e-15);
    }

    #[test]
    fn best_in_class_examples() {
        let e = LossSpec::margin(PhiSpec::Exp);
        assert_eq!(best_in_class_conditional(&e, &bin(0.5), 0, &HypothesisSet::Complete).unwrap().0, 1.0);
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.3, 0.2]], &[1.0]).unwrap();
        let (v, m) = best_in_class_conditional(&LossSpec::ZeroOneMulti, &d, 0, &HypothesisSet::Complete).unwrap();
        assert!((v - 0.5).abs() < 1e-15 && m == Method::ClosedForm);
        for phi in [PhiSpec::Hinge, PhiSpec::Logistic, PhiSpec::Sigmoid { k: 2.0 }, PhiSpec::RhoMargin { rho: 0.3 }] {
            let (v, _) =
                best_in_class_conditional(&LossSpec::margin(phi), &bin(0.83), 0, &HypothesisSet::Bounded { b: 0.0 })
                    .unwrap();
            assert_eq!(v, phi.eval(0.0));
        }
        assert!(matches!(
            best_in_class_conditional(&e, &bin(0.3), 0, &HypothesisSet::LinearClass { dim: 1, w: 1.0 }),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn regret_examples() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.3, 0.2]], &[1.0]).unwrap();
        let h = Hypothesis::tabular(vec![vec![0.0, 0.0, 1.0]]);
        let r = conditional_regret(&LossSpec::ZeroOneMulti, &h, &d, 0, &HypothesisSet::Complete).unwrap();
        assert!((r.regret - 0.3).abs() < 1e-15, "{}", r.regret);

        let e = LossSpec::margin(PhiSpec::Exp);
        let h = Hypothesis::scalar(&[0.5 * (0.7f64 / 0.3).ln()]);
        assert!(conditional_regret(&e, &h, &bin(0.7), 0, &HypothesisSet::Complete).unwrap().regret.abs() < 1e-9);

        let ce = LossSpec::constrained(PhiSpec::Exp);
        let d2 = DiscreteDistribution::multiclass(vec![vec![0.9, 0.1]], &[1.0]).unwrap();
        let h0 = Hypothesis::sum_zero_tabular(vec![vec![0.0, 0.0]]).unwrap();
        let r = conditional_regret(&ce, &h0, &d2, 0, &HypothesisSet::SumZeroComplete).unwrap();
        assert!((r.conditional_error - 1.0).abs() < 1e-15);
        // n = 2 closed form: 2 sqrt(0.1 * 0.9)
        assert!((r.best_in_class - 0.6).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_uses_grid() {
        let s = LossSpec::margin(PhiSpec::Sigmoid { k: 1.0 });
        let (v, m) = best_in_class_conditional(&s, &bin(0.8), 0, &HypothesisSet::Complete).unwrap();
        assert!((v - 0.4).abs() < 1e-9, "{v}");
        assert_ne!(m, Method::ClosedForm);
    }

    #[test]
    fn gaps_vanish_for_complete_sets() {
        let d = DiscreteDistribution::binary(&[0.2, 0.9, 0.6], &[0.3, 0.3, 0.4]).unwrap();
        for phi in [PhiSpec::Exp, PhiSpec::Logistic, PhiSpec::Hinge] {
            assert!(minimizability_gap(&LossSpec::margin(phi), &d, &HypothesisSet::Complete).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn shared_weight_has_positive_gap() {
        // both points share feature 1 but want opposite scores
        let d =
            DiscreteDistribution::binary_with_features(&[0.9, 0.2], &[0.5, 0.5], vec![vec![1.0], vec![1.0]]).unwrap();
        let loss = LossSpec::margin(PhiSpec::Logistic);
        let gap = minimizability_gap(&loss, &d, &HypothesisSet::LinearClass { dim: 1, w: 10.0 }).unwrap();
        assert!(gap > 1e-3, "{gap}");
        let single = DiscreteDistribution::binary_with_features(&[0.9], &[1.0], vec![vec![1.0]]).unwrap();
        let g1 = minimizability_gap(&loss, &single, &HypothesisSet::LinearClass { dim: 1, w: 10.0 }).unwrap();
        assert!(g1.abs() < 1e-9, "{g1}");
    }

    #[test]
    fn csv_header() {
        let rec =
            RegretRecord { x: 3, conditional_error: 1.0, best_in_class: 0.5, regret: 0.5, method: Method::ClosedForm };
        let mut buf = Vec::new();
        write_regret_csv(&[rec], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("x,conditional_error,best_in_class,regret,method\n3,1,0.5,0.5,closed_form"));
    }
}
