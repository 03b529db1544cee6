//! Monte-Carlo estimates of empirical Rademacher complexity
//! `E_σ sup_h (1/m) Σ σᵢ g(h, xᵢ, yᵢ)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{loss_from_scores, LossSpec};
use crate::optim::{golden_section, project_ball, projected_gradient_descent, GdOptions};
use crate::regret::conditional_error_grad;

use super::boosting::StumpPool;

/// I.i.d. draws from a distribution, kept as support indices and labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub points: Vec<usize>,
    pub labels: Vec<usize>,
}

impl Sample {
    pub fn draw(dist: &DiscreteDistribution, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return input("sample size must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = WeightedIndex::new(dist.marginal()).map_err(|e| Error::Input(e.to_string()))?;
        let mut points = Vec::with_capacity(m);
        let mut labels = Vec::with_capacity(m);
        for _ in 0..m {
            let i = xs.sample(&mut rng);
            let ys = WeightedIndex::new(dist.conditional(i)).map_err(|e| Error::Input(e.to_string()))?;
            points.push(i);
            labels.push(ys.sample(&mut rng));
        }
        Ok(Sample { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Empirical distribution: one support point per draw, mass `1/m`,
    /// one-hot conditionals.
    pub fn empirical(&self, dist: &DiscreteDistribution) -> Result<DiscreteDistribution> {
        let m = self.len() as f64;
        let n = dist.label_count();
        let support = self
            .points
            .iter()
            .enumerate()
            .map(|(k, &i)| crate::dist::SupportPoint { id: k as i64, features: dist.features(i).to_vec() })
            .collect();
        let cond = self
            .labels
            .iter()
            .map(|&y| {
                let mut p = vec![0.0; n];
                p[y] = 1.0;
                p
            })
            .collect();
        DiscreteDistribution::new(support, vec![1.0 / m; self.len()], cond)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    /// `g = h(x)` for scalar scorers.
    Scores,
    Loss(LossSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionClass {
    Singleton(Hypothesis),
    /// `Σ c_j s_j` over the pool with `Σ |c_j| ≤ c`.
    StumpSpan {
        pool: StumpPool,
        c: f64,
    },
    /// `W x` with Frobenius norm at most `w`, `outputs` rows.
    Linear {
        w: f64,
        outputs: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RademacherEstimate {
    pub m: usize,
    pub trials: usize,
    /// Mean over trials; not clipped at zero.
    pub value: f64,
    pub std_error: f64,
    /// Upper bound on `|g|` over the class and sample.
    pub b_loss: f64,
    pub dropped: usize,
    /// Smallest per-trial supremum.
    pub min_trial: f64,
}

/// Fraction of dropped trials above which the estimate is refused.
pub const MAX_DROP_FRACTION: f64 = 0.1;
pub const LINEAR_RESTARTS: usize = 5;
const FW_STEPS: usize = 30;

/// Precomputed design for the sample. Draws with the same support point
/// and label share a group, so objectives cost O(groups) rather than O(m).
struct Design {
    m: usize,
    /// Group of each draw.
    group_of: Vec<usize>,
    /// Label per group.
    labels: Vec<usize>,
    n_labels: usize,
    /// Feature row (linear) or stump outputs (span) per group.
    rows: Vec<Vec<f64>>,
    /// Singleton values `g(h₀, xᵢ, yᵢ)` per draw.
    fixed: Vec<f64>,
}

impl Design {
    /// `w_g = (1/m) Σ_{i in g} σᵢ`.
    fn group_weights(&self, sigma: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.labels.len()];
        for (i, &g) in self.group_of.iter().enumerate() {
            w[g] += sigma[i];
        }
        w.iter_mut().for_each(|a| *a /= self.m as f64);
        w
    }
}

fn g_value(target: &Target, scores: &[f64], y: usize) -> Result<f64> {
    match target {
        Target::Scores => {
            if scores.len() != 1 {
                return input("score target needs a scalar class");
            }
            Ok(scores[0])
        }
        Target::Loss(l) => loss_from_scores(l, scores, y),
    }
}

fn onehot(n: usize, y: usize) -> Vec<f64> {
    let mut p = vec![0.0; n];
    p[y] = 1.0;
    p
}

fn design(target: &Target, class: &FunctionClass, dist: &DiscreteDistribution, sample: &Sample) -> Result<Design> {
    let n_labels = dist.label_count();
    let mut keys: Vec<(usize, usize)> = sample.points.iter().cloned().zip(sample.labels.iter().cloned()).collect();
    keys.sort_unstable();
    keys.dedup();
    let group_of = sample
        .points
        .iter()
        .zip(&sample.labels)
        .map(|(&i, &y)| keys.binary_search(&(i, y)).expect("key present"))
        .collect();
    let labels = keys.iter().map(|k| k.1).collect();
    let mut d = Design { m: sample.len(), group_of, labels, n_labels, rows: vec![], fixed: vec![] };
    match class {
        FunctionClass::Singleton(h) => {
            d.fixed = sample
                .points
                .iter()
                .zip(&sample.labels)
                .map(|(&i, &y)| g_value(target, &h.scores_at(dist, i)?, y))
                .collect::<Result<_>>()?;
        }
        FunctionClass::StumpSpan { pool, c } => {
            if !(*c > 0.0) {
                return input("stump span radius must be positive");
            }
            d.rows =
                keys.iter().map(|&(i, _)| pool.stumps.iter().map(|s| s.output(dist.features(i))).collect()).collect();
        }
        FunctionClass::Linear { w, outputs } => {
            if !(*w > 0.0) || *outputs == 0 {
                return input("linear class needs w > 0 and at least one output");
            }
            if matches!(target, Target::Scores) && *outputs != 1 {
                return input("score target needs a scalar class");
            }
            d.rows = keys.iter().map(|&(i, _)| dist.features(i).to_vec()).collect();
        }
    }
    Ok(d)
}

/// `Σ_g w_g g(h_θ)` over distinct (point, label) groups and its gradient
/// in θ, where scores are `outputs × dim` blocks of θ applied to each row.
#[allow(clippy::needless_range_loop)]
fn signed_objective(target: &Target, d: &Design, wts: &[f64], outputs: usize, theta: &[f64]) -> (f64, Vec<f64>) {
    let dim = theta.len() / outputs;
    let mut v = 0.0;
    let mut g = vec![0.0; theta.len()];
    for i in 0..d.rows.len() {
        let row = &d.rows[i];
        let scores: Vec<f64> = (0..outputs).map(|r| (0..dim).map(|j| theta[r * dim + j] * row[j]).sum()).collect();
        let (val, gs) = match target {
            Target::Scores => (scores[0], vec![1.0]),
            Target::Loss(l) => match conditional_error_grad(l, &onehot(d.n_labels, d.labels[i]), &scores) {
                Ok(x) => x,
                Err(_) => return (f64::NAN, g),
            },
        };
        let w = wts[i];
        v += w * val;
        for r in 0..outputs {
            for j in 0..dim {
                g[r * dim + j] += w * gs[r] * row[j];
            }
        }
    }
    (v, g)
}

/// Supremum for one sign vector and a maximizer (empty for singletons).
fn trial_sup(
    target: &Target,
    class: &FunctionClass,
    d: &Design,
    sigma: &[f64],
    warm: Option<&[f64]>,
    seed: u64,
) -> (f64, Vec<f64>) {
    let m = d.m as f64;
    let wts = d.group_weights(sigma);
    let ng = wts.len();
    match class {
        FunctionClass::Singleton(_) => (sigma.iter().zip(&d.fixed).map(|(s, v)| s * v).sum::<f64>() / m, vec![]),
        FunctionClass::StumpSpan { pool, c } => {
            let p = pool.len();
            if let Target::Scores = target {
                // linear in the coefficients: the sup sits at a vertex
                let (j, v) = (0..p)
                    .map(|j| (j, (0..ng).map(|i| wts[i] * d.rows[i][j]).sum::<f64>()))
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .expect("non-empty pool");
                let mut x = vec![0.0; p];
                x[j] = c * v.signum();
                return (c * v.abs(), x);
            }
            // work on score vectors: moving along a segment of coefficients
            // moves the scores along the matching segment
            let value = |sc: &[f64]| -> f64 {
                (0..ng).map(|i| wts[i] * g_value(target, &sc[i..i + 1], d.labels[i]).unwrap_or(f64::NAN)).sum::<f64>()
            };
            let column = |j: usize, k: f64| -> Vec<f64> { (0..ng).map(|i| k * d.rows[i][j]).collect() };
            let mut best_x = vec![0.0; p];
            let mut best_s = vec![0.0; ng];
            let mut best_v = value(&best_s);
            for j in 0..p {
                for sgn in [-1.0, 1.0] {
                    let sc = column(j, sgn * c);
                    let v = value(&sc);
                    if v > best_v {
                        best_v = v;
                        best_x = vec![0.0; p];
                        best_x[j] = sgn * c;
                        best_s = sc;
                    }
                }
            }
            if let Some(w) = warm {
                let sc: Vec<f64> = (0..ng).map(|i| (0..p).map(|j| w[j] * d.rows[i][j]).sum()).collect();
                let v = value(&sc);
                if v > best_v {
                    best_v = v;
                    best_x = w.to_vec();
                    best_s = sc;
                }
            }
            // Frank-Wolfe ascent
            for _ in 0..FW_STEPS {
                let (_, g) = signed_objective(target, d, &wts, 1, &best_x);
                let j = (0..p).max_by(|a, b| g[*a].abs().total_cmp(&g[*b].abs())).expect("non-empty");
                let k = c * g[j].signum();
                let vs = column(j, k);
                let line = |t: f64| {
                    let sc: Vec<f64> = best_s.iter().zip(&vs).map(|(a, b)| (1.0 - t) * a + t * b).collect();
                    -value(&sc)
                };
                let r = golden_section(line, 0.0, 1.0, 1e-7);
                if !(-r.value > best_v + 1e-15) {
                    break;
                }
                best_v = -r.value;
                best_x.iter_mut().for_each(|a| *a *= 1.0 - r.x);
                best_x[j] += r.x * k;
                best_s = best_s.iter().zip(&vs).map(|(a, b)| (1.0 - r.x) * a + r.x * b).collect();
            }
            (best_v, best_x)
        }
        FunctionClass::Linear { w, outputs } => {
            let dim = d.rows.first().map_or(0, |r| r.len());
            if let Target::Scores = target {
                let s: Vec<f64> = (0..dim).map(|j| (0..ng).map(|i| wts[i] * d.rows[i][j]).sum::<f64>()).collect();
                let n = s.iter().map(|a| a * a).sum::<f64>().sqrt();
                let x = if n > 0.0 { s.iter().map(|a| a * w / n).collect() } else { vec![0.0; dim] };
                return (w * n, x);
            }
            let len = outputs * dim;
            let neg = |x: &[f64]| {
                let (v, g) = signed_objective(target, d, &wts, *outputs, x);
                (-v, g.into_iter().map(|a| -a).collect())
            };
            let opts = GdOptions { max_iter: 2_000, grad_tol: 1e-8, ..GdOptions::default() };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut starts: Vec<Vec<f64>> = vec![vec![0.0; len]];
            for _ in 1..LINEAR_RESTARTS {
                let mut x: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
                let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let r = w * rng.random::<f64>();
                x.iter_mut().for_each(|a| *a *= r / n.max(1e-300));
                starts.push(x);
            }
            if let Some(ws) = warm {
                starts.push(ws.to_vec());
            }
            let mut best = (f64::NEG_INFINITY, vec![0.0; len]);
            for x0 in starts {
                let init_v = -neg(&x0).0;
                let r = projected_gradient_descent(neg, &x0, opts, |x| project_ball(x, *w));
                let (v, x) = if -r.value >= init_v { (-r.value, r.x) } else { (init_v, x0) };
                if v > best.0 {
                    best = (v, x);
                }
            }
            best
        }
    }
}

/// Upper bound on `|g|` over the class on this sample.
pub fn loss_bound(target: &Target, class: &FunctionClass, dist: &DiscreteDistribution, sample: &Sample) -> Result<f64> {
    let radius = match class {
        FunctionClass::Singleton(_) => {
            let d = design(target, class, dist, sample)?;
            return Ok(d.fixed.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        }
        FunctionClass::StumpSpan { c, .. } => *c,
        FunctionClass::Linear { w, .. } => {
            w * sample
                .points
                .iter()
                .map(|&i| dist.features(i).iter().map(|a| a * a).sum::<f64>().sqrt())
                .fold(0.0, f64::max)
        }
    };
    match target {
        Target::Scores => Ok(radius),
        Target::Loss(LossSpec::Margin { phi }) => Ok(phi.eval(-radius)),
        Target::Loss(LossSpec::Constrained { phi }) => Ok((dist.label_count() - 1) as f64 * phi.eval(-radius)),
        Target::Loss(LossSpec::CompSum { family: crate::losses::CompSumFamily::MultinomialLogistic }) => {
            Ok((dist.label_count() as f64).ln() + 2.0 * radius)
        }
        Target::Loss(other) => Err(Error::Unsupported(format!("no loss bound for {}", other.name()))),
    }
}

fn sign_vector(seed: u64, trial: usize, m: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    (0..m).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn summarize(sups: Vec<Option<f64>>, m: usize, b_loss: f64) -> Result<RademacherEstimate> {
    let trials = sups.len();
    let ok: Vec<f64> = sups.into_iter().flatten().collect();
    let dropped = trials - ok.len();
    if ok.is_empty() || dropped as f64 > MAX_DROP_FRACTION * trials as f64 {
        return Err(Error::Convergence {
            message: format!("{dropped} of {trials} Rademacher trials failed"),
            best: f64::NAN,
        });
    }
    let n = ok.len() as f64;
    let mean = ok.iter().sum::<f64>() / n;
    let var = if ok.len() > 1 { ok.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let min_trial = ok.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RademacherEstimate { m, trials, value: mean, std_error: (var / n).sqrt(), b_loss, dropped, min_trial })
}

/// Independent sign vectors per trial (seeded by `seed` and the trial
/// index), suprema computed in parallel.
pub fn estimate_rademacher(
    target: &Target,
    class: &FunctionClass,
    dist: &DiscreteDistribution,
    sample: &Sample,
    trials: usize,
    seed: u64,
) -> Result<RademacherEstimate> {
    if trials == 0 {
        return input("trials must be positive");
    }
    if let Target::Loss(l) = target {
        l.validate()?;
    }
    let d = design(target, class, dist, sample)?;
    let b = loss_bound(target, class, dist, sample)?;
    let sups: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sigma = sign_vector(seed, t, d.m);
            let (v, _) = trial_sup(target, class, &d, &sigma, None, seed ^ t as u64);
            v.is_finite().then_some(v)
        })
        .collect();
    summarize(sups, d.m, b)
}

/// Estimates for the linear class at radius `w` and `2w` on shared sign
/// vectors; the larger class warm-starts from the smaller one's maximizer.
pub fn nestedness_pair(
    target: &Target,
    w: f64,
    outputs: usize,
    dist: &DiscreteDistribution,
    sample: &Sample,
    trials: usize,
    seed: u64,
) -> Result<(RademacherEstimate, RademacherEstimate)> {
    let small = FunctionClass::Linear { w, outputs };
    let large = FunctionClass::Linear { w: 2.0 * w, outputs };
    let d = design(target, &small, dist, sample)?;
    let pairs: Vec<(Option<f64>, Option<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let sigma = sign_vector(seed, t, d.m);
            let (v1, x1) = trial_sup(target, &small, &d, &sigma, None, seed ^ t as u64);
            let (v2, _) = trial_sup(target, &large, &d, &sigma, Some(&x1), seed ^ t as u64);
            (v1.is_finite().then_some(v1), v2.is_finite().then_some(v2))
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok((
        summarize(a, d.m, loss_bound(target, &small, dist, sample)?)?,
        summarize(b, d.m, loss_bound(target, &large, dist, sample)?)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::trajectory::ranking_instance;
    use crate::losses::PhiSpec;

    #[test]
    fn singleton_near_zero() {
        let d = ranking_instance(2, 10, 2).unwrap();
        let s = Sample::draw(&d, 50, 4).unwrap();
        let h = Hypothesis::scalar(&(0..10).map(|i| i as f64 * 0.1).collect::<Vec<_>>());
        let e = estimate_rademacher(&Target::Scores, &FunctionClass::Singleton(h), &d, &s, 4000, 1).unwrap();
        assert!(e.value.abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn score_classes_non_negative_and_nested() {
        let d = ranking_instance(3, 12, 2).unwrap();
        let s = Sample::draw(&d, 40, 5).unwrap();
        let pool = StumpPool::build(&d, true).unwrap();
        let e =
            estimate_rademacher(&Target::Scores, &FunctionClass::StumpSpan { pool, c: 1.0 }, &d, &s, 200, 2).unwrap();
        assert!(e.min_trial >= 0.0);
        let l = Target::Loss(LossSpec::margin(PhiSpec::Logistic));
        let (a, b) = nestedness_pair(&l, 1.0, 1, &d, &s, 50, 9).unwrap();
        assert!(b.value >= a.value);
    }

    #[test]
    fn empirical_distribution_masses() {
        let d = ranking_instance(3, 6, 1).unwrap();
        let s = Sample::draw(&d, 7, 1).unwrap();
        let e = s.empirical(&d).unwrap();
        assert_eq!(e.len(), 7);
        assert!((e.marginal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
