//! Population AdaBoost: coordinate descent on the exponential loss over a
//! dictionary of ±1 decision stumps.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::DiscreteDistribution;
use crate::error::{input, Result};
use crate::hypothesis::{Hypothesis, Stump};

/// Clamp for the weighted error before taking the log-odds.
pub const EPS_CLAMP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct StumpPool {
    pub stumps: Vec<Stump>,
}

impl StumpPool {
    /// Stumps `+1 if x[f] <= t else −1` with thresholds at midpoints of the
    /// sorted distinct support values of each feature, plus optionally the
    /// constant stump.
    pub fn build(dist: &DiscreteDistribution, include_constant: bool) -> Result<Self> {
        let d = dist.feature_dim();
        let mut stumps = Vec::new();
        if include_constant {
            stumps.push(Stump::constant());
        }
        for f in 0..d {
            let mut vals: Vec<f64> = (0..dist.len()).map(|i| dist.features(i)[f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                stumps.push(Stump {
                    feature: f,
                    threshold: 0.5 * (w[0] + w[1]),
                    left: 1.0,
                    right: -1.0,
                    coefficient: 1.0,
                });
            }
        }
        if stumps.is_empty() {
            return input("stump pool is empty");
        }
        Ok(StumpPool { stumps })
    }

    pub fn len(&self) -> usize {
        self.stumps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stumps.is_empty()
    }

    /// `out[j][i]`: output of stump `j` at support index `i`.
    pub fn outputs(&self, dist: &DiscreteDistribution) -> Vec<Vec<f64>> {
        self.stumps.iter().map(|s| (0..dist.len()).map(|i| s.output(dist.features(i))).collect()).collect()
    }

    /// Ensemble with the given coefficient per pool stump (zeros dropped).
    pub fn ensemble(&self, coefficients: &[f64]) -> Hypothesis {
        let stumps = self
            .stumps
            .iter()
            .zip(coefficients)
            .filter(|(_, c)| **c != 0.0)
            .map(|(s, c)| Stump { coefficient: *c, ..*s })
            .collect();
        Hypothesis::stumps(stumps)
    }
}

/// `iterations + 1` ensembles, starting from the empty one. Each round
/// picks the stump whose weighted error is farthest from ½ and adds it
/// with the exact line-search coefficient `½·ln((1 − ε)/ε)`. The seed
/// shuffles the pool, which fixes how ties are broken.
pub fn train_boosting(
    dist: &DiscreteDistribution,
    pool: &StumpPool,
    iterations: usize,
    seed: u64,
) -> Result<Vec<Hypothesis>> {
    if pool.is_empty() {
        return input("stump pool is empty");
    }
    if !dist.is_binary() {
        return input("boosting needs a binary distribution");
    }
    if dist.feature_dim() == 0 {
        return input("boosting needs features");
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let out = pool.outputs(dist);
    let k = dist.len();
    let mut coef = vec![0.0; pool.len()];
    let mut f = vec![0.0f64; k];
    let mut traj = vec![pool.ensemble(&coef)];
    for _ in 0..iterations {
        // population weights over (x, y): m(x)·p(y|x)·e^{−y f(x)}
        let mut wp = vec![0.0; k];
        let mut wn = vec![0.0; k];
        for i in 0..k {
            let m = dist.marginal()[i];
            let eta = dist.eta(i);
            wp[i] = m * eta * (-f[i]).exp();
            wn[i] = m * (1.0 - eta) * f[i].exp();
        }
        let z: f64 = wp.iter().sum::<f64>() + wn.iter().sum::<f64>();
        if z == 0.0 {
            traj.push(pool.ensemble(&coef));
            continue;
        }
        let mut best = (order[0], 0.5);
        let mut best_dev = -1.0;
        for &j in &order {
            let err: f64 = (0..k).map(|i| if out[j][i] > 0.0 { wn[i] } else { wp[i] }).sum::<f64>() / z;
            let dev = (err - 0.5).abs();
            if dev > best_dev {
                best_dev = dev;
                best = (j, err);
            }
        }
        let (j, err) = best;
        let e = err.clamp(EPS_CLAMP, 1.0 - EPS_CLAMP);
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        coef[j] += alpha;
        for i in 0..k {
            f[i] += alpha * out[j][i];
        }
        traj.push(pool.ensemble(&coef));
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{LossSpec, PhiSpec};
    use crate::regret::generalization_error;

    fn instance() -> DiscreteDistribution {
        DiscreteDistribution::binary_with_features(
            &[0.9, 0.7, 0.35, 0.2, 0.6],
            &[0.2, 0.2, 0.2, 0.2, 0.2],
            vec![vec![0.1], vec![0.3], vec![0.5], vec![0.7], vec![0.9]],
        )
        .unwrap()
    }

    #[test]
    fn pool_has_midpoints_and_constant() {
        let p = StumpPool::build(&instance(), true).unwrap();
        assert_eq!(p.len(), 5);
        assert!(p.stumps[0].is_constant());
        assert!((p.stumps[1].threshold - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_iterations_is_zero_scorer() {
        let d = instance();
        let t = train_boosting(&d, &StumpPool::build(&d, true).unwrap(), 0, 1).unwrap();
        assert_eq!(t.len(), 1);
        let e = generalization_error(&LossSpec::margin(PhiSpec::Exp), &t[0], &d).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_loss_decreases() {
        let d = instance();
        let t = train_boosting(&d, &StumpPool::build(&d, true).unwrap(), 30, 7).unwrap();
        let l = LossSpec::margin(PhiSpec::Exp);
        let e: Vec<f64> = t.iter().map(|h| generalization_error(&l, h, &d).unwrap()).collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn empty_pool_rejected() {
        let d = DiscreteDistribution::binary(&[0.5], &[1.0]).unwrap();
        assert!(StumpPool::build(&d, false).is_err());
    }
}
