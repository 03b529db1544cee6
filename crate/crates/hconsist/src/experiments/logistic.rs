//! Population logistic regression by gradient descent over `(w, b)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::PhiSpec;
use crate::optim::{gradient_descent, GdOptions};
use crate::regret::binary_conditional;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Init {
    Zero,
    /// Uniform in `[-1, 1)` per coordinate.
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepPolicy {
    /// Armijo backtracking from `initial`, halving until sufficient decrease.
    Backtracking {
        initial: f64,
    },
    Fixed(f64),
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy::Backtracking { initial: 4.0 }
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `E_log(w, b)` and its gradient; `params = [w_1, …, w_d, b]`.
pub fn logistic_objective(dist: &DiscreteDistribution, params: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = dist.feature_dim();
    if params.len() != d + 1 {
        return input(format!("expected {} parameters, got {}", d + 1, params.len()));
    }
    if !dist.is_binary() {
        return input("logistic regression needs a binary distribution");
    }
    let mut v = 0.0;
    let mut g = vec![0.0; d + 1];
    for i in 0..dist.len() {
        let m = dist.marginal()[i];
        let x = dist.features(i);
        let h = x.iter().zip(params).map(|(a, b)| a * b).sum::<f64>() + params[d];
        let eta = dist.eta(i);
        v += m * binary_conditional(PhiSpec::Logistic, eta, h);
        // d/dh [η·softplus(−h) + (1−η)·softplus(h)] = σ(h) − η
        let dh = m * (sigmoid(h) - eta);
        for j in 0..d {
            g[j] += dh * x[j];
        }
        g[d] += dh;
    }
    Ok((v, g))
}

pub fn params_to_hypothesis(params: &[f64]) -> Hypothesis {
    let d = params.len() - 1;
    Hypothesis::linear(vec![params[..d].to_vec()], vec![params[d]])
}

fn initial(dim: usize, init: Init) -> Vec<f64> {
    match init {
        Init::Zero => vec![0.0; dim],
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
    }
}

/// `iterations + 1` hypotheses, one per gradient step starting from the
/// initial point. Steps that fail to decrease the objective are rejected.
pub fn train_logistic(
    dist: &DiscreteDistribution,
    iterations: usize,
    step: StepPolicy,
    init: Init,
) -> Result<Vec<Hypothesis>> {
    let dim = dist.feature_dim() + 1;
    let mut p = initial(dim, init);
    let (mut v, mut g) = logistic_objective(dist, &p)?;
    let mut traj = vec![params_to_hypothesis(&p)];
    for _ in 0..iterations {
        let gg: f64 = g.iter().map(|a| a * a).sum();
        let mut t = match step {
            StepPolicy::Backtracking { initial } => initial,
            StepPolicy::Fixed(s) => s,
        };
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let (tv, tg) = logistic_objective(dist, &trial)?;
            let ok = match step {
                StepPolicy::Backtracking { .. } => tv <= v - 0.5 * t * gg,
                StepPolicy::Fixed(_) => tv <= v,
            };
            if ok {
                accepted = Some((trial, tv, tg));
                break;
            }
            if let StepPolicy::Fixed(_) = step {
                break;
            }
            t *= 0.5;
        }
        if let Some((np, nv, ng)) = accepted {
            p = np;
            v = nv;
            g = ng;
        }
        traj.push(params_to_hypothesis(&p));
    }
    Ok(traj)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogisticFit {
    pub hypothesis: Hypothesis,
    pub params: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Runs to the gradient-norm tolerance, or reports a convergence error.
pub fn fit_logistic(dist: &DiscreteDistribution, grad_tol: f64, init: Init) -> Result<LogisticFit> {
    let dim = dist.feature_dim() + 1;
    logistic_objective(dist, &vec![0.0; dim])?;
    let opts = GdOptions { grad_tol, max_iter: 200_000, ..GdOptions::default() };
    let r = gradient_descent(|x| logistic_objective(dist, x).expect("checked"), &initial(dim, init), opts);
    if !r.converged {
        return Err(Error::Convergence {
            message: format!("logistic regression: gradient norm {} after {} iterations", r.grad_norm, r.iterations),
            best: r.value,
        });
    }
    Ok(LogisticFit {
        hypothesis: params_to_hypothesis(&r.x),
        params: r.x,
        value: r.value,
        grad_norm: r.grad_norm,
        iterations: r.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::finite_difference_gradient;

    fn instance() -> DiscreteDistribution {
        DiscreteDistribution::binary_with_features(
            &[0.8, 0.6, 0.3, 0.1],
            &[0.25; 4],
            vec![vec![0.0, 1.0], vec![0.4, 0.2], vec![0.6, 0.9], vec![1.0, 0.3]],
        )
        .unwrap()
    }

    #[test]
    fn zero_iterations_is_log_two() {
        let d = instance();
        let t = train_logistic(&d, 0, StepPolicy::default(), Init::Zero).unwrap();
        assert_eq!(t.len(), 1);
        assert!((logistic_objective(&d, &[0.0; 3]).unwrap().0 - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_differences() {
        let d = instance();
        let p = [0.3, -1.2, 0.7];
        let (_, g) = logistic_objective(&d, &p).unwrap();
        let fd = finite_difference_gradient(|x| logistic_objective(&d, x).unwrap().0, &p, 1e-5);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3));
        }
    }

    #[test]
    fn objective_decreases_and_fit_converges() {
        let d = instance();
        let t = train_logistic(&d, 40, StepPolicy::default(), Init::Random(3)).unwrap();
        let v: Vec<f64> = t
            .iter()
            .map(|h| match &h.kind {
                crate::hypothesis::HypothesisKind::Linear { weights, bias } => {
                    let mut p = weights[0].clone();
                    p.push(bias[0]);
                    logistic_objective(&d, &p).unwrap().0
                }
                _ => unreachable!(),
            })
            .collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
        let fit = fit_logistic(&d, 1e-9, Init::Zero).unwrap();
        assert!(fit.grad_norm <= 1e-8);
    }
}
