//! Constrained-loss bounds sharpened by `Λ(h) = min_x max_y h(x, y)`.

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::{LossSpec, PhiSpec};
use crate::regret::{regrets, HypothesisSet};

use super::{BoundReport, Transform};

/// Which constants multiply the Λ-dependent Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GammaConstants {
    /// exp `√2·√x·e^{−Λ/2}`, hinge `x/(1+Λ)`, squared hinge `√x/(1+Λ)`.
    #[default]
    Stated,
    /// Same for two labels; with three or more, exp `2·√x·e^{−Λ/2}` and
    /// squared hinge `√2·√x/(1+Λ)`, which hold for every label count.
    LabelAware,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstrainedBound {
    pub enhanced: BoundReport,
    /// Same bound at Λ = 0.
    pub baseline: BoundReport,
    pub lambda: f64,
}

impl ConstrainedBound {
    /// Enhanced rhs never exceeds the baseline rhs.
    pub fn dominates(&self) -> bool {
        self.enhanced.rhs <= self.baseline.rhs
    }
}

/// `min over support of max_y h(x, y)`.
pub fn lambda_of(h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    let mut lam = f64::INFINITY;
    for i in 0..dist.len() {
        let m = h.scores_at(dist, i)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        lam = lam.min(m);
    }
    Ok(lam)
}

/// Γ_Λ for the constrained exp, hinge and squared-hinge losses.
pub fn constrained_transform(
    phi: PhiSpec,
    lambda: f64,
    n_labels: usize,
    constants: GammaConstants,
) -> Result<Transform> {
    let wide = constants == GammaConstants::LabelAware && n_labels > 2;
    let sqrt2 = std::f64::consts::SQRT_2;
    match phi {
        PhiSpec::Exp => {
            let k = if wide { 2.0 } else { sqrt2 };
            Ok(Transform::sqrt(k * (-lambda / 2.0).exp()))
        }
        PhiSpec::Hinge => Ok(Transform::linear(1.0 / (1.0 + lambda))),
        PhiSpec::SqHinge => {
            let k = if wide { sqrt2 } else { 1.0 };
            Ok(Transform::sqrt(k / (1.0 + lambda)))
        }
        other => input(format!("no Λ-enhanced bound for {}", other.name())),
    }
}

pub fn constrained_enhanced_bound(
    phi: PhiSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
) -> Result<ConstrainedBound> {
    constrained_enhanced_bound_with(phi, h, dist, GammaConstants::Stated, 1.0)
}

/// Zero-one regret against the Λ-enhanced Γ of the constrained-Φ regret.
/// `scale` multiplies Γ (1 for the bound itself; other values serve as
/// negative controls).
pub fn constrained_enhanced_bound_with(
    phi: PhiSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    constants: GammaConstants,
    scale: f64,
) -> Result<ConstrainedBound> {
    if !h.sum_zero {
        return Err(Error::Contract("constrained bound needs a sum-zero hypothesis".into()));
    }
    if dist.label_count() < 2 {
        return input("constrained bound needs at least two labels");
    }
    let hset = HypothesisSet::SumZeroComplete;
    let surrogate = LossSpec::constrained(phi);
    let ds = regrets(&surrogate, h, dist, &hset)?;
    let dz = regrets(&LossSpec::ZeroOneMulti, h, dist, &hset)?;
    let d = dist.expect(|i| ds[i]);
    let lhs = dist.expect(|i| dz[i]);
    let lambda = lambda_of(h, dist)?;
    let n = dist.label_count();
    let report = |lam: f64| -> Result<BoundReport> {
        let g = constrained_transform(phi, lam, n, constants)?.scaled(scale);
        let residuals = (0..dist.len()).map(|i| g.gamma(ds[i]) - dz[i]).collect();
        Ok(BoundReport::new(lhs, g.gamma(d), 1.0, true).with_residuals(dist, residuals).note("lambda", lam))
    };
    Ok(ConstrainedBound { enhanced: report(lambda)?, baseline: report(0.0)?, lambda })
}

/// `inf_u A·Φ(−u) + B·Φ(−(S − u))`: the two-coordinate part of the
/// constrained conditional error, minimized over splits of a fixed sum `S`
/// between labels `a` and `b`, with `A = 1 − p_a`, `B = 1 − p_b`.
pub fn pair_partial_infimum(phi: PhiSpec, a: f64, b: f64, s: f64) -> Result<f64> {
    match phi {
        PhiSpec::Exp => Ok(2.0 * (a * b * s.exp()).sqrt()),
        PhiSpec::Hinge => Ok(a.min(b) * (2.0 + s).max(0.0)),
        PhiSpec::SqHinge => {
            if a + b == 0.0 {
                return Ok(0.0);
            }
            Ok(a * b / (a + b) * (2.0 + s).max(0.0).powi(2))
        }
        other => input(format!("no partial infimum form for {}", other.name())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.5], vec![0.2, 0.8]], &[0.5, 0.5]).unwrap();
        let h = Hypothesis::sum_zero_tabular(vec![vec![0.5, -0.5], vec![1.2, -1.2]]).unwrap();
        assert_eq!(lambda_of(&h, &d).unwrap(), 0.5);
        let z = Hypothesis::sum_zero_tabular(vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(lambda_of(&z, &d).unwrap(), 0.0);
    }

    #[test]
    fn zero_scorer_matches_baseline() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.2, 0.3, 0.5]], &[1.0]).unwrap();
        let z = Hypothesis::sum_zero_tabular(vec![vec![0.0; 3]]).unwrap();
        for phi in [PhiSpec::Exp, PhiSpec::Hinge, PhiSpec::SqHinge] {
            let b = constrained_enhanced_bound(phi, &z, &d).unwrap();
            assert_eq!(b.enhanced.rhs, b.baseline.rhs);
        }
    }

    #[test]
    fn hinge_lambda_one_halves_rhs() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.6, 0.4]], &[1.0]).unwrap();
        let h = Hypothesis::sum_zero_tabular(vec![vec![-1.0, 1.0]]).unwrap();
        let b = constrained_enhanced_bound(PhiSpec::Hinge, &h, &d).unwrap();
        assert_eq!(b.lambda, 1.0);
        assert!((b.enhanced.rhs - b.baseline.rhs / 2.0).abs() < 1e-15);
        assert!(!b.enhanced.violated());
    }

    #[test]
    fn partial_infimum_below_objective() {
        let (a, b, s) = (0.7, 0.4, 0.3);
        for phi in [PhiSpec::Exp, PhiSpec::Hinge, PhiSpec::SqHinge] {
            let inf = pair_partial_infimum(phi, a, b, s).unwrap();
            for k in -40..=40 {
                let u = k as f64 / 10.0;
                assert!(a * phi.eval(-u) + b * phi.eval(-(s - u)) >= inf - 1e-12);
            }
        }
    }

    #[test]
    fn rejects_non_sum_zero() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.6, 0.4]], &[1.0]).unwrap();
        let h = Hypothesis::tabular(vec![vec![1.0, 1.0]]);
        assert!(matches!(constrained_enhanced_bound(PhiSpec::Exp, &h, &d), Err(Error::Contract(_))));
    }
}
