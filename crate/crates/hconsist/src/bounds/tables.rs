//! Γ entries for the standard surrogate/target pairs on complete sets,
//! with the scale constants each entry needs.

use crate::losses::{CompSumFamily, LossSpec, PhiSpec};

use super::Transform;

/// Γ bounding the zero-one regret by the surrogate regret on the complete
/// (or sum-zero complete) set. `n_labels` matters for GCE and MAE only.
/// Constrained entries are the Λ(h) = 0 baselines.
pub fn table_transform(surrogate: &LossSpec, n_labels: usize) -> Option<Transform> {
    let n = n_labels as f64;
    let sqrt2 = std::f64::consts::SQRT_2;
    match surrogate {
        LossSpec::Margin { phi } => Some(match phi {
            PhiSpec::Hinge | PhiSpec::Sigmoid { .. } | PhiSpec::RhoMargin { .. } => Transform::linear(1.0),
            PhiSpec::Logistic | PhiSpec::Exp => Transform::sqrt(sqrt2),
            PhiSpec::SqHinge => Transform::sqrt(1.0),
        }),
        LossSpec::Constrained { phi } => match phi {
            PhiSpec::Hinge | PhiSpec::RhoMargin { .. } => Some(Transform::linear(1.0)),
            PhiSpec::Exp => Some(Transform::sqrt(sqrt2)),
            PhiSpec::SqHinge => Some(Transform::sqrt(1.0)),
            _ => None,
        },
        LossSpec::CompSum { family } => Some(match family {
            CompSumFamily::MultinomialLogistic | CompSumFamily::SumExp => Transform::sqrt(sqrt2),
            CompSumFamily::Gce { a } => Transform::sqrt((2.0 * n.powf(*a)).sqrt()),
            CompSumFamily::Mae => Transform::linear(n),
        }),
        _ => None,
    }
}

/// Scale K in the Tsybakov pointwise assumption `Δ₀₋₁ ≤ K·ΔC^{1/2}`.
pub fn tsybakov_scale(surrogate: &LossSpec) -> Option<f64> {
    let sqrt2 = std::f64::consts::SQRT_2;
    match surrogate {
        LossSpec::Margin { phi: PhiSpec::Logistic | PhiSpec::Exp } => Some(sqrt2),
        LossSpec::Margin { phi: PhiSpec::SqHinge } => Some(1.0),
        LossSpec::CompSum { family: CompSumFamily::MultinomialLogistic } => Some(sqrt2),
        LossSpec::Constrained { phi: PhiSpec::Exp } => Some(2.0),
        LossSpec::Constrained { phi: PhiSpec::SqHinge } => Some(sqrt2),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regret::{best_in_class_probs, conditional_error_scores, HypothesisSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn binary_entries_hold_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phis = [PhiSpec::Hinge, PhiSpec::Logistic, PhiSpec::Exp, PhiSpec::SqHinge, PhiSpec::RhoMargin { rho: 0.5 }];
        for phi in phis {
            let s = LossSpec::margin(phi);
            let g = table_transform(&s, 2).unwrap();
            for _ in 0..300 {
                let eta: f64 = rng.random();
                let h: f64 = rng.random_range(-4.0..4.0);
                let p = [eta, 1.0 - eta];
                let d01 = conditional_error_scores(&LossSpec::ZeroOneBinary, &p, &[h]).unwrap()
                    - best_in_class_probs(&LossSpec::ZeroOneBinary, &p, &HypothesisSet::Complete).unwrap().0;
                let ds = conditional_error_scores(&s, &p, &[h]).unwrap()
                    - best_in_class_probs(&s, &p, &HypothesisSet::Complete).unwrap().0;
                assert!(g.gamma(ds) - d01 >= -1e-9, "{phi:?} eta={eta} h={h}");
            }
        }
    }

    #[test]
    fn sub_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in [Transform::linear(1.0), Transform::sqrt(2f64.sqrt()), Transform::power(3.0, 0.7)] {
            for _ in 0..200 {
                let a: f64 = rng.random_range(0.0..5.0);
                let b: f64 = rng.random_range(0.0..5.0);
                assert!(g.gamma(a + b) <= g.gamma(a) + g.gamma(b) + 1e-12);
            }
        }
    }
}
