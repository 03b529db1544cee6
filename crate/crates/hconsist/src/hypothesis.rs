//! Scorers over a finite support: tabular, linear, and stump ensembles.
//!
//! Binary and ranking scorers produce a single score; `predict` maps it to
//! label index 0 (positive) when the score is ≥ 0. Multi-class scorers
//! produce one score per label and predict the argmax, ties going to the
//! highest index.

use serde::{Deserialize, Serialize};

use crate::dist::{argmax_high, DiscreteDistribution};
use crate::error::{input, Error, Result};

pub const SUM_ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// Output when `x[feature] <= threshold`.
    pub left: f64,
    pub right: f64,
    pub coefficient: f64,
}

impl Stump {
    /// The weak learner that outputs 1 everywhere.
    pub fn constant() -> Self {
        Stump { feature: 0, threshold: 0.0, left: 1.0, right: 1.0, coefficient: 1.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.left == self.right
    }

    /// Unweighted output on a feature vector.
    pub fn output(&self, x: &[f64]) -> f64 {
        if self.is_constant() || x[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisKind {
    /// One score vector per support index.
    Tabular { table: Vec<Vec<f64>> },
    /// `scores = weights · features + bias`, one weight row per output.
    Linear { weights: Vec<Vec<f64>>, bias: Vec<f64> },
    /// Scalar scorer `Σ coefficient · stump(x)`.
    StumpEnsemble { stumps: Vec<Stump> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub kind: HypothesisKind,
    #[serde(default)]
    pub sum_zero: bool,
}

impl Hypothesis {
    pub fn tabular(table: Vec<Vec<f64>>) -> Self {
        Hypothesis { kind: HypothesisKind::Tabular { table }, sum_zero: false }
    }

    /// Scalar tabular scorer, one score per support index.
    pub fn scalar(scores: &[f64]) -> Self {
        Self::tabular(scores.iter().map(|s| vec![*s]).collect())
    }

    /// Tabular scorer whose rows must sum to zero.
    pub fn sum_zero_tabular(table: Vec<Vec<f64>>) -> Result<Self> {
        for (i, row) in table.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if s.abs() > SUM_ZERO_TOL {
                return Err(Error::Contract(format!("row {i} sums to {s}")));
            }
        }
        Ok(Hypothesis { kind: HypothesisKind::Tabular { table }, sum_zero: true })
    }

    pub fn linear(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Self {
        Hypothesis { kind: HypothesisKind::Linear { weights, bias }, sum_zero: false }
    }

    pub fn stumps(stumps: Vec<Stump>) -> Self {
        Hypothesis { kind: HypothesisKind::StumpEnsemble { stumps }, sum_zero: false }
    }

    /// Constant-zero scalar scorer over a support of size `k`.
    pub fn zero_scalar(k: usize) -> Self {
        Self::scalar(&vec![0.0; k])
    }

    /// Score vector at support index `i`.
    pub fn scores_at(&self, dist: &DiscreteDistribution, i: usize) -> Result<Vec<f64>> {
        dist.check_index(i)?;
        let v = match &self.kind {
            HypothesisKind::Tabular { table } => {
                if table.len() != dist.len() {
                    return input(format!("table has {} rows for {} support points", table.len(), dist.len()));
                }
                table[i].clone()
            }
            HypothesisKind::Linear { weights, bias } => {
                let x = dist.features(i);
                if weights.len() != bias.len() {
                    return input("weights and bias disagree on output count");
                }
                weights
                    .iter()
                    .zip(bias)
                    .map(|(w, b)| {
                        if w.len() != x.len() {
                            return input(format!(
                                "weight row of length {} for features of dimension {}",
                                w.len(),
                                x.len()
                            ));
                        }
                        Ok(w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b)
                    })
                    .collect::<Result<Vec<f64>>>()?
            }
            HypothesisKind::StumpEnsemble { stumps } => {
                let x = dist.features(i);
                let mut s = 0.0;
                for st in stumps {
                    if !st.is_constant() && st.feature >= x.len() {
                        return input(format!("stump reads feature {} of a {}-dimensional point", st.feature, x.len()));
                    }
                    s += st.coefficient * st.output(x);
                }
                vec![s]
            }
        };
        if v.is_empty() {
            return input("hypothesis produced no scores");
        }
        if self.sum_zero {
            let s: f64 = v.iter().sum();
            if s.abs() > SUM_ZERO_TOL {
                return Err(Error::Contract(format!("scores at index {i} sum to {s} but sum_zero is set")));
            }
        }
        Ok(v)
    }

    /// All score vectors over the support.
    pub fn table(&self, dist: &DiscreteDistribution) -> Result<Vec<Vec<f64>>> {
        (0..dist.len()).map(|i| self.scores_at(dist, i)).collect()
    }

    /// Scalar score at index `i` (first coordinate).
    pub fn score(&self, dist: &DiscreteDistribution, i: usize) -> Result<f64> {
        Ok(self.scores_at(dist, i)?[0])
    }

    /// Predicted label index at `i`.
    pub fn predict(&self, dist: &DiscreteDistribution, i: usize) -> Result<usize> {
        Ok(predict_scores(&self.scores_at(dist, i)?))
    }
}

/// Scalar scores predict label 0 (positive) iff the score is ≥ 0; vector
/// scores predict their argmax with ties to the highest index.
pub fn predict_scores(scores: &[f64]) -> usize {
    if scores.len() == 1 {
        if scores[0] >= 0.0 {
            0
        } else {
            1
        }
    } else {
        argmax_high(scores)
    }
}

/// Sign of a binary label index: 0 ↦ +1, 1 ↦ −1.
pub fn label_sign(y: usize) -> f64 {
    if y == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_tie_break_and_sign_zero() {
        assert_eq!(predict_scores(&[0.3, 0.3, 0.1]), 1);
        assert_eq!(predict_scores(&[0.0]), 0);
        assert_eq!(predict_scores(&[-1e-300]), 1);
    }

    #[test]
    fn sum_zero_enforced() {
        assert!(Hypothesis::sum_zero_tabular(vec![vec![1.0, -0.5]]).is_err());
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.5]], &[1.0]).unwrap();
        let mut h = Hypothesis::tabular(vec![vec![1.0, 0.0]]);
        h.sum_zero = true;
        assert!(matches!(h.scores_at(&d, 0), Err(Error::Contract(_))));
    }

    #[test]
    fn stump_and_linear_evaluation() {
        let d =
            DiscreteDistribution::binary_with_features(&[0.5, 0.5], &[0.5, 0.5], vec![vec![0.2], vec![0.8]]).unwrap();
        let st = Stump { feature: 0, threshold: 0.5, left: 1.0, right: -1.0, coefficient: 2.0 };
        let h = Hypothesis::stumps(vec![st, Stump { coefficient: 0.5, ..Stump::constant() }]);
        assert_eq!(h.score(&d, 0).unwrap(), 2.5);
        assert_eq!(h.score(&d, 1).unwrap(), -1.5);
        let lin = Hypothesis::linear(vec![vec![3.0]], vec![-1.0]);
        assert!((lin.score(&d, 1).unwrap() - 1.4).abs() < 1e-15);
    }
}
