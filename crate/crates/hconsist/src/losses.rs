//! Loss families as pure functions of scores.
//!
//! JSON tags (`kind` for [`LossSpec`], `family` for [`PhiSpec`] and
//! [`CompSumFamily`]):
//!
//! | kind | extra fields |
//! |------|--------------|
//! | `zero_one_binary`, `zero_one_multi`, `ranking_zero_one` | none |
//! | `margin`, `constrained`, `ranking_pair` | `phi` |
//! | `comp_sum` | `family` |
//!
//! Φ families: `hinge`, `logistic`, `exp`, `sq_hinge`, `sigmoid` (`k`),
//! `rho_margin` (`rho`). Comp-sum families: `sum_exp`,
//! `multinomial_logistic`, `gce` (`a`), `mae`.

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::{label_sign, predict_scores, Hypothesis, SUM_ZERO_TOL};

/// Non-increasing, non-negative margin function Φ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PhiSpec {
    Hinge,
    Logistic,
    Exp,
    SqHinge,
    Sigmoid { k: f64 },
    RhoMargin { rho: f64 },
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl PhiSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhiSpec::Sigmoid { k } if !(k > 0.0 && k.is_finite()) => input(format!("sigmoid k = {k} must be positive")),
            PhiSpec::RhoMargin { rho } if !(rho > 0.0 && rho.is_finite()) => {
                input(format!("rho = {rho} must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            PhiSpec::Hinge => (1.0 - u).max(0.0),
            PhiSpec::Logistic => softplus(-u),
            PhiSpec::Exp => (-u).exp(),
            PhiSpec::SqHinge => {
                if u <= 1.0 {
                    (1.0 - u) * (1.0 - u)
                } else {
                    0.0
                }
            }
            PhiSpec::Sigmoid { k } => 1.0 - (k * u).tanh(),
            PhiSpec::RhoMargin { rho } => (1.0 - u / rho).clamp(0.0, 1.0),
        }
    }

    /// Derivative (a one-sided choice at kinks).
    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            PhiSpec::Hinge => {
                if u < 1.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            PhiSpec::Logistic => -1.0 / (1.0 + u.exp()),
            PhiSpec::Exp => -(-u).exp(),
            PhiSpec::SqHinge => {
                if u <= 1.0 {
                    -2.0 * (1.0 - u)
                } else {
                    0.0
                }
            }
            PhiSpec::Sigmoid { k } => {
                let c = (k * u).cosh();
                -k / (c * c)
            }
            PhiSpec::RhoMargin { rho } => {
                if u > 0.0 && u < rho {
                    -1.0 / rho
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, PhiSpec::Hinge | PhiSpec::Logistic | PhiSpec::Exp | PhiSpec::SqHinge)
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self, PhiSpec::Logistic | PhiSpec::Exp | PhiSpec::SqHinge | PhiSpec::Sigmoid { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhiSpec::Hinge => "hinge",
            PhiSpec::Logistic => "logistic",
            PhiSpec::Exp => "exp",
            PhiSpec::SqHinge => "sq_hinge",
            PhiSpec::Sigmoid { .. } => "sigmoid",
            PhiSpec::RhoMargin { .. } => "rho_margin",
        }
    }
}

pub fn phi_eval(phi: PhiSpec, u: f64) -> f64 {
    phi.eval(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CompSumFamily {
    SumExp,
    MultinomialLogistic,
    Gce { a: f64 },
    Mae,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    ZeroOneBinary,
    ZeroOneMulti,
    Margin { phi: PhiSpec },
    Constrained { phi: PhiSpec },
    CompSum { family: CompSumFamily },
    RankingPair { phi: PhiSpec },
    RankingZeroOne,
}

impl LossSpec {
    pub fn margin(phi: PhiSpec) -> Self {
        LossSpec::Margin { phi }
    }

    pub fn constrained(phi: PhiSpec) -> Self {
        LossSpec::Constrained { phi }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LossSpec::Margin { phi } | LossSpec::RankingPair { phi } => phi.validate(),
            LossSpec::Constrained { phi } => {
                phi.validate()?;
                match phi {
                    PhiSpec::Exp | PhiSpec::Hinge | PhiSpec::SqHinge | PhiSpec::RhoMargin { .. } => Ok(()),
                    other => input(format!("constrained loss does not support {}", other.name())),
                }
            }
            LossSpec::CompSum { family: CompSumFamily::Gce { a } } if !(*a > 0.0 && *a < 1.0) => {
                input(format!("gce parameter a = {a} outside (0, 1)"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, LossSpec::RankingPair { .. } | LossSpec::RankingZeroOne)
    }

    pub fn name(&self) -> String {
        match self {
            LossSpec::ZeroOneBinary => "zero_one_binary".into(),
            LossSpec::ZeroOneMulti => "zero_one_multi".into(),
            LossSpec::Margin { phi } => format!("margin_{}", phi.name()),
            LossSpec::Constrained { phi } => format!("constrained_{}", phi.name()),
            LossSpec::CompSum { family } => match family {
                CompSumFamily::SumExp => "comp_sum_exp".into(),
                CompSumFamily::MultinomialLogistic => "multinomial_logistic".into(),
                CompSumFamily::Gce { a } => format!("gce_{a}"),
                CompSumFamily::Mae => "mae".into(),
            },
            LossSpec::RankingPair { phi } => format!("ranking_{}", phi.name()),
            LossSpec::RankingZeroOne => "ranking_zero_one".into(),
        }
    }
}

fn log_softmax(scores: &[f64]) -> Vec<f64> {
    let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + scores.iter().map(|s| (s - m).exp()).sum::<f64>().ln();
    scores.iter().map(|s| s - lse).collect()
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    log_softmax(scores).into_iter().map(f64::exp).collect()
}

/// Loss of a score vector against label index `y`.
pub fn loss_from_scores(loss: &LossSpec, scores: &[f64], y: usize) -> Result<f64> {
    match loss {
        LossSpec::ZeroOneBinary => {
            binary_scores(scores)?;
            check_label(y, 2)?;
            Ok(if predict_scores(&scores[..1]) == y { 0.0 } else { 1.0 })
        }
        LossSpec::ZeroOneMulti => {
            check_label(y, scores.len().max(2))?;
            Ok(if predict_scores(scores) == y { 0.0 } else { 1.0 })
        }
        LossSpec::Margin { phi } => {
            let h = binary_scores(scores)?;
            check_label(y, 2)?;
            Ok(phi.eval(label_sign(y) * h))
        }
        LossSpec::Constrained { phi } => {
            loss.validate()?;
            check_label(y, scores.len())?;
            check_sum_zero(scores)?;
            Ok(scores.iter().enumerate().filter(|(j, _)| *j != y).map(|(_, h)| phi.eval(-h)).sum())
        }
        LossSpec::CompSum { family } => {
            loss.validate()?;
            check_label(y, scores.len())?;
            let ls = log_softmax(scores);
            let sy = ls[y].exp();
            Ok(match *family {
                CompSumFamily::SumExp => {
                    scores.iter().enumerate().filter(|(j, _)| *j != y).map(|(_, h)| (h - scores[y]).exp()).sum()
                }
                CompSumFamily::MultinomialLogistic => -ls[y],
                CompSumFamily::Gce { a } => (1.0 - (a * ls[y]).exp()) / a,
                CompSumFamily::Mae => 1.0 - sy,
            })
        }
        LossSpec::RankingPair { .. } | LossSpec::RankingZeroOne => {
            input("pair losses take two inputs; use pair_loss_from_scores")
        }
    }
}

fn check_label(y: usize, n: usize) -> Result<()> {
    if y >= n {
        return input(format!("label {y} out of range for {n} labels"));
    }
    Ok(())
}

fn binary_scores(scores: &[f64]) -> Result<f64> {
    if scores.len() != 1 {
        return input(format!("binary loss needs a scalar score, got {}", scores.len()));
    }
    Ok(scores[0])
}

fn check_sum_zero(scores: &[f64]) -> Result<()> {
    let s: f64 = scores.iter().sum();
    if s.abs() > SUM_ZERO_TOL {
        return Err(Error::Contract(format!("constrained loss needs sum-zero scores, got sum {s}")));
    }
    Ok(())
}

/// `loss(h, x, y)` at support index `x`.
pub fn loss_eval(loss: &LossSpec, h: &Hypothesis, dist: &DiscreteDistribution, x: usize, y: usize) -> Result<f64> {
    if matches!(loss, LossSpec::Constrained { .. }) && !h.sum_zero {
        return Err(Error::Contract("constrained loss evaluated on a hypothesis without sum_zero".into()));
    }
    loss_from_scores(loss, &h.scores_at(dist, x)?, y)
}

/// Pair loss for scalar scores `hx`, `hxp` and binary labels (0 = +1).
pub fn pair_loss_from_scores(loss: &LossSpec, hx: f64, hxp: f64, y: usize, yp: usize) -> Result<f64> {
    check_label(y, 2)?;
    check_label(yp, 2)?;
    if y == yp {
        return Ok(0.0);
    }
    let t = (label_sign(y) - label_sign(yp)) * (hx - hxp);
    match loss {
        LossSpec::RankingPair { phi } => Ok(phi.eval(t / 2.0)),
        LossSpec::RankingZeroOne => Ok(if t < 0.0 {
            1.0
        } else if hx == hxp {
            0.5
        } else {
            0.0
        }),
        other => input(format!("{} is not a pair loss", other.name())),
    }
}

pub fn pair_loss_eval(
    loss: &LossSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    x: usize,
    xp: usize,
    y: usize,
    yp: usize,
) -> Result<f64> {
    pair_loss_from_scores(loss, h.score(dist, x)?, h.score(dist, xp)?, y, yp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_examples() {
        assert_eq!(phi_eval(PhiSpec::Hinge, 1.0), 0.0);
        assert_eq!(phi_eval(PhiSpec::Exp, 0.0), 1.0);
        assert!((phi_eval(PhiSpec::Logistic, 0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((phi_eval(PhiSpec::Logistic, -800.0) - 800.0).abs() < 1e-12);
        assert_eq!(phi_eval(PhiSpec::RhoMargin { rho: 0.5 }, 0.25), 0.5);
    }

    #[test]
    fn loss_examples() {
        let z = LossSpec::ZeroOneBinary;
        assert_eq!(loss_from_scores(&z, &[0.0], 0).unwrap(), 0.0);
        let ce = LossSpec::constrained(PhiSpec::Exp);
        assert_eq!(loss_from_scores(&ce, &[0.0, 0.0, 0.0], 1).unwrap(), 2.0);
        assert!(matches!(loss_from_scores(&ce, &[1.0, 0.0, 0.0], 1), Err(Error::Contract(_))));
        let mae = LossSpec::CompSum { family: CompSumFamily::Mae };
        assert!((loss_from_scores(&mae, &[0.3; 4], 2).unwrap() - 0.75).abs() < 1e-15);
        assert!(LossSpec::constrained(PhiSpec::Logistic).validate().is_err());
    }

    #[test]
    fn pair_examples() {
        let z = LossSpec::RankingZeroOne;
        assert_eq!(pair_loss_from_scores(&z, 0.4, 0.4, 0, 1).unwrap(), 0.5);
        assert_eq!(pair_loss_from_scores(&z, 0.3, 0.4, 0, 1).unwrap(), 1.0);
        let e = LossSpec::RankingPair { phi: PhiSpec::Exp };
        assert_eq!(pair_loss_from_scores(&e, 0.2, 0.2, 1, 0).unwrap(), 1.0);
        assert_eq!(pair_loss_from_scores(&e, 5.0, -3.0, 1, 1).unwrap(), 0.0);
        // y = -1, y' = +1 applies Φ to h(x') − h(x)
        assert!((pair_loss_from_scores(&e, 1.0, 0.0, 1, 0).unwrap() - 1f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn json_tags() {
        let l = LossSpec::margin(PhiSpec::Logistic);
        assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"kind":"margin","phi":{"family":"logistic"}}"#);
        let g: LossSpec = serde_json::from_str(r#"{"kind":"comp_sum","family":{"family":"gce","a":0.5}}"#).unwrap();
        assert_eq!(g, LossSpec::CompSum { family: CompSumFamily::Gce { a: 0.5 } });
    }
}
