//! Executable bounds: the α/β fundamental tools, the constrained-loss
//! bounds sharpened by Λ(h), and the Tsybakov-noise bounds.

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::LossSpec;
use crate::regret::conditional_error;

pub mod constrained;
pub mod tables;
pub mod tools;
pub mod tsybakov;

pub use constrained::{
    constrained_enhanced_bound, constrained_enhanced_bound_with, constrained_transform, lambda_of,
    pair_partial_infimum, ConstrainedBound, GammaConstants,
};
pub use tools::{check_pointwise_assumption, evaluate_power_bound, evaluate_tool_bound, Mode, ToolSetup, Variant};
pub use tsybakov::{
    tsybakov_bound, tsybakov_exponent, tsybakov_lemma_check, tsybakov_rhs, LemmaCheck, Setting, TsybakovSetup,
};

/// A bound counts as violated when its slack drops below `-VIOLATION_TOL`.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Pointwise hypotheses may fail by at most this much and still count as held.
pub const HYPOTHESIS_TOL: f64 = 1e-12;

/// `Γ(x) = offset + scale · x^{1/s}` on ℝ₊, with `Ψ = Γ⁻¹` when `offset = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transform {
    pub s: f64,
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
}

impl Transform {
    pub fn power(s: f64, scale: f64) -> Self {
        Transform { s, scale, offset: 0.0 }
    }

    pub fn linear(scale: f64) -> Self {
        Self::power(1.0, scale)
    }

    pub fn sqrt(scale: f64) -> Self {
        Self::power(2.0, scale)
    }

    pub fn identity() -> Self {
        Self::linear(1.0)
    }

    pub fn with_offset(self, offset: f64) -> Self {
        Transform { offset, ..self }
    }

    /// Same transform with the scale multiplied by `k`.
    pub fn scaled(self, k: f64) -> Self {
        Transform { scale: self.scale * k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return input(format!("exponent s = {} must be >= 1", self.s));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return input(format!("scale {} must be positive", self.scale));
        }
        if !(self.offset >= 0.0) {
            return input(format!("offset {} must be >= 0", self.offset));
        }
        Ok(())
    }

    pub fn gamma(&self, x: f64) -> f64 {
        self.offset + self.scale * x.max(0.0).powf(1.0 / self.s)
    }

    pub fn psi(&self, x: f64) -> f64 {
        ((x - self.offset).max(0.0) / self.scale).powf(self.s)
    }
}

/// Positive weight functions α(h, x), β(h, x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorSpec {
    One,
    Const {
        v: f64,
    },
    /// `1_{ĥ(x) ≠ ĥ*(x)} + ε`.
    DisagreementPlusEps {
        eps: f64,
    },
    /// `E_X[β]^s`, using the β paired with this factor.
    ExpectationPower {
        s: f64,
    },
    ConditionalErrorOf {
        loss: LossSpec,
    },
    /// `max(η(x), 1 − η(x))`.
    UMax,
}

pub const DEFAULT_EPS: f64 = 1e-6;

/// Indicator that `h` and the Bayes classifier disagree at index `i`.
pub fn disagrees(h: &Hypothesis, dist: &DiscreteDistribution, i: usize) -> Result<bool> {
    Ok(h.predict(dist, i)? != dist.bayes_label(i))
}

/// Evaluate a factor at every support point. `paired` carries the β values
/// needed by [`FactorSpec::ExpectationPower`].
pub fn evaluate_factor(
    spec: &FactorSpec,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    paired: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let k = dist.len();
    let v: Vec<f64> = match spec {
        FactorSpec::One => vec![1.0; k],
        FactorSpec::Const { v } => vec![*v; k],
        FactorSpec::DisagreementPlusEps { eps } => {
            (0..k).map(|i| Ok(if disagrees(h, dist, i)? { 1.0 } else { 0.0 } + eps)).collect::<Result<_>>()?
        }
        FactorSpec::ExpectationPower { s } => {
            let beta = paired.ok_or_else(|| Error::Contract("expectation-power factor needs a paired beta".into()))?;
            vec![dist.expect(|i| beta[i]).powf(*s); k]
        }
        FactorSpec::ConditionalErrorOf { loss } => {
            (0..k).map(|i| conditional_error(loss, h, dist, i)).collect::<Result<_>>()?
        }
        FactorSpec::UMax => {
            if !dist.is_binary() {
                return input("u(x) = max(η, 1 − η) needs a binary distribution");
            }
            (0..k).map(|i| dist.eta(i).max(1.0 - dist.eta(i))).collect()
        }
    };
    if let Some(i) = v.iter().position(|a| !(*a > 0.0) || !a.is_finite()) {
        return Err(Error::Contract(format!("factor {spec:?} is {} at support id {}", v[i], dist.id(i))));
    }
    Ok(v)
}

/// Evaluated bound with its per-point diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub gamma_h: f64,
    /// False when the theorem's hypothesis failed; nothing is asserted then.
    pub applicable: bool,
    /// Support id with the smallest pointwise residual.
    pub worst_point: Option<i64>,
    /// Signed pointwise-hypothesis residuals in support order.
    #[serde(skip)]
    pub per_point: Vec<f64>,
    /// Named side quantities (limits, offsets, baseline values).
    #[serde(skip)]
    pub diagnostics: Vec<(String, f64)>,
}

impl BoundReport {
    pub fn new(lhs: f64, rhs: f64, gamma_h: f64, applicable: bool) -> Self {
        BoundReport { lhs, rhs, slack: rhs - lhs, gamma_h, applicable, ..Default::default() }
    }

    pub fn with_residuals(mut self, dist: &DiscreteDistribution, residuals: Vec<f64>) -> Self {
        self.worst_point = worst_index(&residuals).map(|i| dist.id(i));
        self.per_point = residuals;
        self
    }

    pub fn note(mut self, name: &str, value: f64) -> Self {
        self.diagnostics.push((name.to_string(), value));
        self
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Applicable and slack below `-VIOLATION_TOL`.
    pub fn violated(&self) -> bool {
        self.violated_at(VIOLATION_TOL)
    }

    pub fn violated_at(&self, tol: f64) -> bool {
        self.applicable && self.slack < -tol
    }

    pub fn min_residual(&self) -> f64 {
        self.per_point.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn worst_index(v: &[f64]) -> Option<usize> {
    (0..v.len()).min_by(|a, b| v[*a].total_cmp(&v[*b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_inverse_pair() {
        let t = Transform::sqrt(2f64.sqrt());
        for x in [0.0, 0.1, 0.7, 3.0] {
            assert!((t.psi(t.gamma(x)) - x).abs() < 1e-14);
        }
        assert_eq!(t.gamma(0.0), 0.0);
    }

    #[test]
    fn report_json_keys() {
        let r = BoundReport::new(0.5, 0.75, 1.0, true);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"lhs":0.5,"rhs":0.75,"slack":0.25,"gamma_h":1.0,"applicable":true,"worst_point":null}"#);
    }

    #[test]
    fn violation_needs_applicability() {
        let mut r = BoundReport::new(1.0, 0.5, 1.0, true);
        assert!(r.violated());
        r.applicable = false;
        assert!(!r.violated());
        assert!(!BoundReport::new(1.0, 1.0 - 5e-10, 1.0, true).violated());
    }

    #[test]
    fn factors_reject_non_positive_values() {
        let d = DiscreteDistribution::binary(&[0.3], &[1.0]).unwrap();
        let h = Hypothesis::scalar(&[0.0]);
        assert!(evaluate_factor(&FactorSpec::Const { v: 0.0 }, &h, &d, None).is_err());
        assert!(evaluate_factor(&FactorSpec::ExpectationPower { s: 2.0 }, &h, &d, None).is_err());
        let u = evaluate_factor(&FactorSpec::UMax, &h, &d, None).unwrap();
        assert!((u[0] - 0.7).abs() < 1e-15);
    }
}
