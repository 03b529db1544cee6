//! The α/β fundamental tools in convex, concave and power form.

use crate::dist::DiscreteDistribution;
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::LossSpec;
use crate::regret::{regrets, HypothesisSet};

use super::{disagrees, evaluate_factor, BoundReport, FactorSpec, Transform, HYPOTHESIS_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `Ψ(ΔC₂·E[β]/β) ≤ α·ΔC₁` with `Ψ = Γ⁻¹` convex.
    Convex,
    /// `ΔC₂·E[β]/β ≤ Γ(α·ΔC₁)` with Γ concave.
    Concave,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `γ = sup(α·β) / E[β]`.
    SupForm,
    /// `γ = E[α·β] / E[β]`; needs ΔC₁ and α·β oppositely ordered.
    FkgForm,
}

/// Target loss (index 2), surrogate loss (index 1), and the tool's Γ, α, β.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToolSetup {
    pub target: LossSpec,
    pub surrogate: LossSpec,
    pub hset: HypothesisSet,
    pub transform: Transform,
    pub alpha: FactorSpec,
    pub beta: FactorSpec,
    pub mode: Mode,
}

impl ToolSetup {
    /// Concave tool with α ≡ β ≡ 1.
    pub fn new(target: LossSpec, surrogate: LossSpec, hset: HypothesisSet, transform: Transform) -> Self {
        ToolSetup {
            target,
            surrogate,
            hset,
            transform,
            alpha: FactorSpec::One,
            beta: FactorSpec::One,
            mode: Mode::Concave,
        }
    }

    pub fn factors(self, alpha: FactorSpec, beta: FactorSpec) -> Self {
        ToolSetup { alpha, beta, ..self }
    }

    pub fn mode(self, mode: Mode) -> Self {
        ToolSetup { mode, ..self }
    }

    fn validate(&self) -> Result<()> {
        self.transform.validate()?;
        self.target.validate()?;
        self.surrogate.validate()?;
        if self.mode == Mode::Convex && self.transform.offset != 0.0 {
            return input("convex mode needs Γ(0) = 0 so that Ψ = Γ⁻¹ exists");
        }
        Ok(())
    }
}

/// Everything a tool bound needs, evaluated once.
pub(crate) struct Evaluated {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub e_beta: f64,
    pub residuals: Vec<f64>,
}

pub(crate) fn evaluate(setup: &ToolSetup, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<Evaluated> {
    setup.validate()?;
    let d1 = regrets(&setup.surrogate, h, dist, &setup.hset)?;
    let d2 = regrets(&setup.target, h, dist, &setup.hset)?;
    let beta = evaluate_factor(&setup.beta, h, dist, None)?;
    let alpha = evaluate_factor(&setup.alpha, h, dist, Some(&beta))?;
    let e_beta = dist.expect(|i| beta[i]);
    let g = setup.transform;
    let residuals = (0..dist.len())
        .map(|i| {
            let scaled = d2[i].max(0.0) * e_beta / beta[i];
            let a1 = alpha[i] * d1[i].max(0.0);
            match setup.mode {
                Mode::Convex => a1 - g.psi(scaled),
                Mode::Concave => g.gamma(a1) - scaled,
            }
        })
        .collect();
    Ok(Evaluated { d1, d2, alpha, beta, e_beta, residuals })
}

fn holds(dist: &DiscreteDistribution, residuals: &[f64]) -> bool {
    (0..dist.len()).all(|i| dist.marginal()[i] == 0.0 || residuals[i] >= -HYPOTHESIS_TOL)
}

fn positive_mass(dist: &DiscreteDistribution) -> impl Iterator<Item = usize> + '_ {
    (0..dist.len()).filter(|&i| dist.marginal()[i] > 0.0)
}

/// Signed residual (right side minus left side) of the pointwise assumption
/// at every support point.
pub fn check_pointwise_assumption(setup: &ToolSetup, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<Vec<f64>> {
    Ok(evaluate(setup, h, dist)?.residuals)
}

/// Checks that ΔC₁ and α·β are oppositely ordered over the feature.
fn fkg_precondition(dist: &DiscreteDistribution, d1: &[f64], ab: &[f64]) -> Result<()> {
    if dist.feature_dim() != 1 {
        return Err(Error::Precondition(format!("FKG form needs 1-d features, got {}", dist.feature_dim())));
    }
    let idx: Vec<usize> = positive_mass(dist).collect();
    let f = |i: usize| dist.features(i)[0];
    let tol = 1e-12;
    // direction: +1 when ΔC₁ is non-decreasing in the feature
    let mut dir = 0.0;
    for (k, &i) in idx.iter().enumerate() {
        for &j in &idx[k + 1..] {
            let (dd, da, df) = (d1[j] - d1[i], ab[j] - ab[i], f(j) - f(i));
            let bad_pair = || {
                Error::Precondition(format!(
                    "ΔC₁ and α·β are not oppositely monotone at support ids {} and {}",
                    dist.id(i),
                    dist.id(j)
                ))
            };
            if dd * da > tol {
                return Err(bad_pair());
            }
            if df != 0.0 {
                for s in [dd * df.signum(), -da * df.signum()] {
                    if s.abs() > tol {
                        let sign = s.signum();
                        if dir == 0.0 {
                            dir = sign;
                        } else if dir != sign {
                            return Err(bad_pair());
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// γ(h) and the assembled bound for the convex or concave tool.
pub fn evaluate_tool_bound(
    setup: &ToolSetup,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    variant: Variant,
) -> Result<BoundReport> {
    let ev = evaluate(setup, h, dist)?;
    let ab: Vec<f64> = (0..dist.len()).map(|i| ev.alpha[i] * ev.beta[i]).collect();
    let gamma = match variant {
        Variant::SupForm => positive_mass(dist).map(|i| ab[i]).fold(0.0, f64::max) / ev.e_beta,
        Variant::FkgForm => {
            fkg_precondition(dist, &ev.d1, &ab)?;
            dist.expect(|i| ab[i]) / ev.e_beta
        }
    };
    let d1 = dist.expect(|i| ev.d1[i]);
    let d2 = dist.expect(|i| ev.d2[i]);
    let g = setup.transform;
    let (lhs, rhs) = match setup.mode {
        Mode::Convex => (g.psi(d2.max(0.0)), gamma * d1),
        Mode::Concave => (d2, g.gamma(gamma * d1)),
    };
    let applicable = holds(dist, &ev.residuals);
    Ok(BoundReport::new(lhs, rhs, gamma, applicable)
        .with_residuals(dist, ev.residuals)
        .note("surrogate_regret", d1)
        .note("target_regret", d2))
}

/// Power form: with `t` the conjugate of `s`,
/// `γ = E[α^{t/s} β^t]^{1/t} / E[β]` and `rhs = scale·γ·D₁^{1/s}`.
/// At `s = 1` the Hölder limit `sup(α·β)/E[β]` is used.
pub fn evaluate_power_bound(setup: &ToolSetup, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<BoundReport> {
    let g = setup.transform;
    if g.offset != 0.0 {
        return input("power bound needs Γ(0) = 0");
    }
    let setup = setup.mode(Mode::Concave);
    let ev = evaluate(&setup, h, dist)?;
    let s = g.s;
    let gamma = if s == 1.0 {
        positive_mass(dist).map(|i| ev.alpha[i] * ev.beta[i]).fold(0.0, f64::max) / ev.e_beta
    } else {
        let t = s / (s - 1.0);
        dist.expect(|i| ev.alpha[i].powf(t / s) * ev.beta[i].powf(t)).powf(1.0 / t) / ev.e_beta
    };
    let d1 = dist.expect(|i| ev.d1[i]);
    let d2 = dist.expect(|i| ev.d2[i]);
    let rhs = g.scale * gamma * d1.max(0.0).powf(1.0 / s);
    let applicable = holds(dist, &ev.residuals);
    let mut report = BoundReport::new(d2, rhs, gamma, applicable).with_residuals(dist, ev.residuals);
    if let FactorSpec::DisagreementPlusEps { .. } = setup.beta {
        let dis: Vec<f64> =
            (0..dist.len()).map(|i| Ok(if disagrees(h, dist, i)? { 1.0 } else { 0.0 })).collect::<Result<_>>()?;
        let limit = if s == 1.0 {
            positive_mass(dist).map(|i| dis[i]).fold(0.0, f64::max)
        } else {
            dist.expect(|i| dis[i]).powf((s - 1.0) / s)
        };
        report = report.note("gamma_eps_limit", limit);
    }
    Ok(report.note("surrogate_regret", d1).note("target_regret", d2))
}

/// Constant α making the pointwise assumption an equality on a point mass.
pub fn tightness_alpha(setup: &ToolSetup, h: &Hypothesis, dist: &DiscreteDistribution) -> Result<f64> {
    if dist.len() != 1 {
        return input("tightness probe needs a point-mass distribution");
    }
    let d1 = regrets(&setup.surrogate, h, dist, &setup.hset)?[0];
    let d2 = regrets(&setup.target, h, dist, &setup.hset)?[0];
    if !(d1 > 0.0) {
        return input("surrogate regret vanishes at the point mass");
    }
    if setup.transform.offset != 0.0 {
        return input("tightness probe needs Γ(0) = 0");
    }
    Ok(setup.transform.psi(d2.max(0.0)) / d1)
}
