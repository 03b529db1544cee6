//! Noise-adaptive bounds under the Tsybakov condition
//! `Pr[γ(X) ≤ t] ≤ B·t^{α/(1−α)}`.

use crate::dist::{fit_tsybakov_envelope, DiscreteDistribution, NoiseProfile};
use crate::error::{input, Error, Result};
use crate::hypothesis::Hypothesis;
use crate::losses::LossSpec;
use crate::regret::{regrets, HypothesisSet};

use super::tables::tsybakov_scale;
use super::{disagrees, BoundReport, HYPOTHESIS_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    Binary,
    Multiclass,
}

impl Setting {
    pub fn target(&self) -> LossSpec {
        match self {
            Setting::Binary => LossSpec::ZeroOneBinary,
            Setting::Multiclass => LossSpec::ZeroOneMulti,
        }
    }
}

/// Pointwise assumption `Δ₀₋₁ ≤ scale·ΔC^{1/s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsybakovSetup {
    pub setting: Setting,
    pub surrogate: LossSpec,
    pub hset: HypothesisSet,
    pub s: f64,
    pub scale: f64,
}

impl TsybakovSetup {
    /// Uses the registered scale for the surrogate.
    pub fn new(setting: Setting, surrogate: LossSpec, hset: HypothesisSet, s: f64) -> Result<Self> {
        let scale = tsybakov_scale(&surrogate)
            .ok_or_else(|| Error::Input(format!("no registered Tsybakov scale for {}", surrogate.name())))?;
        Ok(TsybakovSetup { setting, surrogate, hset, s, scale })
    }

    pub fn scaled(self, k: f64) -> Self {
        TsybakovSetup { scale: self.scale * k, ..self }
    }
}

/// `1 / (s − α(s − 1))`.
pub fn tsybakov_exponent(s: f64, alpha: f64) -> f64 {
    1.0 / (s - alpha * (s - 1.0))
}

/// `c^{(s−1)e}·(scale^s·d)^e` for a surrogate regret (or estimate) `d`.
pub fn tsybakov_rhs(setup: &TsybakovSetup, noise: &NoiseProfile, d: f64) -> f64 {
    let e = tsybakov_exponent(setup.s, noise.alpha);
    noise.c.powf((setup.s - 1.0) * e) * (setup.scale.powf(setup.s) * d.max(0.0)).powf(e)
}

fn contains_bayes(hset: &HypothesisSet) -> bool {
    match hset {
        HypothesisSet::Bounded { b } => *b > 0.0,
        HypothesisSet::LinearClass { .. } => false,
        _ => true,
    }
}

/// Zero-one regret against `c^{(s−1)e}·(scale^s·D)^e` with
/// `e = 1/(s − α(s−1))`. Inapplicable when the distribution does not meet
/// `noise`, when the Bayes classifier lies outside the set, or when the
/// pointwise assumption fails.
pub fn tsybakov_bound(
    setup: &TsybakovSetup,
    h: &Hypothesis,
    dist: &DiscreteDistribution,
    noise: &NoiseProfile,
) -> Result<BoundReport> {
    if !(setup.s >= 1.0) || !(setup.scale > 0.0) {
        return input(format!("invalid exponent {} or scale {}", setup.s, setup.scale));
    }
    if setup.setting == Setting::Binary && !dist.is_binary() {
        return input("binary setting on a multi-label distribution");
    }
    let alpha = noise.alpha;
    let noise_ok = if alpha == 0.0 {
        true
    } else {
        match fit_tsybakov_envelope(dist, alpha) {
            Ok(fit) => fit.c <= noise.c * (1.0 + 1e-12),
            Err(Error::EnvelopeInfeasible(_)) => false,
            Err(e) => return Err(e),
        }
    };
    let ds = regrets(&setup.surrogate, h, dist, &setup.hset)?;
    let dz = regrets(&setup.setting.target(), h, dist, &setup.hset)?;
    let residuals: Vec<f64> =
        (0..dist.len()).map(|i| setup.scale * ds[i].max(0.0).powf(1.0 / setup.s) - dz[i]).collect();
    let pointwise_ok = (0..dist.len()).all(|i| dist.marginal()[i] == 0.0 || residuals[i] >= -HYPOTHESIS_TOL);
    let s = setup.s;
    let e = tsybakov_exponent(s, alpha);
    let d = dist.expect(|i| ds[i]);
    let lhs = dist.expect(|i| dz[i]);
    let lead = noise.c.powf((s - 1.0) * e);
    let rhs = tsybakov_rhs(setup, noise, d);
    let applicable = noise_ok && pointwise_ok && contains_bayes(&setup.hset);
    Ok(BoundReport::new(lhs, rhs, lead, applicable)
        .with_residuals(dist, residuals)
        .note("exponent", e)
        .note("c", noise.c)
        .note("surrogate_regret", d))
}

/// The chain `E[1_dis] ≤ c·E[γ·1_dis]^α ≤ c·(E₀₋₁(h) − E₀₋₁(h*))^α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaCheck {
    pub disagreement: f64,
    pub weighted: f64,
    pub excess: f64,
    pub c: f64,
    /// `c·E[γ·1_dis]^α − E[1_dis]`.
    pub first: f64,
    /// `c·excess^α − c·E[γ·1_dis]^α`.
    pub second: f64,
}

impl LemmaCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.first >= -tol && self.second >= -tol
    }
}

pub fn tsybakov_lemma_check(dist: &DiscreteDistribution, alpha: f64, h: &Hypothesis) -> Result<LemmaCheck> {
    let fit = fit_tsybakov_envelope(dist, alpha)?;
    let mut dis = 0.0;
    let mut weighted = 0.0;
    let mut excess = 0.0;
    for i in 0..dist.len() {
        let m = dist.marginal()[i];
        let p = dist.conditional(i);
        let pred = h.predict(dist, i)?;
        excess += m * (p[dist.bayes_label(i)] - p[pred]);
        if disagrees(h, dist, i)? {
            dis += m;
            weighted += m * dist.margin_at(i);
        }
    }
    let c = fit.c;
    Ok(LemmaCheck {
        disagreement: dis,
        weighted,
        excess,
        c,
        first: c * weighted.powf(alpha) - dis,
        second: c * excess.powf(alpha) - c * weighted.powf(alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::PhiSpec;

    #[test]
    fn exponent_limits() {
        assert_eq!(tsybakov_exponent(2.0, 0.0), 0.5);
        assert!((tsybakov_exponent(2.0, 1.0 - 1e-12) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn massart_binary_logistic() {
        let d = DiscreteDistribution::binary(&[0.9, 0.2, 0.75], &[0.3, 0.3, 0.4]).unwrap();
        let alpha = 0.5;
        let noise = fit_tsybakov_envelope(&d, alpha).unwrap();
        let setup =
            TsybakovSetup::new(Setting::Binary, LossSpec::margin(PhiSpec::Logistic), HypothesisSet::Complete, 2.0)
                .unwrap();
        let h = Hypothesis::scalar(&[-0.5, 0.3, 1.0]);
        let r = tsybakov_bound(&setup, &h, &d, &noise).unwrap();
        assert!(r.applicable && !r.violated(), "{r:?}");
    }

    #[test]
    fn wrong_noise_is_inapplicable() {
        let d = DiscreteDistribution::binary(&[0.9, 0.55], &[0.5, 0.5]).unwrap();
        let noise = NoiseProfile::new(0.9, 1e-3).unwrap();
        let setup =
            TsybakovSetup::new(Setting::Binary, LossSpec::margin(PhiSpec::Exp), HypothesisSet::Complete, 2.0).unwrap();
        let r = tsybakov_bound(&setup, &Hypothesis::scalar(&[-1.0, -1.0]), &d, &noise).unwrap();
        assert!(!r.applicable);
    }

    #[test]
    fn lemma_bayes_is_trivial() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.6, 0.1, 0.3], vec![0.1, 0.2, 0.7]], &[0.5, 0.5]).unwrap();
        let h = Hypothesis::tabular(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let l = tsybakov_lemma_check(&d, 0.5, &h).unwrap();
        assert_eq!((l.disagreement, l.weighted, l.excess), (0.0, 0.0, 0.0));
        assert!(l.holds(1e-9));
        let c = fit_tsybakov_envelope(&d, 0.5).unwrap();
        assert!((l.c - c.b.powf(0.5) / 0.5f64.powf(0.5)).abs() < 1e-12);
    }
}
