//! Finite-support joint distributions over inputs and labels, margin and
//! Tsybakov-envelope utilities, and seeded samplers.
//!
//! Binary distributions use two labels with `conditional[x][0] = η(x)`, the
//! probability of the positive label.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

pub const SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub id: i64,
    #[serde(default)]
    pub features: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    support: Vec<SupportPoint>,
    marginal: Vec<f64>,
    conditional: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct DiscreteDistribution {
    support: Vec<SupportPoint>,
    marginal: Vec<f64>,
    conditional: Vec<Vec<f64>>,
}

impl TryFrom<RawDistribution> for DiscreteDistribution {
    type Error = Error;
    fn try_from(raw: RawDistribution) -> Result<Self> {
        DiscreteDistribution::new(raw.support, raw.marginal, raw.conditional)
    }
}

fn check_simplex(v: &[f64], what: &str) -> Result<()> {
    if v.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return input(format!("{what} has a negative or non-finite entry"));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return input(format!("{what} sums to {s}, not 1"));
    }
    Ok(())
}

impl DiscreteDistribution {
    pub fn new(support: Vec<SupportPoint>, marginal: Vec<f64>, conditional: Vec<Vec<f64>>) -> Result<Self> {
        let k = support.len();
        if k == 0 {
            return input("empty support");
        }
        if marginal.len() != k || conditional.len() != k {
            return input(format!(
                "support has {k} points but marginal has {} and conditional has {}",
                marginal.len(),
                conditional.len()
            ));
        }
        check_simplex(&marginal, "marginal")?;
        let n = conditional[0].len();
        if n < 2 {
            return input("need at least two labels");
        }
        for (i, c) in conditional.iter().enumerate() {
            if c.len() != n {
                return input(format!("conditional {i} has {} labels, expected {n}", c.len()));
            }
            check_simplex(c, &format!("conditional {i}"))?;
        }
        let mut ids: Vec<i64> = support.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return input("duplicate support id");
        }
        let d = support[0].features.len();
        if support.iter().any(|s| s.features.len() != d) {
            return input("feature vectors differ in dimension");
        }
        if support.iter().any(|s| s.features.iter().any(|f| !f.is_finite())) {
            return input("non-finite feature value");
        }
        Ok(DiscreteDistribution { support, marginal, conditional })
    }

    /// Binary distribution with ids `0..k` and no features.
    pub fn binary(etas: &[f64], marginal: &[f64]) -> Result<Self> {
        Self::binary_with_features(etas, marginal, vec![Vec::new(); etas.len()])
    }

    pub fn binary_with_features(etas: &[f64], marginal: &[f64], features: Vec<Vec<f64>>) -> Result<Self> {
        if features.len() != etas.len() {
            return input("features and etas differ in length");
        }
        let support =
            features.into_iter().enumerate().map(|(i, f)| SupportPoint { id: i as i64, features: f }).collect();
        let conditional = etas.iter().map(|&e| vec![e, 1.0 - e]).collect();
        Self::new(support, marginal.to_vec(), conditional)
    }

    /// Multi-class distribution with ids `0..k` and no features.
    pub fn multiclass(conditional: Vec<Vec<f64>>, marginal: &[f64]) -> Result<Self> {
        let support = (0..conditional.len()).map(|i| SupportPoint { id: i as i64, features: Vec::new() }).collect();
        Self::new(support, marginal.to_vec(), conditional)
    }

    /// Single support point carrying all the mass.
    pub fn point_mass(conditional: Vec<f64>) -> Result<Self> {
        Self::multiclass(vec![conditional], &[1.0])
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn label_count(&self) -> usize {
        self.conditional[0].len()
    }

    pub fn is_binary(&self) -> bool {
        self.label_count() == 2
    }

    pub fn feature_dim(&self) -> usize {
        self.support[0].features.len()
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.support
    }

    pub fn marginal(&self) -> &[f64] {
        &self.marginal
    }

    pub fn conditional(&self, i: usize) -> &[f64] {
        &self.conditional[i]
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.support[i].features
    }

    pub fn id(&self, i: usize) -> i64 {
        self.support[i].id
    }

    /// η(x) = P(Y = +1 | x) for binary distributions.
    pub fn eta(&self, i: usize) -> f64 {
        self.conditional[i][0]
    }

    pub fn index_of(&self, id: i64) -> Result<usize> {
        self.support.iter().position(|s| s.id == id).ok_or_else(|| Error::Input(format!("unknown support id {id}")))
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return input(format!("support index {i} out of range (len {})", self.len()));
        }
        Ok(())
    }

    /// Bayes label at point `i`: argmax of p(·|x), ties to the highest index.
    pub fn bayes_label(&self, i: usize) -> usize {
        argmax_high(&self.conditional[i])
    }

    /// Top-two probability gap at point index `i`; `|2η − 1|` for binary.
    pub fn margin_at(&self, i: usize) -> f64 {
        if self.is_binary() {
            (2.0 * self.conditional[i][0] - 1.0).abs()
        } else {
            top_two_gap(&self.conditional[i])
        }
    }

    /// Expectation of `f(i)` under the marginal.
    pub fn expect<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.marginal.iter().enumerate().map(|(i, m)| m * f(i)).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Index of the largest entry; ties go to the highest index.
pub fn argmax_high(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x >= v[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn top_two_gap(p: &[f64]) -> f64 {
    let top = argmax_high(p);
    let second = p.iter().enumerate().filter(|(i, _)| *i != top).map(|(_, x)| *x).fold(f64::NEG_INFINITY, f64::max);
    (p[top] - second).clamp(0.0, 1.0)
}

/// Margin γ(x) = P(y_max|x) − max_{y≠y_max} P(y|x) at the point with `id`.
pub fn margin_gamma(dist: &DiscreteDistribution, id: i64) -> Result<f64> {
    Ok(dist.margin_at(dist.index_of(id)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub alpha: f64,
    /// Envelope constant B. May be `inf` in floating point as α → 1; `c`
    /// is computed in log space and stays finite.
    pub b: f64,
    pub c: f64,
    pub gamma_floor: Option<f64>,
}

impl NoiseProfile {
    pub fn new(alpha: f64, b: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return input(format!("alpha {alpha} outside [0, 1)"));
        }
        if !(b > 0.0) {
            return input(format!("envelope constant {b} must be positive"));
        }
        let c = if alpha == 0.0 { 1.0 } else { ((1.0 - alpha) * b.ln() - alpha * alpha.ln()).exp() };
        Ok(NoiseProfile { alpha, b, c, gamma_floor: None })
    }
}

/// Smallest B with Pr[γ(X) ≤ t] ≤ B·t^{α/(1−α)} at every attained margin t.
pub fn fit_tsybakov_envelope(dist: &DiscreteDistribution, alpha: f64) -> Result<NoiseProfile> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return input(format!("alpha {alpha} outside (0, 1)"));
    }
    let mut pts: Vec<(f64, f64)> =
        (0..dist.len()).filter(|&i| dist.marginal[i] > 0.0).map(|i| (dist.margin_at(i), dist.marginal[i])).collect();
    if let Some((_, m)) = pts.iter().find(|(g, _)| *g <= 0.0) {
        return Err(Error::EnvelopeInfeasible(format!("mass {m} sits at zero margin")));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let expo = alpha / (1.0 - alpha);
    let mut cdf = 0.0;
    let mut ln_b = f64::NEG_INFINITY;
    let mut i = 0;
    while i < pts.len() {
        let t = pts[i].0;
        while i < pts.len() && pts[i].0 == t {
            cdf += pts[i].1;
            i += 1;
        }
        ln_b = ln_b.max(cdf.min(1.0).ln() - expo * t.ln());
    }
    let c = ((1.0 - alpha) * ln_b - alpha * alpha.ln()).exp();
    let floor = (0..dist.len()).map(|i| dist.margin_at(i)).fold(f64::INFINITY, f64::min);
    Ok(NoiseProfile { alpha, b: ln_b.exp(), c, gamma_floor: (floor > 0.0).then_some(floor) })
}

/// Noise constraints for [`sample_distribution`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConstraints {
    pub massart_floor: Option<f64>,
    /// Target (α, B) for the Tsybakov envelope.
    pub tsybakov: Option<(f64, f64)>,
    pub deterministic: bool,
    /// Symmetric Dirichlet concentration for the conditionals.
    pub concentration: f64,
    /// Dimension of uniform [0, 1) feature vectors (0 for none).
    pub feature_dim: usize,
}

impl Default for SampleConstraints {
    fn default() -> Self {
        SampleConstraints {
            massart_floor: None,
            tsybakov: None,
            deterministic: false,
            concentration: 1.0,
            feature_dim: 0,
        }
    }
}

/// Retry budget for the Tsybakov reshaping loop.
pub const SAMPLE_RETRIES: usize = 64;

pub(crate) fn dirichlet<R: Rng>(rng: &mut R, n: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let s: f64 = draws.iter().sum();
        if s > 0.0 && s.is_finite() {
            let mut p: Vec<f64> = draws.iter().map(|d| d / s).collect();
            renormalize(&mut p);
            return p;
        }
    }
}

/// Push the rounding residue of a probability vector onto its largest entry.
pub(crate) fn renormalize(p: &mut [f64]) {
    let s: f64 = p.iter().sum();
    let top = argmax_high(p);
    p[top] += 1.0 - s;
}

/// Mix `p` toward the one-hot vector of its top label by weight `lambda`.
/// The top label is preserved and the margin grows linearly in `lambda`.
pub(crate) fn sharpen(p: &[f64], lambda: f64) -> Vec<f64> {
    let top = argmax_high(p);
    let mut q: Vec<f64> = p.iter().map(|x| (1.0 - lambda) * x).collect();
    q[top] += lambda;
    renormalize(&mut q);
    q
}

fn enforce_floor(p: &[f64], floor: f64) -> Vec<f64> {
    let g = top_two_gap(p);
    if g >= floor {
        return p.to_vec();
    }
    let target = (floor + 1e-12).min(1.0);
    let lambda = ((target - g) / (1.0 - g)).clamp(0.0, 1.0);
    let q = sharpen(p, lambda);
    if top_two_gap(&q) >= floor {
        q
    } else {
        sharpen(p, 1.0)
    }
}

/// Seeded random distribution with ids `0..n_points`.
pub fn sample_distribution(
    seed: u64,
    n_points: usize,
    n_labels: usize,
    constraints: SampleConstraints,
) -> Result<DiscreteDistribution> {
    if n_points == 0 || n_labels < 2 {
        return input("need n_points >= 1 and n_labels >= 2");
    }
    if !(constraints.concentration > 0.0) {
        return input("concentration must be positive");
    }
    if let Some(f) = constraints.massart_floor {
        if !(0.0..=1.0).contains(&f) {
            return input(format!("massart floor {f} outside [0, 1]"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let marginal = dirichlet(&mut rng, n_points, 1.0);
    let mut conditional: Vec<Vec<f64>> = (0..n_points)
        .map(|_| {
            if constraints.deterministic {
                let mut p = vec![0.0; n_labels];
                p[rng.random_range(0..n_labels)] = 1.0;
                p
            } else {
                dirichlet(&mut rng, n_labels, constraints.concentration)
            }
        })
        .collect();
    if let Some(f) = constraints.massart_floor {
        conditional = conditional.iter().map(|p| enforce_floor(p, f)).collect();
    }
    let support = (0..n_points)
        .map(|i| SupportPoint {
            id: i as i64,
            features: (0..constraints.feature_dim).map(|_| rng.random::<f64>()).collect(),
        })
        .collect();
    let mut dist = DiscreteDistribution::new(support, marginal, conditional)?;

    if let Some((alpha, b)) = constraints.tsybakov {
        let mut lambda = 0.0;
        for attempt in 0..SAMPLE_RETRIES {
            let candidate = DiscreteDistribution {
                conditional: dist.conditional.iter().map(|p| sharpen(p, lambda)).collect(),
                ..dist.clone()
            };
            if let Ok(fit) = fit_tsybakov_envelope(&candidate, alpha) {
                if fit.b <= b {
                    dist = candidate;
                    return Ok(dist);
                }
            }
            lambda = if attempt == 0 { 1.0 / 64.0 } else { (lambda * 1.5).min(1.0) };
        }
        return Err(Error::Generation(format!(
            "no reshaping within {SAMPLE_RETRIES} retries reached B <= {b} at alpha {alpha}"
        )));
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_examples() {
        let d = DiscreteDistribution::multiclass(vec![vec![0.5, 0.3, 0.2], vec![1.0, 0.0, 0.0]], &[0.5, 0.5]).unwrap();
        assert!((margin_gamma(&d, 0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(margin_gamma(&d, 1).unwrap(), 1.0);
        assert!(margin_gamma(&d, 7).is_err());
        let b = DiscreteDistribution::binary(&[0.5], &[1.0]).unwrap();
        assert_eq!(margin_gamma(&b, 0).unwrap(), 0.0);
    }

    #[test]
    fn envelope_two_point_example() {
        // γ = 0.4 and 0.8 with equal mass, α = ½ so the exponent is 1
        let d = DiscreteDistribution::binary(&[0.7, 0.9], &[0.5, 0.5]).unwrap();
        let fit = fit_tsybakov_envelope(&d, 0.5).unwrap();
        assert!((fit.b - 1.25).abs() < 1e-12, "{}", fit.b);
        let c = 1.25f64.sqrt() / 0.5f64.sqrt();
        assert!((fit.c - c).abs() < 1e-12);
    }

    #[test]
    fn envelope_rejects_zero_margin_mass() {
        let d = DiscreteDistribution::binary(&[0.5], &[1.0]).unwrap();
        assert!(matches!(fit_tsybakov_envelope(&d, 0.5), Err(Error::EnvelopeInfeasible(_))));
    }

    #[test]
    fn massart_floor_recorded() {
        let d = DiscreteDistribution::binary(&[0.65, 0.1, 0.95], &[0.2, 0.3, 0.5]).unwrap();
        let fit = fit_tsybakov_envelope(&d, 0.999).unwrap();
        assert!((fit.gamma_floor.unwrap() - 0.3).abs() < 1e-12);
        assert!(fit.c.is_finite());
    }

    #[test]
    fn sampler_contracts() {
        let d = sample_distribution(1, 5, 3, SampleConstraints::default()).unwrap();
        assert_eq!(d.len(), 5);
        assert_eq!(d.label_count(), 3);
        let again = sample_distribution(1, 5, 3, SampleConstraints::default()).unwrap();
        assert_eq!(d, again);

        let m = sample_distribution(2, 30, 4, SampleConstraints { massart_floor: Some(0.4), ..Default::default() })
            .unwrap();
        assert!((0..m.len()).all(|i| m.margin_at(i) >= 0.4));

        let det =
            sample_distribution(3, 10, 3, SampleConstraints { deterministic: true, ..Default::default() }).unwrap();
        assert!((0..det.len()).all(|i| det.conditional(i).iter().filter(|p| **p == 1.0).count() == 1));
    }

    #[test]
    fn sampler_reaches_tsybakov_target() {
        let d = sample_distribution(4, 12, 2, SampleConstraints { tsybakov: Some((0.5, 3.0)), ..Default::default() })
            .unwrap();
        assert!(fit_tsybakov_envelope(&d, 0.5).unwrap().b <= 3.0);
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let d =
            DiscreteDistribution::binary_with_features(&[0.25, 0.5], &[0.5, 0.5], vec![vec![1.0], vec![2.0]]).unwrap();
        let s = d.to_json().unwrap();
        for key in ["\"support\"", "\"marginal\"", "\"conditional\"", "\"id\"", "\"features\""] {
            assert!(s.contains(key));
        }
        assert_eq!(DiscreteDistribution::from_json(&s).unwrap(), d);
        assert!(DiscreteDistribution::from_json(r#"{"support":[{"id":0}],"marginal":[0.9],"conditional":[[1,0]]}"#)
            .is_err());
    }
}
