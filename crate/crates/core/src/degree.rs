//! Degree distributions and degree sequences.
//!
//! [`DegreeDistribution`] is a truncated, renormalized pmf over `k_min..=Δ`.
//! [`sample_sequence`] draws a realizable [`DegreeSequence`] from it: i.i.d.
//! draws, a parity fix that redraws one uniformly chosen entry, a descending
//! sort and an Erdős–Gallai check, restarting from scratch on failure.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::bisect;
use crate::pgf::PowerSeries;

/// Largest tail mass a truncation may discard before renormalizing.
pub const TAIL_LIMIT: f64 = 1e-10;

/// Full restarts allowed in [`sample_sequence`] by default.
pub const DEFAULT_SEQUENCE_RESTARTS: usize = 1000;

/// Parity-fix redraws attempted before a restart.
const PARITY_REDRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "lowercase")]
pub enum Family {
    Constant {
        k: usize,
    },
    Poisson {
        lambda: f64,
    },
    /// `p_k ∝ e^{-α(k - k_min)}`, the discrete exponential.
    Geometric {
        alpha: f64,
    },
    /// `p_k ∝ k^{-γ}` on the truncated support.
    #[serde(rename = "powerlaw")]
    PowerLaw {
        gamma: f64,
    },
    Custom {
        pmf: Vec<f64>,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Constant { .. } => "constant",
            Family::Poisson { .. } => "poisson",
            Family::Geometric { .. } => "geometric",
            Family::PowerLaw { .. } => "powerlaw",
            Family::Custom { .. } => "custom",
        }
    }
}

/// Parameter families that can be tuned to a target mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Poisson,
    Geometric,
    #[serde(rename = "powerlaw")]
    PowerLaw,
}

impl FamilyKind {
    fn with_param(self, x: f64) -> Family {
        match self {
            FamilyKind::Poisson => Family::Poisson { lambda: x },
            FamilyKind::Geometric => Family::Geometric { alpha: x },
            FamilyKind::PowerLaw => Family::PowerLaw { gamma: x },
        }
    }
}

/// JSON form of a distribution:
/// `{"family": "...", "params": {...}, "delta": int, "k_min": int}`.
///
/// `bounded` marks Δ as part of the distribution's definition, which skips the
/// tail-mass check for families with unbounded support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
    pub delta: usize,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default)]
    pub bounded: bool,
}

fn default_k_min() -> usize {
    1
}

impl DistributionSpec {
    pub fn build(&self) -> Result<DegreeDistribution> {
        DegreeDistribution::build(self.family.clone(), self.delta, self.k_min, self.bounded)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    family: Family,
    delta: usize,
    k_min: usize,
    bounded: bool,
    pmf: PowerSeries<f64>,
    tail_mass: f64,
}

impl DegreeDistribution {
    /// Builds the family pmf on `k_min..=delta` and renormalizes it.
    ///
    /// Poisson and geometric families fail with [`Error::TruncationTail`] when
    /// more than [`TAIL_LIMIT`] of their mass lies above `delta`, unless
    /// `bounded` is set.
    pub fn build(family: Family, delta: usize, k_min: usize, bounded: bool) -> Result<Self> {
        if k_min > 1 {
            return Err(Error::param(format!("k_min must be 0 or 1, got {k_min}")));
        }
        if delta < k_min {
            return Err(Error::param(format!("delta {delta} below k_min {k_min}")));
        }
        let (weights, tail_mass) = match &family {
            Family::Constant { k } => {
                if *k < 1 {
                    return Err(Error::param("constant degree must be at least 1"));
                }
                if *k > delta {
                    return Err(Error::param(format!("constant degree {k} exceeds delta {delta}")));
                }
                let mut w = vec![0.0; delta + 1];
                w[*k] = 1.0;
                (w, 0.0)
            }
            Family::Poisson { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::param(format!("poisson lambda must be > 0, got {lambda}")));
                }
                poisson_weights(*lambda, delta, k_min)
            }
            Family::Geometric { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return Err(Error::param(format!("geometric alpha must be > 0, got {alpha}")));
                }
                geometric_weights(*alpha, delta, k_min)
            }
            Family::PowerLaw { gamma } => {
                if !(gamma.is_finite() && *gamma > 1.0) {
                    return Err(Error::param(format!("powerlaw gamma must be > 1, got {gamma}")));
                }
                if k_min == 0 {
                    return Err(Error::param("powerlaw needs k_min = 1"));
                }
                let mut w = vec![0.0; delta + 1];
                for (k, x) in w.iter_mut().enumerate().skip(1) {
                    *x = (k as f64).powf(-gamma);
                }
                (w, 0.0)
            }
            Family::Custom { pmf } => {
                if pmf.len() > delta + 1 {
                    return Err(Error::param(format!(
                        "custom pmf has {} entries but delta is {delta}",
                        pmf.len()
                    )));
                }
                if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err(Error::param("custom pmf entries must be finite and nonnegative"));
                }
                if pmf.iter().take(k_min).any(|p| *p > 0.0) {
                    return Err(Error::param(format!(
                        "custom pmf has mass below k_min = {k_min}; use k_min = 0 to admit isolated vertices"
                    )));
                }
                let mut w = pmf.clone();
                w.resize(delta + 1, 0.0);
                (w, 0.0)
            }
        };
        let needs_tail_check = matches!(family, Family::Poisson { .. } | Family::Geometric { .. });
        if needs_tail_check && !bounded && tail_mass > TAIL_LIMIT {
            return Err(Error::TruncationTail {
                delta,
                tail: tail_mass,
                suggested: suggest_delta(&family, k_min),
            });
        }
        let z: f64 = weights.iter().sum();
        if !(z > 0.0) {
            return Err(Error::param("distribution has no mass on its support"));
        }
        let pmf = PowerSeries::new(weights.iter().map(|w| w / z).collect())?;
        if pmf.mean() <= 0.0 {
            return Err(Error::ZeroMeanDegree);
        }
        Ok(Self {
            family,
            delta,
            k_min,
            bounded,
            pmf,
            tail_mass,
        })
    }

    /// Tunes the family parameter by bisection so the truncated mean equals
    /// `mean` to within 1e-10. The truncation is treated as bounded.
    pub fn with_mean(kind: FamilyKind, mean: f64, delta: usize, k_min: usize) -> Result<Self> {
        let build = |x: f64| Self::build(kind.with_param(x), delta, k_min, true);
        let mean_at = |x: f64| build(x).map(|d| d.mean()).unwrap_or(f64::NAN);
        // mean is increasing in lambda and decreasing in alpha, gamma
        let (lo, hi, increasing) = match kind {
            FamilyKind::Poisson => (1e-6, delta as f64 * 4.0, true),
            FamilyKind::Geometric => (1e-8, 50.0, false),
            FamilyKind::PowerLaw => (1.0 + 1e-9, 60.0, false),
        };
        let (m_lo, m_hi) = (mean_at(lo), mean_at(hi));
        let (min, max) = if increasing { (m_lo, m_hi) } else { (m_hi, m_lo) };
        if !(mean > min && mean < max) {
            return Err(Error::param(format!(
                "{kind:?} cannot reach mean {mean} with delta {delta} (range {min:.4}..{max:.4})"
            )));
        }
        let sign = if increasing { 1.0 } else { -1.0 };
        let x = bisect(lo, hi, 1e-15, |x| sign * (mean - mean_at(x)));
        build(x)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn pmf(&self) -> &PowerSeries<f64> {
        &self.pmf
    }

    /// Mass above Δ discarded before renormalizing (0 for families defined on
    /// the truncated support).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn p(&self, k: usize) -> f64 {
        self.pmf.coeff(k)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.mean()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let second: f64 = self
            .pmf
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, p)| (k * k) as f64 * p)
            .sum();
        second - m * m
    }

    pub fn spec(&self) -> DistributionSpec {
        DistributionSpec {
            family: self.family.clone(),
            delta: self.delta,
            k_min: self.k_min,
            bounded: self.bounded,
        }
    }
}

fn poisson_weights(lambda: f64, delta: usize, k_min: usize) -> (Vec<f64>, f64) {
    // log-space terms avoid overflow of λ^k / k! for large Δ
    let ln_lambda = lambda.ln();
    let mut w = vec![0.0; delta + 1];
    let mut ln_fact = 0.0;
    for (k, x) in w.iter_mut().enumerate() {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        if k >= k_min {
            *x = (-lambda + k as f64 * ln_lambda - ln_fact).exp();
        }
    }
    let support = if k_min == 0 { 1.0 } else { -(-lambda).exp_m1() };
    let mut tail = 0.0;
    let mut k = delta;
    loop {
        k += 1;
        ln_fact += (k as f64).ln();
        let t = (-lambda + k as f64 * ln_lambda - ln_fact).exp();
        tail += t;
        if k as f64 > lambda && (t <= tail * 1e-17 || t < 1e-300) {
            break;
        }
    }
    (w, tail / support)
}

fn geometric_weights(alpha: f64, delta: usize, k_min: usize) -> (Vec<f64>, f64) {
    let ratio = (-alpha).exp();
    let mut w = vec![0.0; delta + 1];
    for (k, x) in w.iter_mut().enumerate().skip(k_min) {
        *x = (1.0 - ratio) * (-alpha * (k - k_min) as f64).exp();
    }
    // Σ_{k > Δ} of the shifted geometric
    let tail = (-alpha * (delta + 1 - k_min) as f64).exp();
    (w, tail)
}

fn suggest_delta(family: &Family, k_min: usize) -> usize {
    let mut delta = k_min.max(1);
    loop {
        let tail = match family {
            Family::Poisson { lambda } => poisson_weights(*lambda, delta, k_min).1,
            Family::Geometric { alpha } => geometric_weights(*alpha, delta, k_min).1,
            _ => 0.0,
        };
        if tail <= TAIL_LIMIT || delta > 1 << 20 {
            return delta;
        }
        delta = (delta as f64 * 1.25).ceil() as usize;
    }
}

/// Molloy–Reed parameter `Λ = Σ k(k−2) p_k`.
pub fn molloy_reed_lambda(dist: &DegreeDistribution) -> f64 {
    pmf_lambda(dist.pmf().coeffs())
}

pub(crate) fn pmf_lambda(pmf: &[f64]) -> f64 {
    pmf.iter()
        .enumerate()
        .map(|(k, p)| (k as f64) * (k as f64 - 2.0) * p)
        .sum()
}

/// Giant-component fraction Θ from the Molloy–Reed construction: ψ is the
/// smallest positive root of
/// `f(α) = ⟨K⟩ − 2α − Σ k p_k (1 − 2α/⟨K⟩)^{k/2}` and
/// `Θ = 1 − Σ p_k (1 − 2ψ/⟨K⟩)^{k/2}`. Θ = 0 when Λ ≤ 0.
///
/// This route works directly on the pmf and does not use the generating
/// function solvers.
pub fn molloy_reed_giant_fraction(pmf: &[f64]) -> f64 {
    if pmf_lambda(pmf) <= 0.0 {
        return 0.0;
    }
    let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let half = mean / 2.0;
    let base = |alpha: f64| (1.0 - 2.0 * alpha / mean).max(0.0);
    let f = |alpha: f64| {
        let b = base(alpha);
        let s: f64 = pmf
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, p)| k as f64 * p * b.powf(k as f64 / 2.0))
            .sum();
        mean - 2.0 * alpha - s
    };
    // f > 0 on (0, ψ) and f < 0 on (ψ, ⟨K⟩/2) when p_1 > 0; scan for a negative
    // sample, densely near both ends
    let mut grid: Vec<f64> = (1..4000).map(|j| j as f64 / 4000.0).collect();
    grid.extend((1..=60).map(|j| 0.5f64.powi(j) / 4000.0));
    grid.extend((1..=60).map(|j| 1.0 - 0.5f64.powi(j) / 4000.0));
    grid.retain(|x| *x > 0.0 && *x < 1.0);
    grid.sort_by(f64::total_cmp);
    // near α = 0 the difference is pure cancellation, so signs below this
    // floor are noise
    let floor = 1e-13 * mean;
    let mut lo = None;
    let mut hi = None;
    for &x in &grid {
        let a = x * half;
        let v = f(a);
        if v > floor {
            lo = Some(a);
        } else if v < -floor && lo.is_some() {
            hi = Some(a);
            break;
        }
    }
    let psi = match (lo, hi) {
        (Some(lo), Some(hi)) => bisect(lo, hi, 1e-15 * half, f),
        _ => half,
    };
    let b = base(psi);
    1.0 - pmf
        .iter()
        .enumerate()
        .map(|(k, p)| p * b.powf(k as f64 / 2.0))
        .sum::<f64>()
}

/// Erdős–Gallai test: even total degree and, for the sequence sorted in
/// descending order, `Σ_{i≤k} d_i ≤ k(k−1) + Σ_{i>k} min(k, d_i)` for every k.
pub fn erdos_gallai(seq: &[usize]) -> bool {
    let n = seq.len();
    let total: usize = seq.iter().sum();
    if !total.is_multiple_of(2) {
        return false;
    }
    if n == 0 {
        return true;
    }
    let mut d = seq.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    if d[0] >= n {
        return false;
    }
    // suffix[i] = Σ_{j ≥ i} d_j
    let mut suffix = vec![0usize; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }
    // p = number of entries ≥ k, nonincreasing in k
    let mut p = n;
    let mut lhs = 0usize;
    for k in 1..=n {
        lhs += d[k - 1];
        while p > 0 && d[p - 1] < k {
            p -= 1;
        }
        // entries with index ≥ k: those ≥ k contribute k, the rest themselves
        let start = p.max(k);
        let capped = k * p.saturating_sub(k);
        let rhs = k * (k - 1) + capped + suffix[start];
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// A realizable degree sequence; vertex `i` has degree `degrees()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DegreeSequence {
    degrees: Vec<usize>,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        let total: usize = degrees.iter().sum();
        if !total.is_multiple_of(2) {
            return Err(Error::NotRealizable(format!("total degree {total} is odd")));
        }
        if !erdos_gallai(&degrees) {
            return Err(Error::NotRealizable(
                "Erdős–Gallai inequality violated".to_string(),
            ));
        }
        Ok(Self { degrees })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Total degree M.
    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        if self.degrees.is_empty() {
            0.0
        } else {
            self.total() as f64 / self.len() as f64
        }
    }
}

impl TryFrom<Vec<usize>> for DegreeSequence {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DegreeSequence> for Vec<usize> {
    fn from(s: DegreeSequence) -> Self {
        s.degrees
    }
}

/// Draws a realizable degree sequence of length `n`, sorted descending.
pub fn sample_sequence<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    sample_sequence_with_budget(dist, n, rng, DEFAULT_SEQUENCE_RESTARTS)
}

pub fn sample_sequence_with_budget<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    rng: &mut R,
    restarts: usize,
) -> Result<DegreeSequence> {
    if n < 2 {
        return Err(Error::param(format!("sequence length must be at least 2, got {n}")));
    }
    let sampler = WeightedIndex::new(dist.pmf().coeffs())
        .map_err(|e| Error::param(format!("degree weights: {e}")))?;
    let mut parity_failures = 0usize;
    for _ in 0..restarts {
        let mut d: Vec<usize> = (0..n).map(|_| sampler.sample(rng)).collect();
        let mut total: usize = d.iter().sum();
        let mut redraws = 0;
        while !total.is_multiple_of(2) && redraws < PARITY_REDRAWS {
            let i = rng.gen_range(0..n);
            let fresh = sampler.sample(rng);
            total = total - d[i] + fresh;
            d[i] = fresh;
            redraws += 1;
        }
        if !total.is_multiple_of(2) {
            parity_failures += 1;
            continue;
        }
        d.sort_unstable_by(|a, b| b.cmp(a));
        if erdos_gallai(&d) {
            return Ok(DegreeSequence { degrees: d });
        }
    }
    Err(Error::BudgetExhausted {
        attempts: restarts,
        reason: format!(
            "no realizable sequence ({parity_failures} attempts failed the parity fix)"
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_distribution() {
        let d = DegreeDistribution::build(Family::Constant { k: 3 }, 3, 1, false).unwrap();
        assert_eq!(d.pmf().coeffs(), &[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.mean(), 3.0);
    }

    #[test]
    fn poisson_with_isolated_vertices() {
        let d = DegreeDistribution::build(Family::Poisson { lambda: 2.0 }, 60, 0, false).unwrap();
        assert!((d.p(0) - (-2f64).exp()).abs() < 1e-12);
        assert!((d.pmf().total() - 1.0).abs() < 1e-12);
        assert!((d.mean() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_mean_ten_needs_bounded_truncation() {
        let d = DegreeDistribution::with_mean(FamilyKind::Geometric, 10.0, 200, 1).unwrap();
        assert!((d.mean() - 10.0).abs() < 0.05);
        let Family::Geometric { alpha } = *d.family() else { panic!() };
        // strict truncation refuses: e^{-200α} ≈ 7e-10 of the mass lies above Δ
        let err = DegreeDistribution::build(Family::Geometric { alpha }, 200, 1, false).unwrap_err();
        match err {
            Error::TruncationTail { suggested, tail, .. } => {
                assert!(tail > TAIL_LIMIT);
                assert!(suggested > 200);
                let ok =
                    DegreeDistribution::build(Family::Geometric { alpha }, suggested, 1, false);
                assert!(ok.is_ok());
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn truncation_tail_error_on_small_delta() {
        let err = DegreeDistribution::build(Family::Poisson { lambda: 10.0 }, 15, 1, false)
            .unwrap_err();
        assert!(matches!(err, Error::TruncationTail { delta: 15, .. }));
    }

    #[test]
    fn invalid_parameters() {
        assert!(DegreeDistribution::build(Family::Poisson { lambda: -1.0 }, 10, 1, false).is_err());
        assert!(DegreeDistribution::build(Family::PowerLaw { gamma: 1.0 }, 10, 1, false).is_err());
        assert!(DegreeDistribution::build(Family::Constant { k: 0 }, 10, 1, false).is_err());
        assert!(DegreeDistribution::build(Family::Constant { k: 4 }, 3, 1, false).is_err());
        assert!(DegreeDistribution::build(Family::Custom { pmf: vec![1.0] }, 3, 0, false).is_err());
        assert!(DegreeDistribution::build(Family::Constant { k: 2 }, 3, 2, false).is_err());
    }

    #[test]
    fn powerlaw_normalizes_on_support() {
        let d = DegreeDistribution::build(Family::PowerLaw { gamma: 2.5 }, 200, 1, false).unwrap();
        assert!((d.pmf().total() - 1.0).abs() < 1e-12);
        assert_eq!(d.p(0), 0.0);
        let ratio = d.p(1) / d.p(2);
        assert!((ratio - 2f64.powf(2.5)).abs() < 1e-9);
    }

    #[test]
    fn spec_json_roundtrip_and_strictness() {
        let json = r#"{"family":"poisson","params":{"lambda":2.0},"delta":60,"k_min":0}"#;
        let spec: DistributionSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.family, Family::Poisson { lambda: 2.0 });
        assert_eq!(spec.k_min, 0);
        let back: DistributionSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"family":"poisson","params":{"lambda":2.0},"delta":60,"colour":1}"#;
        assert!(serde_json::from_str::<DistributionSpec>(bad).is_err());
    }

    #[test]
    fn erdos_gallai_examples() {
        assert!(erdos_gallai(&[2, 2, 2]));
        assert!(!erdos_gallai(&[3, 3, 1, 1]));
        assert!(erdos_gallai(&[1, 1]));
        assert!(!erdos_gallai(&[1, 1, 1]));
        assert!(!erdos_gallai(&[2, 0]));
        assert!(erdos_gallai(&[]));
        assert!(erdos_gallai(&[0, 0, 0]));
        assert!(!erdos_gallai(&[1, 3, 3, 3]));
        assert!(erdos_gallai(&[3, 3, 2, 2, 2]));
    }

    #[test]
    fn degree_sequence_rejects_unrealizable() {
        assert!(DegreeSequence::new(vec![3, 3, 1, 1]).is_err());
        assert!(DegreeSequence::new(vec![2, 1]).is_err());
        let s = DegreeSequence::new(vec![2, 2, 2]).unwrap();
        assert_eq!(s.total(), 6);
        assert_eq!(s.max_degree(), 2);
    }

    #[test]
    fn lambda_examples() {
        let c2 = DegreeDistribution::build(Family::Constant { k: 2 }, 2, 1, false).unwrap();
        assert_eq!(molloy_reed_lambda(&c2), 0.0);
        let c3 = DegreeDistribution::build(Family::Constant { k: 3 }, 3, 1, false).unwrap();
        assert_eq!(molloy_reed_lambda(&c3), 3.0);
        let crit =
            DegreeDistribution::build(Family::Custom { pmf: vec![0.0, 0.75, 0.0, 0.25] }, 3, 1, false)
                .unwrap();
        assert!(molloy_reed_lambda(&crit).abs() < 1e-15);
    }

    #[test]
    fn molloy_reed_theta_special_cases() {
        // p_1 = 0 gives Θ = 1
        assert!((molloy_reed_giant_fraction(&[0.0, 0.0, 0.0, 1.0]) - 1.0).abs() < 1e-12);
        // subcritical and critical give Θ = 0
        assert_eq!(molloy_reed_giant_fraction(&[0.0, 0.9, 0.0, 0.1]), 0.0);
        assert_eq!(molloy_reed_giant_fraction(&[0.0, 0.75, 0.0, 0.25]), 0.0);
        // p_1 = p_3 = 1/2: u = 1/3 solves u = (1 + 3u²)/4, Θ = 1 - (u + u³)/2
        let u = 1.0 / 3.0;
        let want = 1.0 - 0.5 * (u + u * u * u);
        assert!((molloy_reed_giant_fraction(&[0.0, 0.5, 0.0, 0.5]) - want).abs() < 1e-12);
        // small p_1: cancellation near α = 0 must not pass for a root
        let pmf = [0.3008652440078195, 0.01653980328400168, 0.5601920327993939, 0.12240291990878492];
        assert!((molloy_reed_giant_fraction(&pmf) - 0.6972420800882162).abs() < 1e-9);
    }

    #[test]
    fn sample_constant_two() {
        let d = DegreeDistribution::build(Family::Constant { k: 2 }, 2, 1, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let s = sample_sequence(&d, 5, &mut rng).unwrap();
            assert_eq!(s.degrees(), &[2, 2, 2, 2, 2]);
        }
    }

    #[test]
    fn sample_constant_three_odd_length_exhausts_budget() {
        let d = DegreeDistribution::build(Family::Constant { k: 3 }, 3, 1, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_sequence(&d, 5, &mut rng).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted { attempts: 1000, .. }));
    }

    #[test]
    fn sample_requires_two_vertices() {
        let d = DegreeDistribution::build(Family::Constant { k: 1 }, 1, 1, false).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_sequence(&d, 1, &mut rng).is_err());
    }

    #[test]
    fn sample_poisson_mean_within_three_standard_errors() {
        let d = DegreeDistribution::build(Family::Poisson { lambda: 5.0 }, 30, 1, false).unwrap();
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let s = sample_sequence(&d, n, &mut rng).unwrap();
        assert!(s.degrees().windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(s.total() % 2, 0);
        let se = d.variance().sqrt() / (n as f64).sqrt();
        assert!((s.mean() - d.mean()).abs() < 3.0 * se, "{} vs {}", s.mean(), d.mean());
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = DegreeDistribution::build(Family::Poisson { lambda: 3.0 }, 30, 1, false).unwrap();
        let a = sample_sequence(&d, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_sequence(&d, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
