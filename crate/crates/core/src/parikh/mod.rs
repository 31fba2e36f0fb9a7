//! Letter frequencies of inflation words.
//!
//! The achievable Parikh vectors of `ϑ^k(b)` satisfy
//! `P_k(b) = ∪_{s ∈ ϑ(b)} P_{k−1}(s₁) + … + P_{k−1}(s_ℓ)` (Minkowski sums).
//! Only extreme points are kept after each step, which loses nothing for
//! the hull or for maximising linear functionals over it.

mod lp;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::language::subshift_language;
use crate::structure::{constant_length, is_compatible, is_primitive};
use crate::substitution::RandomSubstitution;
use crate::word::Letter;

/// Letters of `L¹(X_ϑ)`, found with two-sided extendability `margin`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubshiftLetters {
    #[serde(serialize_with = "tokens")]
    pub letters: Vec<(Letter, String)>,
    pub margin: usize,
}

fn tokens<S: Serializer>(v: &[(Letter, String)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(_, t)| t))
}

impl SubshiftLetters {
    pub fn letters(&self) -> Vec<Letter> {
        self.letters.iter().map(|(a, _)| *a).collect()
    }

    pub fn contains(&self, a: Letter) -> bool {
        self.letters.iter().any(|(x, _)| *x == a)
    }
}

pub fn letters_in_subshift(
    sub: &RandomSubstitution,
    margin: usize,
    budget: &Budget,
) -> Result<SubshiftLetters> {
    let words = subshift_language(sub, 1, margin, budget)?;
    let letters = words
        .iter()
        .map(|w| {
            let a = Letter(w.as_slice()[0]);
            (a, sub.token(a).to_string())
        })
        .collect();
    Ok(SubshiftLetters { letters, margin })
}

/// Margin used for pooling when the caller does not pick one.
pub const DEFAULT_LETTER_MARGIN: usize = 8;

/// Integer points, all with coordinate sum `ℓ^k`.
pub type HullPoints = Vec<Vec<BigUint>>;

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyHull {
    pub k: usize,
    /// Common denominator `ℓ^k`.
    pub scale: BigUint,
    /// Extreme points of `P_k(b)` for every letter `b`.
    pub per_letter: Vec<HullPoints>,
    /// Extreme points of the union over the source letters.
    pub pooled: HullPoints,
    pub sources: Vec<Letter>,
}

impl FrequencyHull {
    /// Stored point as floating frequencies.
    pub fn frequencies(&self, p: &[BigUint]) -> Vec<f64> {
        p.iter().map(|x| ratio_f64(x, &self.scale)).collect()
    }

    /// Largest `a`-frequency over the pooled hull, as `(numerator, scale)`.
    pub fn max_frequency(&self, a: Letter) -> BigUint {
        self.pooled
            .iter()
            .map(|p| p[a.index()].clone())
            .max()
            .unwrap_or_default()
    }

    pub fn to_json(&self, sub: &RandomSubstitution) -> serde_json::Value {
        let fmt = |pts: &HullPoints| -> serde_json::Value {
            pts.iter()
                .map(|p| p.iter().map(|x| rational_string(x, &self.scale)).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into()
        };
        let mut per = serde_json::Map::new();
        for a in sub.letters() {
            per.insert(sub.token(a).to_string(), fmt(&self.per_letter[a.index()]));
        }
        serde_json::json!({
            "k": self.k,
            "scale": self.scale.to_string(),
            "sources": self.sources.iter().map(|&a| sub.token(a)).collect::<Vec<_>>(),
            "per_letter": per,
            "pooled": fmt(&self.pooled),
        })
    }
}

fn ratio_f64(x: &BigUint, d: &BigUint) -> f64 {
    match (x.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if b.is_finite() => a / b,
        _ => crate::entropy::ln_biguint(x).exp() / crate::entropy::ln_biguint(d).exp(),
    }
}

/// Reduced fraction `x/d` as `"num/den"` (or `"num"` when integral).
pub fn rational_string(x: &BigUint, d: &BigUint) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let g = x.gcd(d);
    let (n, m) = (x / &g, d / &g);
    if m == BigUint::from(1u32) {
        n.to_string()
    } else {
        format!("{n}/{m}")
    }
}

fn prune(pts: HullPoints) -> HullPoints {
    let signed: Vec<Vec<BigInt>> = pts
        .into_iter()
        .map(|p| p.into_iter().map(BigInt::from).collect())
        .collect();
    lp::extreme_points(signed)
        .into_iter()
        .map(|p| p.into_iter().map(|x| x.to_biguint().expect("nonnegative")).collect())
        .collect()
}

fn minkowski(a: &HullPoints, b: &HullPoints) -> HullPoints {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            out.push(p.iter().zip(q).map(|(x, y)| x + y).collect());
        }
    }
    out
}

/// Hulls for depths `1..=k_max`, pooled over `sources`.
pub fn parikh_hull_from(
    sub: &RandomSubstitution,
    k_max: usize,
    sources: &[Letter],
    budget: &Budget,
) -> Result<Vec<FrequencyHull>> {
    let ell = constant_length(sub)
        .ok_or_else(|| Error::pre("frequency hulls need constant length"))?;
    let d = sub.size();
    let mut current: Vec<HullPoints> = (0..d)
        .map(|a| vec![(0..d).map(|x| BigUint::from(u8::from(x == a))).collect()])
        .collect();
    let mut scale = BigUint::from(1u32);
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        scale *= ell;
        let next: Result<Vec<HullPoints>> = sub
            .letters()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&b| {
                let mut union: HullPoints = Vec::new();
                for s in sub.rules(b) {
                    let mut acc: HullPoints = current[s.as_slice()[0] as usize].clone();
                    for x in &s.as_slice()[1..] {
                        let part = &current[*x as usize];
                        budget.check("frequency hull candidates", acc.len() * part.len(), 0)?;
                        acc = prune(minkowski(&acc, part));
                    }
                    union.extend(acc);
                }
                Ok(prune(union))
            })
            .collect();
        current = next?;
        let pooled = prune(
            sources
                .iter()
                .flat_map(|a| current[a.index()].iter().cloned())
                .collect(),
        );
        out.push(FrequencyHull {
            k,
            scale: scale.clone(),
            per_letter: current.clone(),
            pooled,
            sources: sources.to_vec(),
        });
    }
    Ok(out)
}

/// Hulls for depths `1..=k_max`, pooled over the letters of the subshift
/// language found with [`DEFAULT_LETTER_MARGIN`].
pub fn parikh_hull(
    sub: &RandomSubstitution,
    k_max: usize,
    budget: &Budget,
) -> Result<Vec<FrequencyHull>> {
    let sources = letters_in_subshift(sub, DEFAULT_LETTER_MARGIN, budget)?.letters();
    parikh_hull_from(sub, k_max, &sources, budget)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyBounds {
    pub k: usize,
    /// `max_ν (1/ℓ) Σ_a ν_a ln #ϑ(a)` over pooled vertices; an estimate.
    pub lower_estimate: f64,
    /// `(1/(ℓ−1)) Σ_a η_a ln #ϑ(a)` at the maximising vertex η.
    pub upper_asymptotic_form: f64,
    /// Maximising vertex as reduced fractions.
    pub vertex: Vec<String>,
    /// Lower estimate at every depth up to `k`, for judging convergence.
    pub lower_by_depth: Vec<f64>,
    pub lower_label: &'static str,
    pub upper_label: &'static str,
}

fn objective(sub: &RandomSubstitution) -> Vec<f64> {
    sub.letters().map(|a| (sub.rules(a).len() as f64).ln()).collect()
}

fn best_vertex(hull: &FrequencyHull, w: &[f64]) -> (f64, usize) {
    hull.pooled
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let v: f64 = hull.frequencies(p).iter().zip(w).map(|(f, c)| f * c).sum();
            (v, i)
        })
        .fold((f64::NEG_INFINITY, 0), |acc, x| if x.0 > acc.0 { x } else { acc })
}

/// Frequency-based entropy estimates from the last hull in `hulls`.
pub fn prop45_bounds(sub: &RandomSubstitution, hulls: &[FrequencyHull]) -> Result<FrequencyBounds> {
    let ell = constant_length(sub)
        .filter(|&l| l >= 2)
        .ok_or_else(|| Error::pre("frequency bounds need constant length at least 2"))?;
    let last = hulls
        .last()
        .ok_or_else(|| Error::InsufficientData("no hull depths".into()))?;
    let w = objective(sub);
    let lower_by_depth: Vec<f64> = hulls
        .iter()
        .map(|h| best_vertex(h, &w).0 / ell as f64)
        .collect();
    let (val, idx) = best_vertex(last, &w);
    let vertex = &last.pooled[idx];
    Ok(FrequencyBounds {
        k: last.k,
        lower_estimate: val / ell as f64,
        upper_asymptotic_form: val / (ell - 1) as f64,
        vertex: vertex.iter().map(|x| rational_string(x, &last.scale)).collect(),
        lower_by_depth,
        lower_label: "estimate",
        upper_label: "asymptotic-form",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Positivity {
    Positive,
    Zero,
    Inconclusive,
}

impl Positivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Positivity::Positive => "positive",
            Positivity::Zero => "zero",
            Positivity::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyEvidence {
    pub letter: String,
    pub realisations: usize,
    /// Largest achievable frequency per depth, as reduced fractions.
    pub max_frequency: Vec<String>,
    pub max_frequency_value: Vec<f64>,
    /// Ratios of consecutive maxima over the last three depths.
    pub recent_ratios: Vec<f64>,
    pub persistent: bool,
    pub decaying: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub verdict: Positivity,
    pub threshold: f64,
    pub decay_ratio: f64,
    pub depths: usize,
    pub evidence: Vec<FrequencyEvidence>,
    pub note: String,
}

/// Three-valued verdict on entropy from letter-frequency behaviour.
pub fn positivity_report(
    sub: &RandomSubstitution,
    hulls: &[FrequencyHull],
    threshold: f64,
) -> Result<PositivityReport> {
    let ell = constant_length(sub)
        .ok_or_else(|| Error::pre("positivity report needs constant length"))?;
    let decay_ratio = 1.0 - 1.0 / (2.0 * ell as f64);
    let branching: Vec<Letter> = sub.letters().filter(|&a| sub.rules(a).len() >= 2).collect();
    let mut report = PositivityReport {
        verdict: Positivity::Inconclusive,
        threshold,
        decay_ratio,
        depths: hulls.len(),
        evidence: Vec::new(),
        note: String::new(),
    };
    if branching.is_empty() {
        report.verdict = Positivity::Zero;
        report.note = "no letter has two or more realisations".into();
        return Ok(report);
    }
    if hulls.len() < 3 {
        report.note = "fewer than three depths".into();
        return Ok(report);
    }
    for &a in &branching {
        let nums: Vec<BigUint> = hulls.iter().map(|h| h.max_frequency(a)).collect();
        let vals: Vec<f64> = nums
            .iter()
            .zip(hulls)
            .map(|(x, h)| ratio_f64(x, &h.scale))
            .collect();
        let tail = &vals[vals.len() - 3..];
        let recent_ratios: Vec<f64> = tail
            .windows(2)
            .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] })
            .collect();
        let persistent = tail.windows(2).all(|w| w[1] >= w[0]) && tail.iter().all(|&f| f >= threshold);
        let decaying = *tail.last().unwrap() == 0.0 || recent_ratios.iter().all(|&r| r <= decay_ratio);
        report.evidence.push(FrequencyEvidence {
            letter: sub.token(a).to_string(),
            realisations: sub.rules(a).len(),
            max_frequency: nums
                .iter()
                .zip(hulls)
                .map(|(x, h)| rational_string(x, &h.scale))
                .collect(),
            max_frequency_value: vals,
            recent_ratios,
            persistent,
            decaying,
        });
    }
    if let Some(e) = report.evidence.iter().find(|e| e.persistent) {
        report.verdict = Positivity::Positive;
        report.note = format!("frequency of `{}` stays at or above the threshold", e.letter);
    } else if report.evidence.iter().all(|e| e.decaying) {
        report.verdict = Positivity::Zero;
        report.note = "every branching letter has geometrically decaying frequency".into();
    } else {
        report.note = "frequencies neither persist nor decay geometrically".into();
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronData {
    pub lambda: f64,
    pub frequencies: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

pub const PERRON_TOLERANCE: f64 = 1e-10;
pub const PERRON_MAX_ITERATIONS: usize = 1_000_000;

/// Perron eigenvalue and normalised right eigenvector of the substitution
/// matrix, by power iteration on `M + I`.
pub fn perron_data(sub: &RandomSubstitution) -> Result<PerronData> {
    if is_compatible(sub).is_err() {
        return Err(Error::pre("Perron data needs a compatible substitution"));
    }
    if !is_primitive(sub).primitive {
        return Err(Error::pre("Perron data needs a primitive substitution"));
    }
    let m = sub.substitution_matrix().expect("compatible");
    let d = m.len();
    let apply = |v: &[f64]| -> Vec<f64> {
        (0..d)
            .map(|i| (0..d).map(|j| m[i][j] as f64 * v[j]).sum())
            .collect()
    };
    let mut r = vec![1.0 / d as f64; d];
    for it in 1..=PERRON_MAX_ITERATIONS {
        let mr = apply(&r);
        let mut next: Vec<f64> = mr.iter().zip(&r).map(|(a, b)| a + b).collect();
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= s);
        let m_next = apply(&next);
        let lambda = m_next.iter().sum::<f64>();
        let residual = m_next
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max);
        r = next;
        if residual < PERRON_TOLERANCE {
            return Ok(PerronData {
                lambda,
                frequencies: r,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::NonConvergence(PERRON_MAX_ITERATIONS))
}
