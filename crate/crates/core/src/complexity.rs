//! Growth of the complexity function: a family with polynomial complexity
//! of prescribed exponent, exponent fitting, and intermediate growth.

use num_bigint::BigUint;
use serde::Serialize;

use crate::budget::Budget;
use crate::entropy::{counts_recurrence, ln_biguint, CountTable};
use crate::error::{Error, Result};
use crate::language::ComplexityTable;
use crate::parikh::{parikh_hull_from, positivity_report, FrequencyEvidence};
use crate::structure::constant_length;
use crate::substitution::RandomSubstitution;
use crate::word::Letter;

/// Length `ℓ` and a set of permutations of the first `ℓ` letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyParams {
    pub ell: usize,
    pub perms: Vec<String>,
}

/// Alphabet size is `ℓ + 2`, one lowercase letter each.
pub const MAX_FAMILY_ELL: usize = 24;

impl FamilyParams {
    pub fn new(ell: usize, perms: &[&str]) -> Result<Self> {
        let p = FamilyParams {
            ell,
            perms: perms.iter().map(|s| s.to_string()).collect(),
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(3..=MAX_FAMILY_ELL).contains(&self.ell) {
            return Err(Error::pre(format!(
                "family length must lie in 3..={MAX_FAMILY_ELL}, got {}",
                self.ell
            )));
        }
        if self.perms.is_empty() {
            return Err(Error::pre("permutation set is empty"));
        }
        let letters: Vec<char> = (0..self.ell).map(family_token).collect();
        for w in &self.perms {
            let mut cs: Vec<char> = w.chars().collect();
            cs.sort_unstable();
            if cs != letters {
                return Err(Error::pre(format!(
                    "`{w}` is not a permutation of {}",
                    letters.iter().collect::<String>()
                )));
            }
        }
        let mut sorted = self.perms.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.perms.len() {
            return Err(Error::pre("permutation set has duplicates"));
        }
        Ok(())
    }

    /// All `ℓ!` permutations in lexicographic order.
    pub fn all_permutations(ell: usize) -> Result<Self> {
        if ell > 8 {
            return Err(Error::pre("refusing to list more than 8! permutations"));
        }
        let mut cur: Vec<char> = (0..ell).map(family_token).collect();
        let mut perms = vec![cur.iter().collect::<String>()];
        while next_permutation(&mut cur) {
            perms.push(cur.iter().collect());
        }
        let p = FamilyParams { ell, perms };
        p.validate()?;
        Ok(p)
    }
}

fn next_permutation(v: &mut [char]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn family_token(i: usize) -> char {
    (b'a' + i as u8) as char
}

/// The family member: `aᵢ ↦ aᵢ^ℓ`, `a_{ℓ+1} ↦ S`,
/// `a_{ℓ+2} ↦ a_{ℓ+1} a_{ℓ+2} a₁^{ℓ−2}`.
pub fn family_generator(params: &FamilyParams) -> Result<RandomSubstitution> {
    params.validate()?;
    let ell = params.ell;
    let tok = |i: usize| family_token(i).to_string();
    let mut rules: Vec<(String, Vec<String>)> = (0..ell)
        .map(|i| (tok(i), vec![tok(i).repeat(ell)]))
        .collect();
    rules.push((tok(ell), params.perms.clone()));
    rules.push((
        tok(ell + 1),
        vec![format!("{}{}{}", tok(ell), tok(ell + 1), tok(0).repeat(ell - 2))],
    ));
    let borrowed: Vec<Vec<&str>> = rules
        .iter()
        .map(|(_, rs)| rs.iter().map(String::as_str).collect())
        .collect();
    let spec: Vec<(&str, &[&str])> = rules
        .iter()
        .zip(&borrowed)
        .map(|((a, _), rs)| (a.as_str(), rs.as_slice()))
        .collect();
    RandomSubstitution::from_strs(&spec)
}

pub fn predicted_exponent(params: &FamilyParams) -> f64 {
    1.0 + (params.perms.len() as f64).ln() / (params.ell as f64).ln()
}

/// Fit of `p(n) ≈ c·n^α + d·n + e` with `c, d ≥ 0`. The offset `e` is
/// fitted only with at least five points and is 0 otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectedFit {
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    /// Root mean square of `fit/p − 1`.
    pub rms_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub model: &'static str,
    pub alpha_hat: f64,
    /// Least-squares slope of `ln p` against `ln n`.
    pub alpha_loglog: f64,
    pub loglog_intercept: f64,
    pub loglog_residuals: Vec<f64>,
    /// Local slopes between consecutive grid points.
    pub local_slopes: Vec<f64>,
    pub corrected: Option<CorrectedFit>,
    pub n_range: (usize, usize),
    pub points: usize,
    pub flags: Vec<String>,
}

pub const EVENTUALLY_CONSTANT: &str = "sub-Morse–Hedlund: eventually constant";

/// Slope above which the linear correction term is fitted.
const SUPERLINEAR: f64 = 1.05;

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

/// Best `c, d ≥ 0` and free `e` for fixed `α`, minimising
/// `Σ ((c nᵅ + d n + e)/p − 1)²`. Every column subset is solved and the
/// best feasible one kept, which is exact for three unknowns.
fn fit_at(alpha: f64, ns: &[f64], ps: &[f64], with_constant: bool) -> (f64, f64, f64, f64) {
    let cols: [Vec<f64>; 3] = [
        ns.iter().zip(ps).map(|(n, p)| n.powf(alpha) / p).collect(),
        ns.iter().zip(ps).map(|(n, p)| n / p).collect(),
        ps.iter().map(|p| 1.0 / p).collect(),
    ];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let ones = vec![1.0; ns.len()];
    let mut best = (0.0, 0.0, 0.0, f64::INFINITY);
    let subsets = if with_constant { 1..8 } else { 1..4 };
    for mask in subsets {
        let idx: Vec<usize> = (0..3).filter(|b| mask & (1 << b) != 0).collect();
        let mut a: Vec<Vec<f64>> = idx
            .iter()
            .map(|&r| {
                let mut row: Vec<f64> = idx.iter().map(|&c| dot(&cols[r], &cols[c])).collect();
                row.push(dot(&cols[r], &ones));
                row
            })
            .collect();
        let Some(x) = solve(&mut a) else { continue };
        let mut coef = [0.0; 3];
        for (k, &c) in idx.iter().enumerate() {
            coef[c] = x[k];
        }
        if coef[0] < 0.0 || coef[1] < 0.0 {
            continue;
        }
        let sse: f64 = (0..ns.len())
            .map(|i| (coef[0] * cols[0][i] + coef[1] * cols[1][i] + coef[2] * cols[2][i] - 1.0).powi(2))
            .sum();
        if sse < best.3 {
            best = (coef[0], coef[1], coef[2], sse);
        }
    }
    best
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve(a: &mut [Vec<f64>]) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn corrected_fit(ns: &[f64], ps: &[f64]) -> CorrectedFit {
    // the offset needs a spare point beyond the three shape parameters
    let k = ns.len() >= 5;
    let steps = 3000;
    let mut best = (1.0, 0.0, 0.0, 0.0, f64::INFINITY);
    for i in 0..=steps {
        let alpha = 1.0 + 3.0 * i as f64 / steps as f64;
        let (c, d, e, r) = fit_at(alpha, ns, ps, k);
        if r < best.4 {
            best = (alpha, c, d, e, r);
        }
    }
    // golden-section refinement inside the neighbouring grid cells
    let h = 3.0 / steps as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(1.0), (best.0 + h).min(4.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if fit_at(a, ns, ps, k).3 < fit_at(b, ns, ps, k).3 {
            hi = b;
        } else {
            lo = a;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let (c, d, e, r) = fit_at(alpha, ns, ps, k);
    let (alpha, c, d, e, r) = if r <= best.4 { (alpha, c, d, e, r) } else { best };
    CorrectedFit {
        alpha,
        c,
        d,
        e,
        rms_relative_residual: (r / ns.len() as f64).sqrt(),
    }
}

/// Exponent fit over the grid lengths present in `table`.
pub fn fit_polynomial_exponent(table: &ComplexityTable, grid: &[usize]) -> Result<FitReport> {
    let mut pts: Vec<(usize, &BigUint)> = Vec::new();
    for &n in grid {
        let p = table
            .get(n)
            .ok_or_else(|| Error::InsufficientData(format!("table lacks n = {n}")))?;
        if *p == BigUint::default() {
            return Err(Error::InsufficientData(format!("p({n}) = 0")));
        }
        pts.push((n, p));
    }
    pts.sort_by_key(|x| x.0);
    pts.dedup_by_key(|x| x.0);
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} grid points, need at least 4",
            pts.len()
        )));
    }
    let ln_n: Vec<f64> = pts.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ln_p: Vec<f64> = pts.iter().map(|(_, p)| ln_biguint(p)).collect();
    let (slope, intercept) = least_squares(&ln_n, &ln_p);
    let residuals: Vec<f64> = ln_n
        .iter()
        .zip(&ln_p)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    let local_slopes: Vec<f64> = (1..pts.len())
        .map(|i| (ln_p[i] - ln_p[i - 1]) / (ln_n[i] - ln_n[i - 1]))
        .collect();
    let mut flags = Vec::new();
    let upper = &pts[pts.len() / 2..];
    if upper.iter().all(|(_, p)| *p == upper[0].1) {
        flags.push(EVENTUALLY_CONSTANT.to_string());
    }
    let corrected = (slope > SUPERLINEAR).then(|| {
        let ns: Vec<f64> = pts.iter().map(|(n, _)| *n as f64).collect();
        let ps: Vec<f64> = ln_p.iter().map(|l| l.exp()).collect();
        corrected_fit(&ns, &ps)
    });
    if corrected.is_some() {
        flags.push("linear and constant terms fitted alongside the power".to_string());
    }
    Ok(FitReport {
        model: "polynomial",
        alpha_hat: corrected.as_ref().map_or(slope, |c| c.alpha),
        alpha_loglog: slope,
        loglog_intercept: intercept,
        loglog_residuals: residuals,
        local_slopes,
        corrected,
        n_range: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthWitness {
    pub letter: String,
    pub realisation: String,
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub m: usize,
    /// Certified lower end of `log₂ #ϑ^m(b)`.
    pub log2_count: f64,
    pub required: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntermediateGrowthReport {
    pub satisfied: bool,
    /// Every branching letter has geometrically decaying frequency.
    pub condition_i: bool,
    pub condition_i_grade: &'static str,
    pub frequency_evidence: Vec<FrequencyEvidence>,
    pub condition_ii: Option<GrowthWitness>,
    pub lower_bound_check: Vec<LowerBoundRow>,
}

/// Checks the two sufficient conditions for intermediate growth, with
/// frequency hulls to depth `k_max` and counts to depth `m_max`.
pub fn intermediate_growth_check(
    sub: &RandomSubstitution,
    k_max: usize,
    m_max: usize,
    budget: &Budget,
) -> Result<IntermediateGrowthReport> {
    if constant_length(sub).is_none() {
        return Err(Error::pre("intermediate growth check needs constant length"));
    }
    // every letter is pooled: a frequency bound over all sources also
    // bounds the subshift letters
    let all: Vec<Letter> = sub.letters().collect();
    let hulls = parikh_hull_from(sub, k_max, &all, budget)?;
    let pos = positivity_report(sub, &hulls, 0.0)?;
    let branching = sub.letters().any(|a| sub.rules(a).len() >= 2);
    let condition_i = branching && pos.evidence.iter().all(|e| e.decaying);
    let condition_ii = sub.letters().filter(|&b| sub.rules(b).len() >= 2).find_map(|b| {
        sub.rules(b).iter().find(|v| v.count(b) >= 2).map(|v| GrowthWitness {
            letter: sub.token(b).to_string(),
            realisation: sub.format_word(v),
            occurrences: v.count(b),
        })
    });
    let mut lower_bound_check = Vec::new();
    if let (true, Some(w)) = (condition_i, &condition_ii) {
        let b = sub.letter(&w.letter).expect("witness letter");
        let table = lower_counts(sub, m_max, budget)?;
        for m in 1..=table.depth() {
            let log2_count = table.log_interval(b, m).0 / std::f64::consts::LN_2;
            let required = 2f64.powi(m as i32 - 1);
            // compare exactly while the count is stored as a natural
            let holds = match table.exact(b, m) {
                Some(c) => *c >= BigUint::from(1u32) << (1usize << (m - 1)),
                None => log2_count >= required,
            };
            lower_bound_check.push(LowerBoundRow {
                m,
                log2_count,
                required,
                holds,
            });
        }
    }
    let satisfied = condition_i
        && condition_ii.is_some()
        && lower_bound_check.iter().all(|r| r.holds);
    Ok(IntermediateGrowthReport {
        satisfied,
        condition_i,
        condition_i_grade: if condition_i { "geometric-decay" } else { "not-established" },
        frequency_evidence: pos.evidence,
        condition_ii,
        lower_bound_check,
    })
}

fn lower_counts(sub: &RandomSubstitution, m_max: usize, budget: &Budget) -> Result<CountTable> {
    match counts_recurrence(sub, m_max, m_max.min(16)) {
        Ok(t) => Ok(t),
        Err(Error::RecurrenceRefused(_)) => crate::entropy::counts_enumeration(sub, m_max, budget),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub n: usize,
    pub log2_p: f64,
    /// `log₂ p(n) / n^β`
    pub ratio: f64,
    /// `(log₂ p(n) − log₂ n) / n^β`
    pub upper_ratio: f64,
    /// `"table"`, or `"certified-lower"` for `p(ℓ^m) ≥ #ϑ^m(b)`.
    pub source: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub model: &'static str,
    pub beta: f64,
    pub points: Vec<EnvelopePoint>,
    /// `min ratio`: `p(n) ≥ 2^{c₁ n^β}` at every point.
    pub c1: f64,
    /// `max upper_ratio` over table points: `p(n) ≤ n·2^{c₂ n^β}` there.
    pub c2: f64,
    /// `p(n) / (n·2^{n^β})` at table points.
    pub fixed_constant_ratios: Vec<(usize, f64)>,
    /// Slope of `ln log₂ p` against `ln n` over the upper half of the table.
    pub growth_exponent: f64,
    pub classification: &'static str,
}

/// Empirical stretched-exponential envelope `2^{c n^β}`, `β = log_ℓ 2`.
/// With `counts = Some((table, b))`, lengths `ℓ^m` past the complexity
/// table contribute the certified lower bound `p(ℓ^m) ≥ #ϑ^m(b)`.
pub fn stretched_envelope_check(
    table: &ComplexityTable,
    ell: usize,
    counts: Option<(&CountTable, Letter)>,
) -> Result<EnvelopeReport> {
    if ell < 2 {
        return Err(Error::pre("envelope needs ℓ ≥ 2"));
    }
    let beta = 2f64.ln() / (ell as f64).ln();
    let mut points: Vec<EnvelopePoint> = table
        .entries
        .iter()
        .filter(|(n, p)| *n >= 2 && *p > BigUint::from(1u32))
        .map(|(n, p)| {
            let log2_p = ln_biguint(p) / std::f64::consts::LN_2;
            let nb = (*n as f64).powf(beta);
            EnvelopePoint {
                n: *n,
                log2_p,
                ratio: log2_p / nb,
                upper_ratio: (log2_p - (*n as f64).log2()) / nb,
                source: "table",
            }
        })
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData(
            "envelope needs two table lengths with p(n) > 1".into(),
        ));
    }
    let table_max = table.entries.last().map_or(0, |e| e.0);
    let fixed_constant_ratios = points
        .iter()
        .map(|p| {
            let e = p.log2_p - (p.n as f64).log2() - (p.n as f64).powf(beta);
            (p.n, 2f64.powf(e))
        })
        .collect();
    let upper: Vec<&EnvelopePoint> = points[points.len() / 2..].iter().collect();
    let xs: Vec<f64> = upper.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = upper.iter().map(|p| p.log2_p.ln()).collect();
    let growth_exponent = if xs.len() >= 2 {
        least_squares(&xs, &ys).0
    } else {
        let (a, b) = (&points[points.len() - 2], &points[points.len() - 1]);
        (b.log2_p.ln() - a.log2_p.ln()) / ((b.n as f64).ln() - (a.n as f64).ln())
    };
    let c2 = points.iter().map(|p| p.upper_ratio).fold(f64::NEG_INFINITY, f64::max);
    if let Some((ct, b)) = counts {
        for m in 1..=ct.depth() {
            let Some(n) = ell.checked_pow(m as u32) else { break };
            if n <= table_max {
                continue;
            }
            let log2_p = ct.log_interval(b, m).0 / std::f64::consts::LN_2;
            let nb = (n as f64).powf(beta);
            points.push(EnvelopePoint {
                n,
                log2_p,
                ratio: log2_p / nb,
                upper_ratio: (log2_p - (n as f64).log2()) / nb,
                source: "certified-lower",
            });
        }
    }
    let c1 = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let classification = if growth_exponent > (1.0 + beta) / 2.0 {
        "exponential, not intermediate"
    } else if growth_exponent < beta / 2.0 {
        "polynomial, not intermediate"
    } else {
        "intermediate"
    };
    Ok(EnvelopeReport {
        model: "stretched-exponential",
        beta,
        points,
        c1,
        c2,
        fixed_constant_ratios,
        growth_exponent,
        classification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::language::LanguageMode;

    fn table(f: impl Fn(usize) -> BigUint, ns: &[usize]) -> ComplexityTable {
        ComplexityTable::from_values(LanguageMode::Legal, ns.iter().map(|&n| (n, f(n))).collect())
    }

    #[test]
    fn family_matches_bundled_example() {
        let p = FamilyParams::new(3, &["abc", "acb"]).unwrap();
        assert_eq!(family_generator(&p).unwrap(), bundled::get("family_3_abc_acb").unwrap());
        assert!((predicted_exponent(&p) - 1.6309297535714575).abs() < 1e-12);
        assert!(FamilyParams::new(2, &["ab"]).is_err());
        assert!(FamilyParams::new(3, &["abb"]).is_err());
        assert!(FamilyParams::new(3, &[]).is_err());
        assert_eq!(FamilyParams::all_permutations(3).unwrap().perms.len(), 6);
        assert_eq!(predicted_exponent(&FamilyParams::new(3, &["abc"]).unwrap()), 1.0);
        let four = FamilyParams::new(4, &["abcd", "abdc", "bacd", "dcba"]).unwrap();
        assert!((predicted_exponent(&four) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fits_on_model_tables() {
        let grid = [64, 128, 256, 512, 1024, 2048];
        let r = fit_polynomial_exponent(&table(|n| BigUint::from(n + 1), &grid), &grid).unwrap();
        assert!((r.alpha_hat - 1.0).abs() < 0.05);
        assert!(r.flags.is_empty());
        let r = fit_polynomial_exponent(&table(|_| BigUint::from(2u32), &grid), &grid).unwrap();
        assert!(r.alpha_hat.abs() < 1e-12);
        assert_eq!(r.flags, [EVENTUALLY_CONSTANT]);
        let r = fit_polynomial_exponent(&table(|n| BigUint::from(3 * n * n + 40 * n), &grid), &grid)
            .unwrap();
        assert!((r.alpha_hat - 2.0).abs() < 1e-3);
        assert!(fit_polynomial_exponent(&table(BigUint::from, &grid[..3]), &grid[..3]).is_err());
    }

    #[test]
    fn envelope_classifications() {
        let ns: Vec<usize> = (1..=40).collect();
        let r = stretched_envelope_check(&table(|n| BigUint::from(1u32) << n, &ns), 3, None).unwrap();
        assert_eq!(r.classification, "exponential, not intermediate");
        let ns: Vec<usize> = (1..=12).map(|k| 1usize << k).collect();
        let r = stretched_envelope_check(&table(BigUint::from, &ns), 3, None).unwrap();
        assert_eq!(r.classification, "polynomial, not intermediate");
        assert!(r.points.last().unwrap().ratio < r.points[0].ratio);
    }

    #[test]
    fn intermediate_example() {
        let s = bundled::get("intermediate_growth").unwrap();
        let r = intermediate_growth_check(&s, 8, 12, &Budget::default()).unwrap();
        assert!(r.satisfied);
        let w = r.condition_ii.unwrap();
        assert_eq!((w.letter.as_str(), w.realisation.as_str(), w.occurrences), ("b", "abb", 2));
        assert_eq!(r.lower_bound_check.len(), 12);
        let s = bundled::get("log_series").unwrap();
        assert!(!intermediate_growth_check(&s, 6, 6, &Budget::default()).unwrap().satisfied);
        let s = bundled::get("cyclic_abc").unwrap();
        let r = intermediate_growth_check(&s, 4, 4, &Budget::default()).unwrap();
        assert!(!r.satisfied && r.condition_ii.is_none());
    }
}
