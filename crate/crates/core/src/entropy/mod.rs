//! Inflation word entropy.
//!
//! Counts `#ϑ^m(a)` come from [`counts`]; this module turns them into the
//! normalised sequences `e_m(a) = ln #ϑ^m(a) / |ϑ^m(a)|` and into the
//! finite-depth upper bound on topological entropy obtained by maximising
//! `#ϑ^m(u)` over inflation words `u ∈ ϑ^k(b)`.

mod counts;
mod wide;

use num_bigint::BigUint;
use serde::Serialize;

pub use counts::{
    count_table, counts_enumeration, counts_recurrence, image_relation_analysis, CountTable,
    Engine, EngineChoice, ImageRelation, RelationAnalysis, DEFAULT_M_EXACT,
};
pub use wide::{Wide, WideInterval};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structure::{constant_length, is_compatible, is_primitive};
use crate::substitution::RandomSubstitution;
use crate::word::{Letter, Word};

/// Natural logarithm of a big natural, accurate to about 1e−15 relative.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let v = top.iter_u64_digits().next().unwrap_or(0);
    (v as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Spread between letters above which the shared-limit check is flagged.
pub const SPREAD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LetterEntropy {
    pub letter: String,
    /// `e_m` for `m = 1..=m_max`.
    pub sequence: Vec<f64>,
    /// Certified enclosure of each `e_m`.
    pub enclosure: Vec<(f64, f64)>,
    /// Minimum and maximum of `e_m` over the second half of the range.
    pub liminf_estimate: f64,
    pub limsup_estimate: f64,
    /// `[ln c / ℓ^m, ln c / (ℓ^m − 1)]` at the last depth (constant length only).
    pub bracket: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub reference: f64,
    pub computed_midpoint: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationEntropyReport {
    pub engine: &'static str,
    pub m_max: usize,
    pub log_base: &'static str,
    pub constant_length: Option<usize>,
    /// `|ϑ^m(a)|` per depth `m = 0..=m_max` and letter.
    pub lengths: Vec<Vec<u128>>,
    pub letters: Vec<LetterEntropy>,
    /// Largest `e_{m_max}(a)` over all letters.
    pub pooled_estimate: f64,
    pub pooled_letter: String,
    /// Present when the input is primitive and constant length, where all
    /// letters share one limit.
    pub shared_limit_spread: Option<f64>,
    pub spread_flag: bool,
    pub counts_truncated: bool,
    pub reference: Option<ReferenceCheck>,
}

impl InflationEntropyReport {
    /// Records how an externally quoted value compares with the bracket
    /// midpoint of the pooled letter.
    pub fn compare_with(&mut self, reference: f64, tolerance: f64) {
        let letter = self
            .letters
            .iter()
            .find(|l| l.letter == self.pooled_letter)
            .expect("pooled letter present");
        let mid = match letter.bracket {
            Some((lo, hi)) => 0.5 * (lo + hi),
            None => *letter.sequence.last().unwrap_or(&0.0),
        };
        let difference = mid - reference;
        self.reference = Some(ReferenceCheck {
            reference,
            computed_midpoint: mid,
            difference,
            tolerance,
            agrees: difference.abs() <= tolerance,
        });
    }

    pub fn letter(&self, token: &str) -> Option<&LetterEntropy> {
        self.letters.iter().find(|l| l.letter == token)
    }
}

/// `|ϑ^m(a)|` for `m = 0..=m_max`; needs constant length or compatibility.
pub fn image_lengths(sub: &RandomSubstitution, m_max: usize) -> Result<Vec<Vec<u128>>> {
    if constant_length(sub).is_none() && is_compatible(sub).is_err() {
        return Err(Error::pre(
            "image lengths are ill-defined without constant length or compatibility",
        ));
    }
    let mut out = vec![vec![1u128; sub.size()]];
    for m in 1..=m_max {
        let prev = &out[m - 1];
        let row = sub
            .letters()
            .map(|a| {
                sub.rules(a)[0]
                    .letters()
                    .try_fold(0u128, |acc, x| acc.checked_add(prev[x.index()]))
                    .ok_or_else(|| Error::pre(format!("image length overflows at depth {m}")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

fn divide_out(x: (f64, f64), len: u128) -> (f64, f64) {
    let l = len as f64;
    (wide::widen_down(x.0 / l), wide::widen_up(x.1 / l))
}

/// Inflation word entropy sequences from an existing count table.
pub fn inflation_entropy_from(
    sub: &RandomSubstitution,
    table: &CountTable,
) -> Result<InflationEntropyReport> {
    let m_max = table.depth();
    if m_max == 0 {
        return Err(Error::pre("inflation entropy needs depth at least 1"));
    }
    let lengths = image_lengths(sub, m_max)?;
    let ell = constant_length(sub);
    let half = m_max.div_ceil(2).max(1);
    let letters: Vec<LetterEntropy> = sub
        .letters()
        .map(|a| {
            let mut sequence = Vec::with_capacity(m_max);
            let mut enclosure = Vec::with_capacity(m_max);
            for m in 1..=m_max {
                let iv = divide_out(table.log_interval(a, m), lengths[m][a.index()]);
                sequence.push(table.ln(a, m) / lengths[m][a.index()] as f64);
                enclosure.push(iv);
            }
            let tail = &sequence[half - 1..];
            let bracket = ell.filter(|&l| l >= 2).map(|_| {
                let len = lengths[m_max][a.index()];
                let (lo, hi) = table.log_interval(a, m_max);
                (
                    wide::widen_down(lo / len as f64),
                    wide::widen_up(hi / (len - 1) as f64),
                )
            });
            LetterEntropy {
                letter: sub.token(a).to_string(),
                liminf_estimate: tail.iter().copied().fold(f64::INFINITY, f64::min),
                limsup_estimate: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                sequence,
                enclosure,
                bracket,
            }
        })
        .collect();
    let (pooled_idx, pooled_estimate) = letters
        .iter()
        .enumerate()
        .map(|(i, l)| (i, *l.sequence.last().unwrap()))
        .fold((0, f64::NEG_INFINITY), |best, x| if x.1 > best.1 { x } else { best });
    let shared = ell.is_some() && is_primitive(sub).primitive;
    let shared_limit_spread = shared.then(|| {
        let last: Vec<f64> = letters.iter().map(|l| *l.sequence.last().unwrap()).collect();
        last.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - last.iter().copied().fold(f64::INFINITY, f64::min)
    });
    Ok(InflationEntropyReport {
        engine: table.engine.as_str(),
        m_max,
        log_base: "e",
        constant_length: ell,
        lengths,
        pooled_letter: letters[pooled_idx].letter.clone(),
        pooled_estimate,
        spread_flag: shared_limit_spread.is_some_and(|s| s > SPREAD_TOLERANCE),
        shared_limit_spread,
        counts_truncated: table.truncated,
        letters,
        reference: None,
    })
}

/// Inflation word entropy up to depth `m_max`.
pub fn inflation_entropy(
    sub: &RandomSubstitution,
    m_max: usize,
    engine: EngineChoice,
    budget: &Budget,
) -> Result<InflationEntropyReport> {
    let table = count_table(sub, m_max, engine, DEFAULT_M_EXACT, budget)?;
    inflation_entropy_from(sub, &table)
}

/// Longest inflation word spelled out in a bound witness.
pub const WITNESS_LEN_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InflationBound {
    pub m: usize,
    pub k: usize,
    pub ell: usize,
    /// Certified upper bound on topological entropy (natural log).
    pub bound: f64,
    /// Letter `b` with the maximising `u ∈ ϑ^k(b)`.
    pub source_letter: String,
    /// `|u|_a` per letter.
    pub witness_parikh: Vec<u128>,
    /// The maximising `u`, when at most [`WITNESS_LEN_CAP`] letters long.
    pub witness: Option<String>,
    pub letters_used: Vec<String>,
}

/// Upper bound `max_u Σ_i ln #ϑ^m(uᵢ) / (ℓ^k (ℓ^m − 1))` over `u ∈ ϑ^k(b)`
/// for `b` in `letters`. The maximum is found by dynamic programming over
/// the depth, which is exact because the objective is additive over
/// concatenation.
pub fn prop44_upper_bound(
    sub: &RandomSubstitution,
    table: &CountTable,
    m: usize,
    k: usize,
    letters: &[Letter],
) -> Result<InflationBound> {
    let ell = constant_length(sub)
        .filter(|&l| l >= 2)
        .ok_or_else(|| Error::pre("the inflation bound needs constant length at least 2"))?;
    if m == 0 || k == 0 {
        return Err(Error::pre("m and k must be at least 1"));
    }
    if m > table.depth() {
        return Err(Error::pre(format!(
            "count table reaches depth {}, bound asks for {m}",
            table.depth()
        )));
    }
    if letters.is_empty() {
        return Err(Error::pre("no source letters"));
    }
    let d = sub.size();
    // best[b], choice[j][b] = index of the maximising realisation at level j
    let mut best: Vec<f64> = sub.letters().map(|a| table.log_interval(a, m).1).collect();
    let mut parikh: Vec<Vec<u128>> = (0..d)
        .map(|a| (0..d).map(|x| u128::from(x == a)).collect())
        .collect();
    let mut choices: Vec<Vec<usize>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut next_best = vec![0.0; d];
        let mut next_parikh = vec![vec![0u128; d]; d];
        let mut choice = vec![0usize; d];
        for b in sub.letters() {
            let (idx, val) = sub
                .rules(b)
                .iter()
                .map(|s| s.letters().map(|x| best[x.index()]).sum::<f64>())
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            next_best[b.index()] = val;
            choice[b.index()] = idx;
            for x in sub.rules(b)[idx].letters() {
                for (t, v) in next_parikh[b.index()].iter_mut().zip(&parikh[x.index()]) {
                    *t += v;
                }
            }
        }
        best = next_best;
        parikh = next_parikh;
        choices.push(choice);
    }
    let source = letters
        .iter()
        .copied()
        .fold(letters[0], |acc, b| if best[b.index()] > best[acc.index()] { b } else { acc });
    let scale = (ell as f64).powi(k as i32) * ((ell as f64).powi(m as i32) - 1.0);
    let raw = best[source.index()] / scale;
    // Each DP level adds ℓ rounded terms.
    let rel = ((k * ell + 8) as f64) * 2.0 * f64::EPSILON;
    let bound = if raw == 0.0 {
        0.0
    } else {
        wide::widen_up(raw + raw.abs() * rel)
    };
    let len = ell.checked_pow(k as u32).unwrap_or(usize::MAX);
    let witness = (len <= WITNESS_LEN_CAP).then(|| {
        let mut w = vec![source.0];
        for level in (0..k).rev() {
            let mut next = Vec::with_capacity(w.len() * ell);
            for &x in &w {
                let s = &sub.rules(Letter(x))[choices[level][x as usize]];
                next.extend_from_slice(s.as_slice());
            }
            w = next;
        }
        sub.format_word(&Word::new(w))
    });
    Ok(InflationBound {
        m,
        k,
        ell,
        bound,
        source_letter: sub.token(source).to_string(),
        witness_parikh: parikh[source.index()].clone(),
        witness,
        letters_used: letters.iter().map(|&a| sub.token(a).to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use std::f64::consts::LN_2;

    #[test]
    fn squaring_sequence_is_constant() {
        let s = bundled::get("squaring").unwrap();
        let r = inflation_entropy(&s, 30, EngineChoice::Recurrence, &Budget::default()).unwrap();
        assert_eq!(r.engine, "recurrence-laminar");
        for (m, e) in r.letter("a").unwrap().sequence.iter().enumerate() {
            assert!((e - LN_2 / 2.0).abs() < 1e-12, "m={}", m + 1);
        }
    }

    #[test]
    fn log_series_partial_sums() {
        let s = bundled::get("log_series").unwrap();
        let r = inflation_entropy(&s, 20, EngineChoice::Auto, &Budget::default()).unwrap();
        let b = r.letter("b").unwrap();
        let mut partial = 0.0;
        for n in 1..=20 {
            partial += (n as f64).ln() / 2f64.powi(n);
            assert!((b.sequence[n as usize - 1] - partial).abs() < 1e-10);
        }
        assert!((b.sequence[19] - 0.507834).abs() < 5e-6);
        assert!(!r.spread_flag);
    }

    #[test]
    fn deterministic_entropy_vanishes() {
        let s = bundled::get("cyclic_abc").unwrap();
        let r = inflation_entropy(&s, 8, EngineChoice::Auto, &Budget::default()).unwrap();
        assert!(r.letters.iter().all(|l| l.sequence.iter().all(|&e| e == 0.0)));
        let t = count_table(&s, 3, EngineChoice::Auto, 12, &Budget::default()).unwrap();
        let all: Vec<Letter> = s.letters().collect();
        assert_eq!(prop44_upper_bound(&s, &t, 2, 2, &all).unwrap().bound, 0.0);
    }

    #[test]
    fn compatible_lengths_follow_the_matrix() {
        let s = bundled::get("random_fibonacci").unwrap();
        let l = image_lengths(&s, 6).unwrap();
        let a: Vec<u128> = l.iter().map(|r| r[0]).collect();
        assert_eq!(a, [1, 2, 3, 5, 8, 13, 21]);
        let r = inflation_entropy(&s, 6, EngineChoice::Auto, &Budget::default()).unwrap();
        assert_eq!(r.engine, "enumeration");
        assert!(r.letters[0].bracket.is_none());
    }

    #[test]
    fn reference_comparison_flags_disagreement() {
        let s = bundled::get("sum_of_squares").unwrap();
        let mut r = inflation_entropy(&s, 14, EngineChoice::Recurrence, &Budget::default()).unwrap();
        let (lo, hi) = r.letter("a").unwrap().bracket.unwrap();
        assert!(hi - lo < 1e-4);
        r.compare_with(0.4115, 1e-3);
        let c = r.reference.unwrap();
        assert!(!c.agrees);
        assert!((c.computed_midpoint - 0.4329).abs() < 1e-3);
    }

    #[test]
    fn bound_example_values() {
        let s = bundled::get("squaring").unwrap();
        let t = counts_recurrence(&s, 6, 12).unwrap();
        let all: Vec<Letter> = s.letters().collect();
        let b = prop44_upper_bound(&s, &t, 1, 1, &all).unwrap();
        assert!((b.bound - LN_2).abs() < 1e-12);
        assert_eq!(b.witness.as_deref(), Some("aa"));
        assert_eq!(b.witness_parikh, [2, 0]);
        let b = prop44_upper_bound(&s, &t, 4, 4, &all).unwrap();
        assert!(b.bound >= LN_2 / 2.0);
    }

    /// Brute force over the materialised `I_k`.
    fn bound_by_enumeration(s: &RandomSubstitution, t: &CountTable, m: usize, k: usize) -> f64 {
        let ell = constant_length(s).unwrap() as f64;
        let mut best = f64::NEG_INFINITY;
        for a in s.letters() {
            for u in s.power_image(a, k, &Budget::default()).unwrap().iter() {
                let v: f64 = u.letters().map(|x| t.ln(x, m)).sum();
                best = best.max(v);
            }
        }
        best / (ell.powi(k as i32) * (ell.powi(m as i32) - 1.0))
    }

    #[test]
    fn bound_matches_enumerated_maximum() {
        for name in ["squaring", "log_series", "sum_of_squares", "intermediate_growth"] {
            let s = bundled::get(name).unwrap();
            let t = counts_recurrence(&s, 4, 12).unwrap();
            let all: Vec<Letter> = s.letters().collect();
            for m in 1..=4 {
                for k in 1..=3 {
                    let dp = prop44_upper_bound(&s, &t, m, k, &all).unwrap().bound;
                    let brute = bound_by_enumeration(&s, &t, m, k);
                    assert!(dp >= brute && dp - brute < 1e-12, "{name} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn witness_realises_the_bound() {
        let s = bundled::get("log_series").unwrap();
        let t = counts_recurrence(&s, 3, 12).unwrap();
        let all: Vec<Letter> = s.letters().collect();
        let b = prop44_upper_bound(&s, &t, 3, 3, &all).unwrap();
        let w = s.parse_word(b.witness.as_ref().unwrap()).unwrap();
        let src = s.letter(&b.source_letter).unwrap();
        assert!(s.power_image(src, 3, &Budget::default()).unwrap().contains(&w));
        assert_eq!(w.parikh(2).iter().map(|&x| x as u128).collect::<Vec<_>>(), b.witness_parikh);
    }
}
