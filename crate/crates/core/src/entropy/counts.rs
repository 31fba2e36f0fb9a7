//! Exact counts `#ϑ^m(a)` by enumeration and by certified recurrences.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::wide::{widen_down, widen_up, WideInterval};
use super::ln_biguint;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::structure::{constant_length, is_compatible};
use crate::substitution::{PowerImages, RandomSubstitution};
use crate::word::{Letter, Word};

/// Relation between two letters' image sets at one depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageRelation {
    Equal,
    Disjoint,
    /// The first set is a proper subset of the second.
    Subset,
    Superset,
    /// Sets intersect and neither contains the other.
    Overlap,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationAnalysis {
    /// `(a, b, relation of ϑ(a) to ϑ(b))` for `a < b`.
    pub pairs: Vec<(usize, usize, ImageRelation)>,
    pub laminar: bool,
}

/// Pairwise relations of the level-one realisation sets.
pub fn image_relation_analysis(sub: &RandomSubstitution) -> RelationAnalysis {
    let sets: Vec<Vec<&Word>> = sub
        .letters()
        .map(|a| {
            let mut v: Vec<&Word> = sub.rules(a).iter().collect();
            v.sort();
            v
        })
        .collect();
    let mut pairs = Vec::new();
    for a in 0..sets.len() {
        for b in (a + 1)..sets.len() {
            let sa = &sets[a];
            let sb = &sets[b];
            let common = sa.iter().filter(|w| sb.binary_search(w).is_ok()).count();
            let rel = if common == 0 {
                ImageRelation::Disjoint
            } else if common == sa.len() && common == sb.len() {
                ImageRelation::Equal
            } else if common == sa.len() {
                ImageRelation::Subset
            } else if common == sb.len() {
                ImageRelation::Superset
            } else {
                ImageRelation::Overlap
            };
            pairs.push((a, b, rel));
        }
    }
    let laminar = pairs.iter().all(|p| p.2 != ImageRelation::Overlap);
    RelationAnalysis { pairs, laminar }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Enumeration,
    /// Recurrence where every union was already disjoint.
    RecurrenceDisjoint,
    /// Recurrence that dropped contained product sets.
    RecurrenceLaminar,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Enumeration => "enumeration",
            Engine::RecurrenceDisjoint => "recurrence-disjoint",
            Engine::RecurrenceLaminar => "recurrence-laminar",
        }
    }
}

/// Requested counting engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Auto,
    Enumerate,
    Recurrence,
}

impl std::str::FromStr for EngineChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EngineChoice::Auto),
            "enumerate" | "enumeration" => Ok(EngineChoice::Enumerate),
            "recurrence" => Ok(EngineChoice::Recurrence),
            _ => Err(Error::pre(format!("unknown engine `{s}`"))),
        }
    }
}

/// Default depth up to which counts are kept as exact naturals.
pub const DEFAULT_M_EXACT: usize = 12;

/// Counts `#ϑ^m(a)` for `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub engine: Engine,
    pub m_exact: usize,
    /// `exact[m][a]`, present for `m ≤ m_exact`.
    pub exact: Vec<Vec<Option<BigUint>>>,
    /// `log[m][a] = (lo, hi)`, an interval holding `ln #ϑ^m(a)`.
    pub log: Vec<Vec<(f64, f64)>>,
    /// Set when the budget stopped enumeration before `m_max`.
    pub truncated: bool,
}

impl CountTable {
    pub fn depth(&self) -> usize {
        self.log.len() - 1
    }

    pub fn exact(&self, a: Letter, m: usize) -> Option<&BigUint> {
        self.exact.get(m)?.get(a.index())?.as_ref()
    }

    pub fn log_interval(&self, a: Letter, m: usize) -> (f64, f64) {
        self.log[m][a.index()]
    }

    /// Midpoint of the log interval.
    pub fn ln(&self, a: Letter, m: usize) -> f64 {
        let (lo, hi) = self.log[m][a.index()];
        0.5 * (lo + hi)
    }
}

fn exact_log(x: &BigUint) -> (f64, f64) {
    if x.is_one() {
        return (0.0, 0.0);
    }
    let l = ln_biguint(x);
    (widen_down(l), widen_up(l))
}

/// Counts by materialising `ϑ^m(a)`. Requires every realisation of each
/// `ϑ^m(a)` to share one length (constant length or compatible). A budget
/// failure truncates the table at the last completed depth.
pub fn counts_enumeration(
    sub: &RandomSubstitution,
    m_max: usize,
    budget: &Budget,
) -> Result<CountTable> {
    if constant_length(sub).is_none() && is_compatible(sub).is_err() {
        return Err(Error::pre(
            "enumeration counts need constant length or compatibility",
        ));
    }
    let d = sub.size();
    let one = vec![Some(BigUint::one()); d];
    let mut table = CountTable {
        engine: Engine::Enumeration,
        m_exact: m_max,
        exact: vec![one],
        log: vec![vec![(0.0, 0.0); d]],
        truncated: false,
    };
    let mut images = PowerImages::new(sub);
    for m in 1..=m_max {
        if let Err(e) = images.advance(budget) {
            if m == 1 {
                return Err(e);
            }
            log::warn!("enumeration stopped at depth {m}: {e}");
            table.truncated = true;
            table.m_exact = m - 1;
            break;
        }
        let row: Vec<Option<BigUint>> = images
            .current()
            .iter()
            .map(|s| Some(BigUint::from(s.len())))
            .collect();
        table
            .log
            .push(row.iter().map(|x| exact_log(x.as_ref().unwrap())).collect());
        table.exact.push(row);
    }
    Ok(table)
}

/// Tri-state relation used while propagating image relations by depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Equal,
    Disjoint,
    /// `ϑ^j(x) ⊆ ϑ^j(y)`, strictly.
    Sub,
    Sup,
    Unknown,
}

fn flip(r: Rel) -> Rel {
    match r {
        Rel::Sub => Rel::Sup,
        Rel::Sup => Rel::Sub,
        x => x,
    }
}

/// Relations between product sets `Π ϑ^j(sᵢ)` and `Π ϑ^j(tᵢ)` of equal
/// arity. Products of nonempty equal-length sets are disjoint iff some
/// factor pair is, and nested iff every factor pair is.
fn product_rel(rel: &[Vec<Rel>], s: &Word, t: &Word) -> Rel {
    let mut all_eq = true;
    let mut sub = true;
    let mut sup = true;
    for (x, y) in s.as_slice().iter().zip(t.as_slice()) {
        match rel[*x as usize][*y as usize] {
            Rel::Disjoint => return Rel::Disjoint,
            Rel::Equal => {}
            Rel::Sub => {
                all_eq = false;
                sup = false;
            }
            Rel::Sup => {
                all_eq = false;
                sub = false;
            }
            Rel::Unknown => {
                all_eq = false;
                sub = false;
                sup = false;
            }
        }
    }
    if all_eq {
        Rel::Equal
    } else if sub {
        Rel::Sub
    } else if sup {
        Rel::Sup
    } else {
        Rel::Unknown
    }
}

fn contained(rel: &[Vec<Rel>], s: &Word, t: &Word) -> bool {
    matches!(product_rel(rel, s, t), Rel::Equal | Rel::Sub)
}

/// Relations at depth `j + 1` from those at depth `j`.
fn next_relations(sub: &RandomSubstitution, rel: &[Vec<Rel>]) -> Vec<Vec<Rel>> {
    let d = sub.size();
    let mut out = vec![vec![Rel::Unknown; d]; d];
    for x in 0..d {
        out[x][x] = Rel::Equal;
        for y in (x + 1)..d {
            let rx = sub.rules(Letter(x as u8));
            let ry = sub.rules(Letter(y as u8));
            let disjoint = rx
                .iter()
                .all(|s| ry.iter().all(|t| product_rel(rel, s, t) == Rel::Disjoint));
            let x_in_y = rx.iter().all(|s| ry.iter().any(|t| contained(rel, s, t)));
            let y_in_x = ry.iter().all(|t| rx.iter().any(|s| contained(rel, t, s)));
            let r = match (disjoint, x_in_y, y_in_x) {
                (true, _, _) => Rel::Disjoint,
                (_, true, true) => Rel::Equal,
                (_, true, false) => Rel::Sub,
                (_, false, true) => Rel::Sup,
                _ => Rel::Unknown,
            };
            out[x][y] = r;
            out[y][x] = flip(r);
        }
    }
    out
}

/// Realisations of `a` kept after dropping those whose depth-`j` product
/// set is contained in another's. `None` if the kept sets are not provably
/// pairwise disjoint.
fn reduced_union(rel: &[Vec<Rel>], rules: &[Word]) -> Option<(Vec<usize>, bool)> {
    let mut kept: Vec<usize> = Vec::new();
    let mut dropped = false;
    for (i, s) in rules.iter().enumerate() {
        let covered = rules.iter().enumerate().any(|(k, t)| {
            k != i
                && match product_rel(rel, s, t) {
                    Rel::Sub => true,
                    // equal product sets: keep the first
                    Rel::Equal => k < i,
                    _ => false,
                }
        });
        if covered {
            dropped = true;
        } else {
            kept.push(i);
        }
    }
    for (p, &i) in kept.iter().enumerate() {
        for &k in &kept[p + 1..] {
            if product_rel(rel, &rules[i], &rules[k]) != Rel::Disjoint {
                return None;
            }
        }
    }
    Some((kept, dropped))
}

enum Value {
    Exact(BigUint),
    Approx(WideInterval),
}

impl Value {
    fn interval(&self) -> WideInterval {
        match self {
            Value::Exact(x) => WideInterval::from_big(x),
            Value::Approx(iv) => *iv,
        }
    }
}

/// Counts through `#ϑ^m(a) = Σ_{kept s} Π_i #ϑ^{m−1}(sᵢ)`. Requires constant
/// length and laminar level-one images; refuses (rather than approximates)
/// when a union cannot be reduced to provably disjoint product sets.
pub fn counts_recurrence(
    sub: &RandomSubstitution,
    m_max: usize,
    m_exact: usize,
) -> Result<CountTable> {
    if constant_length(sub).is_none() {
        return Err(Error::RecurrenceRefused("not constant length".into()));
    }
    let analysis = image_relation_analysis(sub);
    if !analysis.laminar {
        return Err(Error::RecurrenceRefused(
            "level-one images are not laminar".into(),
        ));
    }
    let d = sub.size();
    let mut rel: Vec<Vec<Rel>> = (0..d)
        .map(|x| (0..d).map(|y| if x == y { Rel::Equal } else { Rel::Disjoint }).collect())
        .collect();
    let mut any_dropped = false;
    let mut current: Vec<Value> = (0..d).map(|_| Value::Exact(BigUint::one())).collect();
    let mut table = CountTable {
        engine: Engine::RecurrenceDisjoint,
        m_exact,
        exact: vec![vec![Some(BigUint::one()); d]],
        log: vec![vec![(0.0, 0.0); d]],
        truncated: false,
    };
    for m in 1..=m_max {
        // `rel` describes depth m − 1
        let mut plans = Vec::with_capacity(d);
        for a in sub.letters() {
            let (kept, dropped) = reduced_union(&rel, sub.rules(a)).ok_or_else(|| {
                Error::RecurrenceRefused(format!(
                    "images of `{}` at depth {m} are not provably disjoint",
                    sub.token(a)
                ))
            })?;
            any_dropped |= dropped;
            plans.push(kept);
        }
        let exact = m <= m_exact;
        let next: Vec<Value> = sub
            .letters()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&a| {
                let rules = sub.rules(a);
                let kept = &plans[a.index()];
                if exact {
                    let mut total = BigUint::from(0u32);
                    for &i in kept {
                        let mut prod = BigUint::one();
                        for x in rules[i].letters() {
                            match &current[x.index()] {
                                Value::Exact(c) => prod *= c,
                                Value::Approx(_) => unreachable!("exact depth after approximate"),
                            }
                        }
                        total += prod;
                    }
                    Value::Exact(total)
                } else {
                    let mut total = WideInterval::exact_u128(0);
                    for &i in kept {
                        let mut prod = WideInterval::exact_u128(1);
                        for x in rules[i].letters() {
                            prod = prod.mul(current[x.index()].interval());
                        }
                        total = total.add(prod);
                    }
                    Value::Approx(total)
                }
            })
            .collect();
        table.exact.push(
            next.iter()
                .map(|v| match v {
                    Value::Exact(x) => Some(x.clone()),
                    Value::Approx(_) => None,
                })
                .collect(),
        );
        table.log.push(
            next.iter()
                .map(|v| match v {
                    Value::Exact(x) => exact_log(x),
                    Value::Approx(iv) => iv.ln(),
                })
                .collect(),
        );
        current = next;
        rel = next_relations(sub, &rel);
    }
    if any_dropped {
        table.engine = Engine::RecurrenceLaminar;
    }
    Ok(table)
}

/// Counts with the requested engine. `Auto` tries the recurrence and falls
/// back to enumeration when it refuses.
pub fn count_table(
    sub: &RandomSubstitution,
    m_max: usize,
    choice: EngineChoice,
    m_exact: usize,
    budget: &Budget,
) -> Result<CountTable> {
    match choice {
        EngineChoice::Enumerate => counts_enumeration(sub, m_max, budget),
        EngineChoice::Recurrence => counts_recurrence(sub, m_max, m_exact),
        EngineChoice::Auto => match counts_recurrence(sub, m_max, m_exact) {
            Ok(t) => Ok(t),
            Err(Error::RecurrenceRefused(why)) => {
                log::info!("recurrence refused ({why}); enumerating");
                counts_enumeration(sub, m_max, budget)
            }
            Err(e) => Err(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn col(t: &CountTable, a: u8) -> Vec<u64> {
        (1..=t.depth())
            .map(|m| t.exact(Letter(a), m).unwrap().try_into().unwrap())
            .collect()
    }

    #[test]
    fn relation_examples() {
        let r = image_relation_analysis(&bundled::get("squaring").unwrap());
        assert_eq!(r.pairs, vec![(0, 1, ImageRelation::Superset)]);
        assert!(r.laminar);
        let r = image_relation_analysis(&bundled::get("log_series").unwrap());
        assert_eq!(r.pairs, vec![(0, 1, ImageRelation::Disjoint)]);
        let s = RandomSubstitution::from_strs(&[("a", &["aa", "ab"]), ("b", &["ab", "bb"])]).unwrap();
        let r = image_relation_analysis(&s);
        assert_eq!(r.pairs, vec![(0, 1, ImageRelation::Overlap)]);
        assert!(!r.laminar);
        assert!(matches!(counts_recurrence(&s, 3, 12), Err(Error::RecurrenceRefused(_))));
    }

    #[test]
    fn enumeration_examples() {
        let b = Budget::default();
        let t = counts_enumeration(&bundled::get("squaring").unwrap(), 3, &b).unwrap();
        assert_eq!(col(&t, 0), [2, 4, 16]);
        let t = counts_enumeration(&bundled::get("log_series").unwrap(), 3, &b).unwrap();
        assert_eq!(col(&t, 0), [2, 6, 48]);
        assert_eq!(col(&t, 1), [1, 2, 12]);
        let t = counts_enumeration(&bundled::get("sum_of_squares").unwrap(), 3, &b).unwrap();
        assert_eq!(col(&t, 0), [2, 5, 29]);
        assert_eq!(t.engine, Engine::Enumeration);
    }

    #[test]
    fn recurrence_examples() {
        let t = counts_recurrence(&bundled::get("sum_of_squares").unwrap(), 4, 12).unwrap();
        assert_eq!(col(&t, 0), [2, 5, 29, 941]);
        assert_eq!(col(&t, 1), [1, 2, 10, 290]);
        assert_eq!(t.engine, Engine::RecurrenceDisjoint);
        let t = counts_recurrence(&bundled::get("squaring").unwrap(), 30, 12).unwrap();
        assert_eq!(t.engine, Engine::RecurrenceLaminar);
        for m in 1..=12 {
            assert_eq!(t.exact(Letter(0), m).unwrap(), &(BigUint::one() << (1usize << (m - 1))));
        }
        for m in 13..=30 {
            let (lo, hi) = t.log_interval(Letter(0), m);
            let expect = (1u64 << (m - 1)) as f64 * std::f64::consts::LN_2;
            assert!(lo <= expect && expect <= hi, "m={m}");
        }
    }

    #[test]
    fn engines_agree() {
        let b = Budget::words(200_000);
        for name in ["squaring", "log_series", "sum_of_squares", "intermediate_growth", "family_3_abc_acb"] {
            let s = bundled::get(name).unwrap();
            let e = counts_enumeration(&s, 6, &b).unwrap();
            let r = counts_recurrence(&s, 6, 12).unwrap();
            for m in 0..=e.depth() {
                assert_eq!(e.exact[m], r.exact[m], "{name} m={m}");
            }
        }
    }

    #[test]
    fn log_counts_match_exact_counts() {
        let t = counts_recurrence(&bundled::get("log_series").unwrap(), 20, 20).unwrap();
        for m in 1..=20 {
            for a in [Letter(0), Letter(1)] {
                let (lo, hi) = t.log_interval(a, m);
                let x = ln_biguint(t.exact(a, m).unwrap());
                assert!(lo <= x && x <= hi);
                assert!((hi - lo) <= 1e-12 * x.max(1.0));
            }
        }
    }
}
