//! Structural predicates and the zero-entropy classifier.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::language::Language;
use crate::substitution::{PowerImages, RandomSubstitution};
use crate::word::{Letter, Word, WordSet};

/// `M[a][b]`: letter `a` occurs in some realisation of `ϑ(b)`.
pub fn occurrence_matrix(sub: &RandomSubstitution) -> Vec<Vec<bool>> {
    let d = sub.size();
    let mut m = vec![vec![false; d]; d];
    for b in sub.letters() {
        for s in sub.rules(b) {
            for a in s.letters() {
                m[a.index()][b.index()] = true;
            }
        }
    }
    m
}

fn bool_product(x: &[Vec<bool>], y: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let d = x.len();
    let mut out = vec![vec![false; d]; d];
    for i in 0..d {
        for k in 0..d {
            if x[i][k] {
                for j in 0..d {
                    out[i][j] |= y[k][j];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitivity {
    pub primitive: bool,
    /// Smallest `k` with `M^k` all true.
    pub exponent: Option<usize>,
    /// Pairs `(a, b)` such that `b` occurs in no realisation of any
    /// `ϑ^k(a)`. Empty exactly when the occurrence graph is strongly
    /// connected.
    pub unreachable: Vec<(Letter, Letter)>,
}

/// Boolean primitivity of the occurrence matrix, searching powers up to
/// the Wielandt bound `(d − 1)² + 1`.
pub fn is_primitive(sub: &RandomSubstitution) -> Primitivity {
    let m = occurrence_matrix(sub);
    let d = m.len();
    let bound = (d - 1) * (d - 1) + 1;
    let mut power = m.clone();
    let mut exponent = None;
    for k in 1..=bound {
        if power.iter().flatten().all(|&x| x) {
            exponent = Some(k);
            break;
        }
        power = bool_product(&power, &m);
    }
    // reachability closure for the diagnostic
    let mut reach = m.clone();
    for k in 0..d {
        for i in 0..d {
            if reach[i][k] {
                for j in 0..d {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut unreachable = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if !reach[b][a] {
                unreachable.push((Letter(a as u8), Letter(b as u8)));
            }
        }
    }
    Primitivity {
        primitive: exponent.is_some(),
        exponent,
        unreachable,
    }
}

/// Letters `a`, realisations `u, v ∈ ϑ(a)` and a letter `b` with
/// `|u|_b ≠ |v|_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncompatibilityWitness {
    pub letter: Letter,
    pub u: Word,
    pub v: Word,
    pub count_letter: Letter,
}

pub fn is_compatible(sub: &RandomSubstitution) -> std::result::Result<(), IncompatibilityWitness> {
    let d = sub.size();
    for a in sub.letters() {
        let rs = sub.rules(a);
        for i in 0..rs.len() {
            for j in (i + 1)..rs.len() {
                let (pu, pv) = (rs[i].parikh(d), rs[j].parikh(d));
                // prefer a letter present in only one of the two
                let b = (0..d)
                    .find(|&b| (pu[b] == 0) != (pv[b] == 0))
                    .or_else(|| (0..d).find(|&b| pu[b] != pv[b]));
                if let Some(b) = b {
                    return Err(IncompatibilityWitness {
                        letter: a,
                        u: rs[i].clone(),
                        v: rs[j].clone(),
                        count_letter: Letter(b as u8),
                    });
                }
            }
        }
    }
    Ok(())
}

/// `ℓ ≥ 2` when every realisation has length `ℓ`.
pub fn constant_length(sub: &RandomSubstitution) -> Option<usize> {
    let l = sub.min_image_len();
    (l >= 2 && sub.max_image_len() == l).then_some(l)
}

#[derive(Debug, Clone, PartialEq)]
pub enum UrpStatus {
    /// Compatible or constant length, which forces unique realisation paths.
    ProvedByLemma { compatible: bool, constant_length: bool },
    /// Injectivity checked for legal words up to `max_word_len` at powers
    /// up to `max_power`.
    VerifiedUpTo { max_power: usize, max_word_len: usize },
    Counterexample {
        word: Word,
        power: usize,
        first: Vec<Word>,
        second: Vec<Word>,
    },
}

impl UrpStatus {
    pub fn is_proved(&self) -> bool {
        matches!(self, UrpStatus::ProvedByLemma { .. })
    }
}

/// Unique realisation paths: for every legal `v`, distinct tuples
/// `(w₁,…,w_{|v|})` with `wᵢ ∈ ϑ^k(vᵢ)` concatenate to distinct words.
pub fn unique_realisation_paths(
    sub: &RandomSubstitution,
    max_power: usize,
    max_word_len: usize,
    budget: &Budget,
) -> Result<UrpStatus> {
    if max_power == 0 || max_word_len < 2 {
        return Err(Error::pre("unique realisation paths need k ≥ 1 and L ≥ 2"));
    }
    let compatible = is_compatible(sub).is_ok();
    let constant = constant_length(sub).is_some();
    if compatible || constant {
        return Ok(UrpStatus::ProvedByLemma {
            compatible,
            constant_length: constant,
        });
    }
    let mut lang = Language::new(sub, *budget);
    let mut images = PowerImages::new(sub);
    for k in 1..=max_power {
        images.advance(budget)?;
        let levels = images.current();
        for len in 2..=max_word_len {
            for v in lang.legal_words(len)?.iter() {
                if let Some((first, second)) = collision(v, levels, budget)? {
                    return Ok(UrpStatus::Counterexample {
                        word: v.clone(),
                        power: k,
                        first,
                        second,
                    });
                }
            }
        }
    }
    Ok(UrpStatus::VerifiedUpTo {
        max_power,
        max_word_len,
    })
}

/// Two distinct realisation tuples of `v` with equal concatenation.
fn collision(
    v: &Word,
    levels: &[WordSet],
    budget: &Budget,
) -> Result<Option<(Vec<Word>, Vec<Word>)>> {
    let lists: Vec<&[Word]> = v.letters().map(|a| levels[a.index()].as_slice()).collect();
    let total = lists
        .iter()
        .try_fold(1usize, |acc, l| acc.checked_mul(l.len()))
        .unwrap_or(usize::MAX);
    budget.check("realisation tuples", total, 0)?;
    let mut seen: std::collections::HashMap<Vec<u8>, Vec<usize>> = Default::default();
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut w = Vec::new();
        for (l, &i) in lists.iter().zip(&idx) {
            w.extend_from_slice(l[i].as_slice());
        }
        if let Some(prev) = seen.get(&w) {
            let tuple = |ix: &[usize]| ix.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect();
            return Ok(Some((tuple(prev), tuple(&idx))));
        }
        seen.insert(w, idx.clone());
        let mut p = lists.len();
        loop {
            if p == 0 {
                return Ok(None);
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < lists[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// `u` is both a prefix and a suffix of `v`.
pub fn is_strong_affix(u: &Word, v: &Word) -> Result<bool> {
    if u.len() > v.len() {
        return Err(Error::pre("strong affix test needs |u| ≤ |v|"));
    }
    Ok(u.is_prefix_of(v) && u.is_suffix_of(v))
}

/// Realisations `u, v ∈ ϑ^m(a)` with `|u| ≤ |v|` and `u` not a strong
/// affix of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingPair {
    pub power: usize,
    pub letter: Letter,
    pub u: Word,
    pub v: Word,
}

/// Searches powers `1..=max_power`, letters in alphabet order. At power one
/// realisations are scanned in rule order, at higher powers in canonical
/// order.
pub fn find_splitting_pair(
    sub: &RandomSubstitution,
    max_power: usize,
    budget: &Budget,
) -> Result<Option<SplittingPair>> {
    if max_power == 0 {
        return Err(Error::pre("splitting pair search needs M ≥ 1"));
    }
    let mut images = PowerImages::new(sub);
    for m in 1..=max_power {
        images.advance(budget)?;
        for a in sub.letters() {
            let list: &[Word] = if m == 1 {
                sub.rules(a)
            } else {
                images.current()[a.index()].as_slice()
            };
            if let Some((u, v)) = splitting_in(list) {
                return Ok(Some(SplittingPair {
                    power: m,
                    letter: a,
                    u,
                    v,
                }));
            }
        }
    }
    Ok(None)
}

fn splitting_in(list: &[Word]) -> Option<(Word, Word)> {
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            let (u, v) = if list[j].len() < list[i].len() {
                (&list[j], &list[i])
            } else {
                (&list[i], &list[j])
            };
            if !(u.is_prefix_of(v) && u.is_suffix_of(v)) {
                return Some((u.clone(), v.clone()));
            }
        }
    }
    None
}

/// The deterministic substitution sending each letter to its unique
/// longest realisation.
pub fn longest_marginal(sub: &RandomSubstitution) -> Result<RandomSubstitution> {
    let mut selector = Vec::with_capacity(sub.size());
    for a in sub.letters() {
        let rs = sub.rules(a);
        let max = rs.iter().map(Word::len).max().unwrap_or(0);
        let longest: Vec<usize> = (0..rs.len()).filter(|&i| rs[i].len() == max).collect();
        if longest.len() > 1 {
            return Err(Error::LengthTie(sub.token(a).to_string()));
        }
        selector.push(longest[0]);
    }
    sub.marginal(&selector)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    PositiveEntropy,
    ZeroEntropyDeterministic,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PositiveEntropy => "positive-entropy",
            Verdict::ZeroEntropyDeterministic => "zero-entropy-deterministic",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    SplittingPair(SplittingPair),
    /// Unique realisation paths are proved and `letter` has several
    /// realisations.
    UniquePaths { letter: Letter, urp: UrpStatus },
    Marginal {
        marginal: RandomSubstitution,
        verified_depth: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Further certificates agreeing with the verdict.
    pub supporting: Vec<Witness>,
    pub max_power_searched: usize,
    pub language_depth: usize,
    pub diagnostics: Vec<String>,
}

/// Positive entropy from a splitting pair or from unique realisation paths
/// with a letter of several realisations; otherwise zero entropy when the
/// longest marginal has the same legal words up to length `depth`.
pub fn classify_entropy(
    sub: &RandomSubstitution,
    max_power: usize,
    depth: usize,
    budget: &Budget,
) -> Result<ClassificationReport> {
    if !is_primitive(sub).primitive {
        return Err(Error::pre("classification needs a primitive substitution"));
    }
    if depth == 0 {
        return Err(Error::pre("language depth must be ≥ 1"));
    }
    let mut report = ClassificationReport {
        verdict: Verdict::Inconclusive,
        witness: None,
        supporting: Vec::new(),
        max_power_searched: max_power,
        language_depth: depth,
        diagnostics: Vec::new(),
    };
    let pair = find_splitting_pair(sub, max_power, budget)?;
    let unique_paths = {
        let compatible = is_compatible(sub).is_ok();
        let constant = constant_length(sub).is_some();
        (compatible || constant).then_some(UrpStatus::ProvedByLemma {
            compatible,
            constant_length: constant,
        })
    };
    let branching = sub.letters().find(|&b| sub.rules(b).len() >= 2);
    let urp_witness = match (unique_paths, branching) {
        (Some(urp), Some(letter)) => Some(Witness::UniquePaths { letter, urp }),
        _ => None,
    };

    if let Some(p) = pair {
        report.verdict = Verdict::PositiveEntropy;
        report.witness = Some(Witness::SplittingPair(p));
        report.supporting.extend(urp_witness);
        return Ok(report);
    }
    report
        .diagnostics
        .push(format!("no splitting pair at powers 1..={max_power}"));
    if let Some(w) = urp_witness {
        report.verdict = Verdict::PositiveEntropy;
        report.witness = Some(w);
        return Ok(report);
    }
    let marginal = match longest_marginal(sub) {
        Ok(m) => m,
        Err(e) => {
            report.diagnostics.push(format!("longest marginal: {e}"));
            return Ok(report);
        }
    };
    let mut mine = Language::new(sub, *budget);
    let mut theirs = Language::new(&marginal, *budget);
    for j in 1..=depth {
        if mine.legal_words(j)? != theirs.legal_words(j)? {
            report
                .diagnostics
                .push(format!("legal words of length {j} differ from the longest marginal"));
            return Ok(report);
        }
    }
    report.verdict = Verdict::ZeroEntropyDeterministic;
    report.witness = Some(Witness::Marginal {
        marginal,
        verified_depth: depth,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn w(sub: &RandomSubstitution, s: &str) -> Word {
        sub.parse_word(s).unwrap()
    }

    /// Reachability by materialising `ϑ^k(b)` and scanning for letters.
    fn primitive_by_images(sub: &RandomSubstitution, k: usize) -> bool {
        let mut images = PowerImages::new(sub);
        for _ in 0..k {
            images.advance(&Budget::default()).unwrap();
        }
        images.current().iter().all(|set| {
            sub.letters()
                .all(|a| set.iter().any(|x| x.contains_letter(a)))
        })
    }

    #[test]
    fn primitivity_examples() {
        let p = is_primitive(&bundled::get("log_series").unwrap());
        // `ba` already contains both letters, so one step suffices
        assert_eq!((p.primitive, p.exponent), (true, Some(1)));
        let p = is_primitive(&bundled::get("random_fibonacci").unwrap());
        assert_eq!((p.primitive, p.exponent), (true, Some(2)));
        let p = is_primitive(&bundled::get("cyclic_abc").unwrap());
        assert_eq!((p.primitive, p.exponent), (true, Some(1)));
        let p = is_primitive(&bundled::get("triple_bba_abb").unwrap());
        assert!(!p.primitive);
        assert_eq!(p.unreachable, vec![(Letter(0), Letter(1))]);
    }

    #[test]
    fn primitivity_matches_image_search() {
        for (name, sub) in bundled::all() {
            let p = is_primitive(&sub);
            for k in 1..=4 {
                let direct = primitive_by_images(&sub, k);
                let by_matrix = p.exponent.is_some_and(|e| e <= k);
                assert_eq!(direct, by_matrix, "{name} k={k}");
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        assert!(is_compatible(&bundled::get("random_fibonacci").unwrap()).is_ok());
        let s = bundled::get("log_series").unwrap();
        let wit = is_compatible(&s).unwrap_err();
        assert_eq!(wit.letter, Letter(0));
        assert_eq!((wit.u, wit.v), (w(&s, "aa"), w(&s, "ab")));
        assert_eq!(wit.count_letter, Letter(1));
        assert!(is_compatible(&bundled::get("cyclic_abc").unwrap()).is_ok());
    }

    #[test]
    fn constant_length_examples() {
        assert_eq!(constant_length(&bundled::get("log_series").unwrap()), Some(2));
        assert_eq!(constant_length(&bundled::get("random_fibonacci").unwrap()), None);
        assert_eq!(constant_length(&bundled::get("triple_bba_abb").unwrap()), Some(3));
        let id = RandomSubstitution::from_strs(&[("a", &["a"])]).unwrap();
        assert_eq!(constant_length(&id), None);
    }

    #[test]
    fn unique_paths_examples() {
        let b = Budget::default();
        assert!(unique_realisation_paths(&bundled::get("log_series").unwrap(), 2, 4, &b)
            .unwrap()
            .is_proved());
        assert!(matches!(
            unique_realisation_paths(&bundled::get("random_fibonacci").unwrap(), 2, 4, &b).unwrap(),
            UrpStatus::ProvedByLemma { compatible: true, .. }
        ));
        let s = RandomSubstitution::from_strs(&[("a", &["a", "aa"]), ("b", &["b"])]).unwrap();
        match unique_realisation_paths(&s, 1, 2, &b).unwrap() {
            UrpStatus::Counterexample { word, power, first, second } => {
                assert_eq!(word, w(&s, "aa"));
                assert_eq!(power, 1);
                assert_ne!(first, second);
                let cat = |t: &[Word]| t.iter().fold(Word::new(vec![]), |x, y| x.concat(y));
                assert_eq!(cat(&first), w(&s, "aaa"));
                assert_eq!(cat(&second), w(&s, "aaa"));
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn strong_affix_examples() {
        let s = bundled::get("random_fibonacci").unwrap();
        assert!(is_strong_affix(&w(&s, "a"), &w(&s, "aba")).unwrap());
        assert!(!is_strong_affix(&w(&s, "ab"), &w(&s, "ba")).unwrap());
        assert!(is_strong_affix(&w(&s, "ab"), &w(&s, "ab")).unwrap());
        assert!(is_strong_affix(&w(&s, "aba"), &w(&s, "a")).is_err());
    }

    #[test]
    fn splitting_pair_examples() {
        let b = Budget::default();
        let s = bundled::get("random_fibonacci").unwrap();
        let p = find_splitting_pair(&s, 1, &b).unwrap().unwrap();
        assert_eq!((p.power, p.letter), (1, Letter(0)));
        assert_eq!((p.u, p.v), (w(&s, "ab"), w(&s, "ba")));
        let s = bundled::get("finite_subshift").unwrap();
        assert_eq!(find_splitting_pair(&s, 3, &b).unwrap(), None);
        let s = bundled::get("triple_bba_abb").unwrap();
        let p = find_splitting_pair(&s, 1, &b).unwrap().unwrap();
        assert_eq!((p.letter, p.u, p.v), (Letter(1), w(&s, "bba"), w(&s, "abb")));
    }

    #[test]
    fn absent_pair_means_affix_chains() {
        let s = bundled::get("finite_subshift").unwrap();
        let mut images = PowerImages::new(&s);
        for _ in 0..3 {
            images.advance(&Budget::default()).unwrap();
            for set in images.current() {
                for u in set.iter() {
                    for v in set.iter() {
                        if u.len() <= v.len() {
                            assert!(is_strong_affix(u, v).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn longest_marginal_examples() {
        let s = bundled::get("finite_subshift").unwrap();
        let m = longest_marginal(&s).unwrap();
        assert_eq!(m.rules(Letter(0)), &[w(&s, "aba")]);
        assert_eq!(m.rules(Letter(1)), &[w(&s, "bab")]);
        for a in s.letters() {
            for r in s.rules(a) {
                assert!(r.is_factor_of(&m.rules(a)[0]));
            }
        }
        let c = bundled::get("cyclic_abc").unwrap();
        assert_eq!(longest_marginal(&c).unwrap(), c);
        assert_eq!(
            longest_marginal(&bundled::get("random_fibonacci").unwrap()).unwrap_err(),
            Error::LengthTie("a".into())
        );
    }

    #[test]
    fn classification_examples() {
        let b = Budget::default();
        let r = classify_entropy(&bundled::get("random_fibonacci").unwrap(), 3, 12, &b).unwrap();
        assert_eq!(r.verdict, Verdict::PositiveEntropy);
        assert!(matches!(r.witness, Some(Witness::SplittingPair(SplittingPair { power: 1, .. }))));

        let s = bundled::get("finite_subshift").unwrap();
        let r = classify_entropy(&s, 3, 12, &b).unwrap();
        assert_eq!(r.verdict, Verdict::ZeroEntropyDeterministic);
        match r.witness {
            Some(Witness::Marginal { marginal, verified_depth }) => {
                assert_eq!(verified_depth, 12);
                assert_eq!(marginal, longest_marginal(&s).unwrap());
            }
            other => panic!("{other:?}"),
        }

        let r = classify_entropy(&bundled::get("log_series").unwrap(), 3, 12, &b).unwrap();
        assert_eq!(r.verdict, Verdict::PositiveEntropy);
        assert!(r
            .supporting
            .iter()
            .any(|x| matches!(x, Witness::UniquePaths { letter: Letter(0), .. })));

        let r = classify_entropy(&bundled::get("cyclic_abc").unwrap(), 3, 8, &b).unwrap();
        assert_eq!(r.verdict, Verdict::ZeroEntropyDeterministic);

        assert!(matches!(
            classify_entropy(&bundled::get("triple_bba_abb").unwrap(), 3, 8, &b),
            Err(Error::Precondition(_))
        ));
    }
}
