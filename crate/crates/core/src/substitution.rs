//! The random substitution data model and its set-valued action.

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::word::{Letter, Word, WordSet};

/// Probability lists must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// An alphabet together with a finite, nonempty set of realisations per
/// letter. Realisations keep their input order (deduplicated), so that
/// probability lists and marginal selectors index them positionally.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSubstitution {
    alphabet: Vec<String>,
    rules: Vec<Vec<Word>>,
    probabilities: Option<Vec<Vec<f64>>>,
}

impl RandomSubstitution {
    /// Validates and builds a substitution. Duplicate realisations are
    /// dropped (keeping the first occurrence); the returned list holds one
    /// warning per dropped duplicate.
    pub fn with_warnings(
        alphabet: Vec<String>,
        rules: Vec<Vec<Word>>,
        probabilities: Option<Vec<Vec<f64>>>,
    ) -> Result<(Self, Vec<String>)> {
        if alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if alphabet.len() > u8::MAX as usize + 1 {
            return Err(Error::InvalidSpec(format!(
                "alphabet of {} letters exceeds the supported 256",
                alphabet.len()
            )));
        }
        for (i, t) in alphabet.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::InvalidSpec("empty letter token".into()));
            }
            if alphabet[..i].contains(t) {
                return Err(Error::DuplicateLetter(t.clone()));
            }
        }
        if rules.len() != alphabet.len() {
            return Err(Error::InvalidSpec(format!(
                "{} rule sets for {} letters",
                rules.len(),
                alphabet.len()
            )));
        }
        let d = alphabet.len();
        let mut warnings = Vec::new();
        let mut clean_rules = Vec::with_capacity(d);
        let mut clean_probs = probabilities.as_ref().map(|_| Vec::with_capacity(d));
        for (i, realisations) in rules.into_iter().enumerate() {
            if realisations.is_empty() {
                return Err(Error::EmptyRule(alphabet[i].clone()));
            }
            let probs = match &probabilities {
                Some(p) => {
                    let p = p.get(i).ok_or_else(|| Error::Probability {
                        letter: alphabet[i].clone(),
                        reason: "missing probability list".into(),
                    })?;
                    validate_probabilities(&alphabet[i], p, realisations.len())?;
                    Some(p)
                }
                None => None,
            };
            let mut kept: Vec<Word> = Vec::with_capacity(realisations.len());
            let mut kept_p: Vec<f64> = Vec::new();
            for (j, w) in realisations.into_iter().enumerate() {
                if w.is_empty() {
                    return Err(Error::InvalidSpec(format!(
                        "empty realisation for `{}`",
                        alphabet[i]
                    )));
                }
                if let Some(&x) = w.as_slice().iter().find(|&&x| x as usize >= d) {
                    return Err(Error::UnknownLetter(format!("#{x}")));
                }
                match kept.iter().position(|u| *u == w) {
                    Some(k) => {
                        warnings.push(format!(
                            "duplicate realisation for `{}` dropped",
                            alphabet[i]
                        ));
                        if let Some(p) = probs {
                            kept_p[k] += p[j];
                        }
                    }
                    None => {
                        kept.push(w);
                        if let Some(p) = probs {
                            kept_p.push(p[j]);
                        }
                    }
                }
            }
            clean_rules.push(kept);
            if let Some(cp) = clean_probs.as_mut() {
                cp.push(kept_p);
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok((
            RandomSubstitution {
                alphabet,
                rules: clean_rules,
                probabilities: clean_probs,
            },
            warnings,
        ))
    }

    pub fn new(
        alphabet: Vec<String>,
        rules: Vec<Vec<Word>>,
        probabilities: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        Self::with_warnings(alphabet, rules, probabilities).map(|(s, _)| s)
    }

    /// Builds a substitution over single-character tokens, e.g.
    /// `from_strs(&[("a", &["ab", "ba"]), ("b", &["a"])])`.
    pub fn from_strs(rules: &[(&str, &[&str])]) -> Result<Self> {
        let alphabet: Vec<String> = rules.iter().map(|(a, _)| a.to_string()).collect();
        let mut out = Vec::with_capacity(rules.len());
        for (_, images) in rules {
            let mut ws = Vec::with_capacity(images.len());
            for img in images.iter() {
                let mut v = Vec::with_capacity(img.len());
                for c in img.chars() {
                    let t = c.to_string();
                    let i = alphabet
                        .iter()
                        .position(|x| *x == t)
                        .ok_or(Error::UnknownLetter(t))?;
                    v.push(i as u8);
                }
                ws.push(Word::new(v));
            }
            out.push(ws);
        }
        Self::new(alphabet, out, None)
    }

    /// Alphabet size.
    pub fn size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.alphabet.len()).map(|i| Letter(i as u8))
    }

    pub fn letter(&self, token: &str) -> Option<Letter> {
        self.alphabet
            .iter()
            .position(|t| t == token)
            .map(|i| Letter(i as u8))
    }

    pub fn token(&self, a: Letter) -> &str {
        &self.alphabet[a.index()]
    }

    /// Realisations of `ϑ(a)` in input order.
    pub fn rules(&self, a: Letter) -> &[Word] {
        &self.rules[a.index()]
    }

    pub fn all_rules(&self) -> &[Vec<Word>] {
        &self.rules
    }

    pub fn probabilities(&self) -> Option<&[Vec<f64>]> {
        self.probabilities.as_deref()
    }

    pub fn is_deterministic(&self) -> bool {
        self.rules.iter().all(|r| r.len() == 1)
    }

    pub fn single_char_tokens(&self) -> bool {
        self.alphabet.iter().all(|t| t.chars().count() == 1)
    }

    pub fn min_image_len(&self) -> usize {
        self.rules.iter().flatten().map(Word::len).min().unwrap_or(0)
    }

    pub fn max_image_len(&self) -> usize {
        self.rules.iter().flatten().map(Word::len).max().unwrap_or(0)
    }

    /// Renders a word with this substitution's tokens.
    pub fn format_word(&self, w: &Word) -> String {
        let sep = if self.single_char_tokens() { "" } else { " " };
        w.letters()
            .map(|a| self.token(a))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Parses a word of single-character tokens, or whitespace-separated
    /// tokens for longer ones.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let tokens: Vec<String> = if self.single_char_tokens() && !s.contains(' ') {
            s.chars().map(|c| c.to_string()).collect()
        } else {
            s.split_whitespace().map(str::to_string).collect()
        };
        let mut v = Vec::with_capacity(tokens.len());
        for t in tokens {
            v.push(self.letter(&t).ok_or(Error::UnknownLetter(t))?.0);
        }
        Ok(Word::new(v))
    }

    /// `ϑ(u)`: all concatenations `v₁⋯v_n` with `vᵢ ∈ ϑ(uᵢ)`.
    pub fn apply_to_word(&self, u: &Word, budget: &Budget) -> Result<WordSet> {
        self.check_word(u)?;
        let factors: Vec<&[Word]> = u.letters().map(|a| self.rules(a)).collect();
        product(&factors, budget)
    }

    /// `ϑ^m(a)`, with `ϑ⁰(a) = {a}`.
    pub fn power_image(&self, a: Letter, m: usize, budget: &Budget) -> Result<WordSet> {
        if a.index() >= self.size() {
            return Err(Error::pre(format!("letter index {} outside alphabet", a.0)));
        }
        let mut images = PowerImages::new(self);
        for _ in 0..m {
            images.advance(budget)?;
        }
        Ok(images.current()[a.index()].clone())
    }

    /// The deterministic substitution picking realisation `selector[a]`
    /// for every letter `a`.
    pub fn marginal(&self, selector: &[usize]) -> Result<RandomSubstitution> {
        if selector.len() != self.size() {
            return Err(Error::pre(format!(
                "selector has {} entries for {} letters",
                selector.len(),
                self.size()
            )));
        }
        let mut rules = Vec::with_capacity(self.size());
        for (i, &j) in selector.iter().enumerate() {
            let r = &self.rules[i];
            let w = r.get(j).ok_or_else(|| Error::IndexOutOfRange {
                letter: self.alphabet[i].clone(),
                index: j,
                len: r.len(),
            })?;
            rules.push(vec![w.clone()]);
        }
        RandomSubstitution::new(self.alphabet.clone(), rules, None)
    }

    /// `M[a][b] = |s|_a` for the realisations `s ∈ ϑ(b)`, defined when
    /// the substitution is compatible.
    pub fn substitution_matrix(&self) -> Option<Vec<Vec<u64>>> {
        let d = self.size();
        let mut m = vec![vec![0u64; d]; d];
        for (b, rs) in self.rules.iter().enumerate() {
            let p = rs[0].parikh(d);
            if rs.iter().any(|s| s.parikh(d) != p) {
                return None;
            }
            for a in 0..d {
                m[a][b] = p[a] as u64;
            }
        }
        Some(m)
    }

    fn check_word(&self, u: &Word) -> Result<()> {
        match u.as_slice().iter().find(|&&x| x as usize >= self.size()) {
            Some(x) => Err(Error::UnknownLetter(format!("#{x}"))),
            None => Ok(()),
        }
    }
}

fn validate_probabilities(letter: &str, p: &[f64], arity: usize) -> Result<()> {
    let err = |reason: String| Error::Probability {
        letter: letter.to_string(),
        reason,
    };
    if p.len() != arity {
        return Err(err(format!("{} entries for {} realisations", p.len(), arity)));
    }
    if let Some(x) = p.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
        return Err(err(format!("entry {x} outside (0,1]")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(err(format!("entries sum to {s}")));
    }
    Ok(())
}

/// Concatenation product of a sequence of word lists, deduplicated.
pub(crate) fn product(factors: &[&[Word]], budget: &Budget) -> Result<WordSet> {
    let mut acc: Vec<Vec<u8>> = vec![Vec::new()];
    for f in factors {
        let bound = acc.len().saturating_mul(f.len());
        let len = acc.first().map_or(0, Vec::len) + f.iter().map(Word::len).max().unwrap_or(0);
        budget.check("word product", bound, bound.saturating_mul(len))?;
        let mut next = Vec::with_capacity(bound);
        for prefix in &acc {
            for w in f.iter() {
                let mut v = Vec::with_capacity(prefix.len() + w.len());
                v.extend_from_slice(prefix);
                v.extend_from_slice(w.as_slice());
                next.push(v);
            }
        }
        if f.len() > 1 {
            next.sort_unstable();
            next.dedup();
        }
        acc = next;
    }
    Ok(WordSet::from_words(acc.into_iter().map(Word::new).collect()))
}

/// Depth-by-depth images `ϑ^m(a)` for every letter, computed through
/// `ϑ^m(a) = ⋃_{s ∈ ϑ(a)} ϑ^{m−1}(s₁)⋯ϑ^{m−1}(s_k)`.
pub struct PowerImages<'a> {
    sub: &'a RandomSubstitution,
    depth: usize,
    images: Vec<WordSet>,
}

impl<'a> PowerImages<'a> {
    pub fn new(sub: &'a RandomSubstitution) -> Self {
        let images = sub.letters().map(|a| WordSet::singleton(Word::single(a))).collect();
        PowerImages {
            sub,
            depth: 0,
            images,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn current(&self) -> &[WordSet] {
        &self.images
    }

    pub fn advance(&mut self, budget: &Budget) -> Result<()> {
        let mut next = Vec::with_capacity(self.images.len());
        let mut total_words = 0usize;
        let mut total_bytes = 0usize;
        for a in self.sub.letters() {
            let mut words = Vec::new();
            for s in self.sub.rules(a) {
                let factors: Vec<&[Word]> =
                    s.letters().map(|b| self.images[b.index()].as_slice()).collect();
                let part = product(&factors, budget)?;
                total_words += part.len();
                total_bytes += part.total_len();
                budget.check("power image", total_words, total_bytes)?;
                words.extend(part.into_vec());
            }
            next.push(WordSet::from_words(words));
        }
        self.images = next;
        self.depth += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> RandomSubstitution {
        RandomSubstitution::from_strs(&[("a", &["ab", "ba"]), ("b", &["a"])]).unwrap()
    }

    fn strs(sub: &RandomSubstitution, set: &WordSet) -> Vec<String> {
        set.iter().map(|w| sub.format_word(w)).collect()
    }

    #[test]
    fn apply_to_word_expands_products() {
        let s = fib();
        let u = s.parse_word("ab").unwrap();
        let img = s.apply_to_word(&u, &Budget::default()).unwrap();
        assert_eq!(strs(&s, &img), ["aba", "baa"]);

        let ex42 = RandomSubstitution::from_strs(&[("a", &["aa", "bb"]), ("b", &["aa"])]).unwrap();
        let u = ex42.parse_word("ab").unwrap();
        let img = ex42.apply_to_word(&u, &Budget::default()).unwrap();
        assert_eq!(strs(&ex42, &img), ["aaaa", "bbaa"]);
    }

    #[test]
    fn power_image_small_cases() {
        let s = fib();
        let a = s.letter("a").unwrap();
        let img = s.power_image(a, 2, &Budget::default()).unwrap();
        assert_eq!(strs(&s, &img), ["aab", "aba", "baa"]);
        let zero = s.power_image(a, 0, &Budget::default()).unwrap();
        assert_eq!(strs(&s, &zero), ["a"]);

        let t2 = RandomSubstitution::from_strs(&[("a", &["aa", "ab"]), ("b", &["ba"])]).unwrap();
        let img = t2.power_image(Letter(0), 2, &Budget::default()).unwrap();
        let mut expect = vec!["aaaa", "aaab", "abaa", "abab", "aaba", "abba"];
        expect.sort();
        assert_eq!(strs(&t2, &img), expect);
    }

    #[test]
    fn budget_is_enforced() {
        let s = fib();
        let err = s.power_image(Letter(0), 12, &Budget::words(50)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn marginal_selects_by_index() {
        let s = fib();
        let m = s.marginal(&[0, 0]).unwrap();
        assert!(m.is_deterministic());
        assert_eq!(s.format_word(&m.rules(Letter(0))[0]), "ab");
        assert!(matches!(
            s.marginal(&[2, 0]),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn duplicates_are_dropped_with_warning() {
        let w = |v: &[u8]| Word::new(v.to_vec());
        let (s, warnings) = RandomSubstitution::with_warnings(
            vec!["a".into()],
            vec![vec![w(&[0]), w(&[0, 0]), w(&[0])]],
            Some(vec![vec![0.25, 0.5, 0.25]]),
        )
        .unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(s.rules(Letter(0)).len(), 2);
        assert_eq!(s.probabilities().unwrap()[0], vec![0.5, 0.5]);
    }

    #[test]
    fn probability_violations_are_rejected() {
        let w = |v: &[u8]| Word::new(v.to_vec());
        let bad_sum = RandomSubstitution::new(
            vec!["a".into()],
            vec![vec![w(&[0]), w(&[0, 0])]],
            Some(vec![vec![0.5, 0.6]]),
        );
        assert!(matches!(bad_sum, Err(Error::Probability { .. })));
        let bad_arity = RandomSubstitution::new(
            vec!["a".into()],
            vec![vec![w(&[0]), w(&[0, 0])]],
            Some(vec![vec![1.0]]),
        );
        assert!(matches!(bad_arity, Err(Error::Probability { .. })));
    }

    #[test]
    fn substitution_matrix_requires_compatibility() {
        let m = fib().substitution_matrix().unwrap();
        assert_eq!(m, vec![vec![1, 1], vec![1, 0]]);
        let t2 = RandomSubstitution::from_strs(&[("a", &["aa", "ab"]), ("b", &["ba"])]).unwrap();
        assert!(t2.substitution_matrix().is_none());
    }
}
