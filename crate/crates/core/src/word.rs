//! Words over an indexed alphabet.
//!
//! Letters are stored as their position in the alphabet, so the canonical
//! order on words is the lexicographic order on index sequences.

use std::fmt;

/// Index of a letter in its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word, stored as letter indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn single(a: Letter) -> Self {
        Word(vec![a.0])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.0.iter().map(|&i| Letter(i))
    }

    /// `|u|_a`
    pub fn count(&self, a: Letter) -> usize {
        self.0.iter().filter(|&&x| x == a.0).count()
    }

    /// Per-letter occurrence counts over an alphabet of size `d`.
    pub fn parikh(&self, d: usize) -> Vec<usize> {
        let mut v = vec![0; d];
        for &x in &self.0 {
            v[x as usize] += 1;
        }
        v
    }

    pub fn contains_letter(&self, a: Letter) -> bool {
        self.0.contains(&a.0)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.ends_with(&self.0)
    }

    /// True if `self` occurs as a contiguous subword of `other`.
    pub fn is_factor_of(&self, other: &Word) -> bool {
        if self.is_empty() {
            return true;
        }
        other.0.windows(self.len()).any(|w| w == self.0.as_slice())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Subword `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

/// Deduplicated set of words in canonical (lexicographic) order.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct WordSet {
    words: Vec<Word>,
    common_len: Option<usize>,
}

impl WordSet {
    pub fn new() -> Self {
        WordSet::default()
    }

    /// Sorts and deduplicates.
    pub fn from_words(mut words: Vec<Word>) -> Self {
        words.sort_unstable();
        words.dedup();
        Self::from_sorted_unchecked(words)
    }

    pub(crate) fn from_sorted_unchecked(words: Vec<Word>) -> Self {
        let common_len = match words.first() {
            Some(w) if words.iter().all(|u| u.len() == w.len()) => Some(w.len()),
            _ => None,
        };
        WordSet { words, common_len }
    }

    pub fn singleton(w: Word) -> Self {
        let n = w.len();
        WordSet {
            words: vec![w],
            common_len: Some(n),
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.words.iter()
    }

    pub fn as_slice(&self) -> &[Word] {
        &self.words
    }

    pub fn into_vec(self) -> Vec<Word> {
        self.words
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    /// Common length of all members, when it exists.
    pub fn common_len(&self) -> Option<usize> {
        self.common_len
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.words.iter().all(|w| other.contains(w))
    }

    pub fn is_disjoint(&self, other: &WordSet) -> bool {
        self.words.iter().all(|w| !other.contains(w))
    }

    /// Sum of word lengths, used for byte budgeting.
    pub fn total_len(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }

    pub fn union(&self, other: &WordSet) -> WordSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend(self.words.iter().cloned());
        v.extend(other.words.iter().cloned());
        WordSet::from_words(v)
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a Word;
    type IntoIter = std::slice::Iter<'a, Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.words.iter()
    }
}

impl FromIterator<Word> for WordSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        WordSet::from_words(iter.into_iter().collect())
    }
}
