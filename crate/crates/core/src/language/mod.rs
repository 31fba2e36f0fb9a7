//! Legal words, subshift language slices and complexity tables.
//!
//! Legal words of length `n` are computed exactly by a closure recursion.
//! A window of length `n` inside `ϑ(x)` overlaps at most
//! `r(n) = min(n, 2 + ⌊(n − 2)/ℓ_min⌋)` consecutive images, so
//!
//! ```text
//! L^n = Fact_n( ϑ(L^{r(n)}) ∪ ϑ(Short_{<r(n)}) )
//! ```
//!
//! where `Short_{<r}` holds the letters and every full realisation of some
//! `ϑ^k(a)` shorter than `r`. When `r(n) = n` the right-hand side refers
//! to `L^n` itself and the least fixpoint is reached by iteration.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::runs::{self, Encoded, Runs};
use crate::substitution::{PowerImages, RandomSubstitution};
use crate::word::{Letter, Word, WordSet};

/// Sources expanded per merge of window candidates.
const CHUNK: usize = 4096;

mod count;

/// Above this many window candidates, counts of constant-length languages
/// are computed by parse counting instead of materialising `L^n`.
const COUNT_BY_PARSES_ABOVE: f64 = 4.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageMode {
    Legal,
    Subshift,
}

impl std::str::FromStr for LanguageMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "legal" => Ok(LanguageMode::Legal),
            "subshift" => Ok(LanguageMode::Subshift),
            _ => Err(Error::pre(format!("unknown language mode `{s}`"))),
        }
    }
}

/// How complete an enumerated language slice is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Completeness {
    /// Closure recursion; the slice is exactly `L^n`.
    Exact,
    /// Generation accumulation stopped after the stability window.
    Stabilized { generations: usize },
    /// Generation accumulation hit the generation cap or the budget.
    BudgetCapped { generations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageSlice {
    pub words: WordSet,
    pub completeness: Completeness,
}

/// Default extendability margin `max(8, ⌈n/2⌉)`.
pub fn default_margin(n: usize) -> usize {
    8.max(n.div_ceil(2))
}

type FactorSet = Vec<Encoded>;

/// Approximate heap footprint of a stored word: the payload, its box
/// pointer and allocator overhead.
fn footprint(e: &Encoded) -> usize {
    e.len() + 32
}

/// Memoised exact language enumeration for one substitution.
pub struct Language<'a> {
    sub: &'a RandomSubstitution,
    budget: Budget,
    image_runs: Vec<Vec<Runs>>,
    min_len: usize,
    legal: HashMap<usize, Arc<FactorSet>>,
}

impl<'a> Language<'a> {
    pub fn new(sub: &'a RandomSubstitution, budget: Budget) -> Self {
        let image_runs = sub
            .letters()
            .map(|a| sub.rules(a).iter().map(|w| runs::runs_of(w.as_slice())).collect())
            .collect();
        Language {
            sub,
            budget,
            image_runs,
            min_len: sub.min_image_len().max(1),
            legal: HashMap::new(),
        }
    }

    pub fn substitution(&self) -> &RandomSubstitution {
        self.sub
    }

    /// Largest number of consecutive images a window of length `n` meets.
    pub fn cover_len(&self, n: usize) -> usize {
        if n <= 1 {
            return 1;
        }
        n.min(2 + (n - 2) / self.min_len)
    }

    /// `#L^n_ϑ`.
    pub fn legal_count(&mut self, n: usize) -> Result<usize> {
        if let Some(s) = self.legal.get(&n) {
            return Ok(s.len());
        }
        if let Some(ell) = self.constant_len() {
            if n > ell && self.candidate_estimate(n)? > COUNT_BY_PARSES_ABOVE {
                return self.legal_count_by_parses(n);
            }
        }
        Ok(self.legal_set(n)?.len())
    }

    /// `#L^n_ϑ` by counting least parses, for constant length `ℓ` and
    /// `n > ℓ`. Memory stays proportional to `#L^{⌈n/ℓ⌉+1}`.
    pub fn legal_count_by_parses(&mut self, n: usize) -> Result<usize> {
        let ell = self
            .constant_len()
            .ok_or_else(|| Error::pre("parse counting needs constant length"))?;
        if n <= ell {
            return Err(Error::pre("parse counting needs n > ℓ"));
        }
        let mut legal = Vec::with_capacity(ell);
        for o in 0..ell {
            let t = (o + n).div_ceil(ell);
            let set = self.legal_set(t)?;
            legal.push(set.iter().map(|e| runs::decode_letters(e)).collect());
        }
        let total = count::WindowCounter::new(self.sub.all_rules(), ell, n, legal).count();
        usize::try_from(total).map_err(|_| Error::budget("language count", usize::MAX))
    }

    fn constant_len(&self) -> Option<usize> {
        let ell = self.sub.min_image_len();
        (ell >= 2 && self.sub.max_image_len() == ell).then_some(ell)
    }

    /// Number of windows the closure step for `L^n` would generate.
    fn candidate_estimate(&mut self, n: usize) -> Result<f64> {
        let r = self.cover_len(n);
        if r >= n {
            return Ok(0.0);
        }
        let base = self.legal_set(r)?;
        let ell = self.min_len;
        let per = (ell * r + 1).saturating_sub(n) as f64;
        let mut total = 0.0;
        for e in base.iter() {
            let mut prod = 1.0;
            for (x, k) in runs::decode_runs(e) {
                prod *= (self.image_runs[x as usize].len() as f64).powi(k as i32);
            }
            total += prod * per;
        }
        Ok(total)
    }

    /// `L^n_ϑ` in canonical order.
    pub fn legal_words(&mut self, n: usize) -> Result<WordSet> {
        let set = self.legal_set(n)?;
        Ok(decode_set(&set))
    }

    /// Words of length `n` that sit at offset `margin` inside some legal
    /// word of length `n + 2·margin`.
    pub fn subshift_words(&mut self, n: usize, margin: usize) -> Result<WordSet> {
        Ok(decode_set(&self.subshift_set(n, margin)?))
    }

    pub fn subshift_count(&mut self, n: usize, margin: usize) -> Result<usize> {
        Ok(self.subshift_set(n, margin)?.len())
    }

    fn subshift_set(&mut self, n: usize, margin: usize) -> Result<FactorSet> {
        if n == 0 {
            return Err(Error::pre("language slices need n ≥ 1"));
        }
        let outer = self.legal_set(n + 2 * margin)?;
        let mut mids: FactorSet = outer
            .par_iter()
            .map(|enc| {
                let letters = runs::decode_letters(enc);
                runs::encode_letters(&letters[margin..margin + n])
            })
            .collect();
        mids.par_sort_unstable();
        mids.dedup();
        Ok(mids)
    }

    fn legal_set(&mut self, n: usize) -> Result<Arc<FactorSet>> {
        if n == 0 {
            return Err(Error::pre("language slices need n ≥ 1"));
        }
        if let Some(s) = self.legal.get(&n) {
            return Ok(s.clone());
        }
        let r = self.cover_len(n);
        let set = if r < n {
            let short = self.short_words(r)?;
            let set = self.windows_of(short.iter().map(Vec::as_slice), n)?;
            let base = self.legal_set(r)?;
            let decoded: Vec<Vec<u8>> = base.iter().map(|e| runs::decode_letters(e)).collect();
            let more = self.windows_of(decoded.iter().map(Vec::as_slice), n)?;
            merge(set, more)
        } else {
            self.anchored_closure(n)?
        };
        let bytes: usize = set.iter().map(footprint).sum();
        self.budget.check("language slice", set.len(), bytes)?;
        let set = Arc::new(set);
        self.legal.insert(n, set.clone());
        Ok(set)
    }

    /// `L^n` when a window can meet `n` images (short images, or `n ≤ 2`).
    /// Every legal word of length `n` is a window of some `ϑ(u)` that
    /// starts in the image of `u`'s first letter and ends in the image of
    /// its last, with `u` a letter or a legal word of length at most `n`.
    /// Sources of length `n` feed back into the set, so that part is a
    /// least fixpoint.
    fn anchored_closure(&mut self, n: usize) -> Result<FactorSet> {
        let mut sources: Vec<Vec<u8>> = self.sub.letters().map(|a| vec![a.0]).collect();
        for r in 1..n {
            let set = self.legal_set(r)?;
            sources.extend(set.iter().map(|e| runs::decode_letters(e)));
        }
        let mut set = self.anchored_windows_of(&sources, n)?;
        let mut expanded: HashSet<Encoded> = HashSet::new();
        loop {
            let fresh: Vec<Vec<u8>> = set
                .iter()
                .filter(|e| !expanded.contains(*e))
                .map(|e| runs::decode_letters(e))
                .collect();
            if fresh.is_empty() {
                return Ok(set);
            }
            expanded.extend(set.iter().cloned());
            let more = self.anchored_windows_of(&fresh, n)?;
            set = merge(set, more);
        }
    }

    fn anchored_windows_of(&self, sources: &[Vec<u8>], n: usize) -> Result<FactorSet> {
        self.collect_chunked(sources, |u, sink| {
            let mut buf = Vec::with_capacity(n + 2 * self.sub.max_image_len());
            self.anchored_into(u, n, &mut buf, sink)
        })
    }

    /// Depth-first over realisations of `ϑ(u)`, abandoning a branch once
    /// the interior images leave no room for an anchored window, or the
    /// images cannot reach length `n` at all.
    fn anchored_into(&self, u: &[u8], n: usize, buf: &mut Vec<u8>, sink: &mut Sink) -> Result<()> {
        let r = u.len();
        let lens = |x: u8| {
            let rs = self.sub.rules(Letter(x));
            let it = rs.iter().map(Word::len);
            (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
        };
        // rest_min[i]: shortest images of the interior letters i..r-1;
        // rest_max[i]: longest images of letters i..r
        let mut rest_min = vec![0usize; r + 1];
        let mut rest_max = vec![0usize; r + 1];
        for i in (0..r).rev() {
            let (lo, hi) = lens(u[i]);
            rest_min[i] = rest_min[i + 1] + if i + 1 < r { lo } else { 0 };
            rest_max[i] = rest_max[i + 1] + hi;
        }
        let walk = Anchored {
            u,
            n,
            rest_min,
            rest_max,
        };
        self.anchored_step(&walk, 0, 0, buf, sink)
    }

    fn anchored_step(&self, a: &Anchored, i: usize, first: usize, buf: &mut Vec<u8>, sink: &mut Sink) -> Result<()> {
        let r = a.u.len();
        let mark = buf.len();
        for img in self.sub.rules(Letter(a.u[i])) {
            buf.extend_from_slice(img.as_slice());
            let f = if i == 0 { img.len() } else { first };
            if i + 1 == r {
                self.emit_anchored(buf, f, img.len(), r, a.n, &mut sink.out);
                sink.settle()?;
            } else {
                let interior = buf.len() - f + a.rest_min[i + 1];
                let reach = buf.len() + a.rest_max[i + 1];
                if interior + 2 <= a.n && reach >= a.n {
                    self.anchored_step(a, i + 1, f, buf, sink)?;
                }
            }
            buf.truncate(mark);
        }
        Ok(())
    }

    /// Windows of length `n` starting in the first image (length `f`) and
    /// ending in the last (length `g`).
    fn emit_anchored(&self, buf: &[u8], f: usize, g: usize, r: usize, n: usize, out: &mut Vec<Encoded>) {
        let total = buf.len();
        if total < n {
            return;
        }
        // an empty range has lo > hi and the loop below skips it
        let (lo, hi) = if r == 1 {
            (0, total - n)
        } else {
            ((total - g + 1).saturating_sub(n), (f - 1).min(total - n))
        };
        for s in lo..=hi {
            out.push(runs::encode_letters(&buf[s..s + n]));
        }
    }

    /// Maps `f` over `sources` in parallel, merging results in bounded
    /// chunks so the candidate list never outgrows the budget.
    fn collect_chunked(
        &self,
        sources: &[Vec<u8>],
        f: impl Fn(&[u8], &mut Sink) -> Result<()> + Sync,
    ) -> Result<FactorSet> {
        let mut acc: FactorSet = Vec::new();
        let mut batch: FactorSet = Vec::new();
        let mut acc_bytes = 0usize;
        let mut batch_bytes = 0usize;
        for chunk in sources.chunks(CHUNK) {
            let tally = Tally {
                budget: &self.budget,
                words: AtomicUsize::new(acc.len() + batch.len()),
                bytes: AtomicUsize::new(acc_bytes + batch_bytes),
            };
            let parts: Vec<Result<FactorSet>> = chunk
                .par_iter()
                .map(|u| {
                    let mut sink = Sink::new(&tally);
                    f(u, &mut sink)?;
                    sink.finish()
                })
                .collect();
            for p in parts {
                let p = p?;
                batch_bytes += p.iter().map(footprint).sum::<usize>();
                batch.extend(p);
            }
            // merging only once the batch rivals the accumulated set keeps
            // the total merge work linear up to a log factor
            if batch.len() >= acc.len().max(1 << 16) {
                acc = merge(acc, std::mem::take(&mut batch));
                acc_bytes = acc.iter().map(footprint).sum();
                batch_bytes = 0;
            }
        }
        Ok(merge(acc, batch))
    }

    /// Letters plus every full realisation of a power image shorter than `r`.
    fn short_words(&self, r: usize) -> Result<Vec<Vec<u8>>> {
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut frontier: Vec<Vec<u8>> = self.sub.letters().map(|a| vec![a.0]).collect();
        for w in &frontier {
            seen.insert(w.clone());
        }
        while let Some(u) = frontier.pop() {
            let word = Word::new(u);
            let img = self.sub.apply_to_word(&word, &self.budget)?;
            for x in img.into_vec() {
                if x.len() < r && !seen.contains(x.as_slice()) {
                    seen.insert(x.as_slice().to_vec());
                    frontier.push(x.into_vec());
                }
            }
            self.budget.check("short realisations", seen.len(), 0)?;
        }
        let mut out: Vec<Vec<u8>> = seen.into_iter().collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Length-`n` windows of every realisation of `ϑ(v)`, `v` in `sources`.
    fn windows_of<'b>(
        &self,
        sources: impl Iterator<Item = &'b [u8]>,
        n: usize,
    ) -> Result<FactorSet> {
        let sources: Vec<Vec<u8>> = sources.map(<[u8]>::to_vec).collect();
        self.collect_chunked(&sources, |v, sink| self.expand_windows(v, n, sink))
    }

    fn expand_windows(&self, v: &[u8], n: usize, sink: &mut Sink) -> Result<()> {
        let choice_pos: Vec<usize> = (0..v.len())
            .filter(|&i| self.image_runs[v[i] as usize].len() > 1)
            .collect();
        let total: usize = choice_pos
            .iter()
            .try_fold(1usize, |acc, &i| acc.checked_mul(self.image_runs[v[i] as usize].len()))
            .unwrap_or(usize::MAX);
        self.budget.check("realisations of one word", total, 0)?;
        let mut choice = vec![0usize; v.len()];
        let mut runs = Runs::new();
        loop {
            runs.clear();
            for (i, &x) in v.iter().enumerate() {
                for &(l, k) in &self.image_runs[x as usize][choice[i]] {
                    runs::push_run(&mut runs, l, k);
                }
            }
            runs::windows_into(&runs, n, &mut sink.out);
            sink.settle()?;
            // odometer
            let mut carried = true;
            for &i in choice_pos.iter().rev() {
                choice[i] += 1;
                if choice[i] < self.image_runs[v[i] as usize].len() {
                    carried = false;
                    break;
                }
                choice[i] = 0;
            }
            if carried {
                break;
            }
        }
        Ok(())
    }
}

/// Budget shared by the sources of one parallel chunk: the words already
/// held by the caller plus every finished per-source list.
struct Tally<'b> {
    budget: &'b Budget,
    words: AtomicUsize,
    bytes: AtomicUsize,
}

/// Per-source window list. It is compacted whenever it doubles, and its
/// size is checked against the shared tally at each compaction.
struct Sink<'t> {
    out: FactorSet,
    next: usize,
    tally: &'t Tally<'t>,
}

impl<'t> Sink<'t> {
    const FIRST_COMPACTION: usize = 1 << 14;

    fn new(tally: &'t Tally<'t>) -> Self {
        Sink {
            out: Vec::new(),
            next: Self::FIRST_COMPACTION,
            tally,
        }
    }

    fn compact(&mut self) -> (usize, usize) {
        self.out.sort_unstable();
        self.out.dedup();
        (self.out.len(), self.out.iter().map(footprint).sum())
    }

    fn settle(&mut self) -> Result<()> {
        if self.out.len() < self.next {
            return Ok(());
        }
        let (words, bytes) = self.compact();
        self.next = (2 * words).max(Self::FIRST_COMPACTION);
        let t = self.tally;
        t.budget.check(
            "window candidates",
            t.words.load(Ordering::Relaxed) + words,
            t.bytes.load(Ordering::Relaxed) + bytes,
        )
    }

    fn finish(mut self) -> Result<FactorSet> {
        let (words, bytes) = self.compact();
        let t = self.tally;
        let w = t.words.fetch_add(words, Ordering::Relaxed) + words;
        let b = t.bytes.fetch_add(bytes, Ordering::Relaxed) + bytes;
        t.budget.check("window candidates", w, b)?;
        Ok(self.out)
    }
}

struct Anchored<'u> {
    u: &'u [u8],
    n: usize,
    rest_min: Vec<usize>,
    rest_max: Vec<usize>,
}

/// Union of a sorted, deduplicated set with an arbitrary batch.
fn merge(a: FactorSet, mut b: FactorSet) -> FactorSet {
    b.par_sort_unstable();
    b.dedup();
    if a.is_empty() {
        return b;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (a.into_iter().peekable(), b.into_iter().peekable());
    loop {
        let take_a = match (i.peek(), j.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => {
                    j.next();
                    true
                }
            },
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return out,
        };
        out.push(if take_a { i.next() } else { j.next() }.expect("peeked"));
    }
}

fn decode_set(set: &[Encoded]) -> WordSet {
    WordSet::from_words(set.iter().map(|e| Word::new(runs::decode_letters(e))).collect())
}

/// Exact `L^n_ϑ`.
pub fn legal_words(sub: &RandomSubstitution, n: usize, budget: &Budget) -> Result<LanguageSlice> {
    let words = Language::new(sub, *budget).legal_words(n)?;
    Ok(LanguageSlice {
        words,
        completeness: Completeness::Exact,
    })
}

/// Factors of length `n` accumulated over `⋃_a ϑ^k(a)` for `k = 1, 2, …`.
///
/// Stops once the accumulated factor sets of all lengths `≤ n` have been
/// unchanged for `window` consecutive generations, counting only
/// generations after the shortest image exceeds `n`. Hitting
/// `max_generation` or the budget returns what was accumulated, flagged.
pub fn legal_words_by_generation(
    sub: &RandomSubstitution,
    n: usize,
    window: usize,
    max_generation: usize,
    budget: &Budget,
) -> Result<LanguageSlice> {
    if n == 0 {
        return Err(Error::pre("language slices need n ≥ 1"));
    }
    let mut acc: Vec<HashSet<Vec<u8>>> = vec![HashSet::new(); n + 1];
    let mut images = PowerImages::new(sub);
    let mut unchanged = 0usize;
    let mut generation = 0usize;
    let capped = loop {
        if generation >= max_generation {
            break true;
        }
        if images.advance(budget).is_err() {
            break true;
        }
        generation += 1;
        let mut changed = false;
        for set in images.current() {
            for w in set {
                for len in 1..=n.min(w.len()) {
                    for f in w.as_slice().windows(len) {
                        if !acc[len].contains(f) {
                            acc[len].insert(f.to_vec());
                            changed = true;
                        }
                    }
                }
            }
        }
        let shortest = images
            .current()
            .iter()
            .flat_map(|s| s.iter().map(Word::len))
            .min()
            .unwrap_or(0);
        if shortest > n {
            if changed {
                unchanged = 0;
            } else {
                unchanged += 1;
                if unchanged >= window {
                    break false;
                }
            }
        }
    };
    let words = WordSet::from_words(acc[n].drain().map(Word::new).collect());
    let completeness = if capped {
        Completeness::BudgetCapped {
            generations: generation,
        }
    } else {
        Completeness::Stabilized {
            generations: generation,
        }
    };
    Ok(LanguageSlice {
        words,
        completeness,
    })
}

/// `L^n(X_ϑ)` approximated by two-sided `margin`-extendability.
pub fn subshift_language(
    sub: &RandomSubstitution,
    n: usize,
    margin: usize,
    budget: &Budget,
) -> Result<WordSet> {
    if margin == 0 {
        return Err(Error::pre("margin must be ≥ 1"));
    }
    Language::new(sub, *budget).subshift_words(n, margin)
}

/// `p(n)` for a set of lengths, in one language mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub mode: LanguageMode,
    /// `(n, p(n))`, increasing in `n`.
    #[serde(serialize_with = "crate::serial::big_pairs")]
    pub entries: Vec<(usize, BigUint)>,
    /// Extendability margin, subshift mode only.
    pub margin: Option<usize>,
    /// Subshift counts taken from the legal language of a primitive
    /// substitution.
    pub primitive_shortcut: bool,
    pub completeness: Completeness,
    /// Set when the budget stopped the table early.
    pub truncated: bool,
}

impl ComplexityTable {
    /// A table from given values, e.g. for analysing external data.
    pub fn from_values(mode: LanguageMode, entries: Vec<(usize, BigUint)>) -> Self {
        ComplexityTable {
            mode,
            entries,
            margin: None,
            primitive_shortcut: false,
            completeness: Completeness::Exact,
            truncated: false,
        }
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.entries.iter().find(|(m, _)| *m == n).map(|(_, p)| p)
    }

    /// `p` nondecreasing over the tabulated lengths.
    pub fn is_monotone(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    /// `p(m+n) ≤ p(m)·p(n)` wherever all three are tabulated.
    pub fn is_submultiplicative(&self) -> bool {
        for (m, pm) in &self.entries {
            for (n, pn) in &self.entries {
                if let Some(pmn) = self.get(m + n) {
                    if *pmn > pm * pn {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// If `p(n) ≤ n` for some tabulated `n`, the table must be constant
    /// from its first plateau on, and that plateau must start no later
    /// than the first such `n`. A table that reaches 0 describes a finite
    /// language; then only the persistence of 0 is checked.
    pub fn morse_hedlund_consistent(&self) -> bool {
        let dense: Vec<&(usize, BigUint)> = self.entries.iter().collect();
        if let Some(z) = dense.iter().position(|(_, p)| *p == BigUint::default()) {
            return dense[z..].iter().all(|(_, p)| *p == BigUint::default());
        }
        let first_small = dense.iter().find(|(n, p)| *p <= BigUint::from(*n));
        let first_small = match first_small {
            Some((n, _)) => *n,
            None => return true,
        };
        let plateau = dense
            .windows(2)
            .find(|w| w[1].0 == w[0].0 + 1 && w[0].1 == w[1].1)
            .map(|w| w[0].0);
        match plateau {
            Some(start) => {
                start <= first_small
                    && dense
                        .iter()
                        .filter(|(n, _)| *n >= start)
                        .all(|(_, p)| *p == dense.iter().find(|(n, _)| *n == start).unwrap().1)
            }
            // a single sample cannot contradict the theorem
            None => dense.len() < 2,
        }
    }
}

/// `p(n)` for `n = 1..=max_n`.
pub fn complexity_table(
    sub: &RandomSubstitution,
    max_n: usize,
    mode: LanguageMode,
    margin: Option<usize>,
    budget: &Budget,
) -> Result<ComplexityTable> {
    if max_n == 0 {
        return Err(Error::pre("table needs N ≥ 1"));
    }
    let ns: Vec<usize> = (1..=max_n).collect();
    complexity_table_at(sub, &ns, mode, margin, budget)
}

/// `p(n)` at the given lengths. A budget failure truncates the table at
/// the last completed length; an empty result is an error.
pub fn complexity_table_at(
    sub: &RandomSubstitution,
    ns: &[usize],
    mode: LanguageMode,
    margin: Option<usize>,
    budget: &Budget,
) -> Result<ComplexityTable> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.first() == Some(&0) || ns.is_empty() {
        return Err(Error::pre("table lengths must be ≥ 1"));
    }
    // a primitive substitution's subshift language is its legal language,
    // so the margin test is only run when asked for explicitly
    let primitive_shortcut =
        mode == LanguageMode::Subshift && margin.is_none() && crate::structure::is_primitive(sub).primitive;
    let margin = match mode {
        LanguageMode::Subshift if !primitive_shortcut => {
            Some(margin.unwrap_or_else(|| default_margin(*ns.last().unwrap())))
        }
        _ => None,
    };
    let mut lang = Language::new(sub, *budget);
    let mut entries = Vec::with_capacity(ns.len());
    let mut truncated = false;
    for &n in &ns {
        let count = match margin {
            None => lang.legal_count(n),
            Some(k) => lang.subshift_count(n, k),
        };
        match count {
            Ok(c) => entries.push((n, BigUint::from(c))),
            Err(e @ Error::BudgetExceeded { .. }) => {
                if entries.is_empty() {
                    return Err(e);
                }
                log::warn!("complexity table truncated at n = {n}: {e}");
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ComplexityTable {
        mode,
        entries,
        margin,
        primitive_shortcut,
        completeness: Completeness::Exact,
        truncated,
    })
}

/// Entropy estimates read off a complexity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityEntropy {
    pub n: Vec<usize>,
    /// `log p(n) / n`
    pub ratio: Vec<f64>,
    /// Running minimum of `ratio`; an upper bound on the entropy, since
    /// the limit equals the infimum for subadditive sequences.
    pub running_min: Vec<f64>,
    /// `log p(n+1) − log p(n)` for consecutive tabulated lengths.
    pub differences: Vec<f64>,
    pub upper_bound: f64,
}

pub fn entropy_from_complexity(table: &ComplexityTable) -> Result<ComplexityEntropy> {
    if table.entries.is_empty() {
        return Err(Error::InsufficientData("empty complexity table".into()));
    }
    let mut out = ComplexityEntropy {
        n: Vec::new(),
        ratio: Vec::new(),
        running_min: Vec::new(),
        differences: Vec::new(),
        upper_bound: f64::INFINITY,
    };
    let mut best = f64::INFINITY;
    let mut prev: Option<(usize, f64)> = None;
    for (n, p) in &table.entries {
        let lp = crate::entropy::ln_biguint(p);
        let r = lp / *n as f64;
        best = best.min(r);
        out.n.push(*n);
        out.ratio.push(r);
        out.running_min.push(best);
        if let Some((m, lq)) = prev {
            if m + 1 == *n {
                out.differences.push(lp - lq);
            }
        }
        prev = Some((*n, lp));
    }
    out.upper_bound = best;
    Ok(out)
}
