//! Counting `#L^n` for constant-length substitutions without storing `L^n`.
//!
//! With constant length `ℓ` and `n > ℓ`, every legal word `w` of length `n`
//! is a window of `ϑ(v)` starting at an offset `o < ℓ`, where `v` is a legal
//! word of length `t(o) = ⌈(o + n)/ℓ⌉` (the blocks the window touches).
//! Such a pair `(o, v)` is a *parse* of `w`. Each `w` is counted once, at
//! its least parse in the order (offset, then `v` lexicographically).
//!
//! For a fixed parse, the windows are determined by the visible piece of
//! each block: a suffix of the first image, whole middle images, a prefix
//! of the last image. Distinct piece tuples give distinct windows. While
//! the window is built block by block, every competing parse is tracked
//! as a set of ranges in the sorted list of legal words of the right
//! length. Once no competitor survives, the rest of the subtree is counted
//! by multiplication.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::word::Word;

/// Letters compatible with a visible piece.
type MaskTable = FxHashMap<Vec<u8>, Vec<u8>>;

#[derive(Clone, Copy)]
struct Range {
    lo: usize,
    hi: usize,
    /// Already lexicographically smaller than the parse being extended.
    less: bool,
}

pub(super) struct WindowCounter<'a> {
    ell: usize,
    n: usize,
    rules: &'a [Vec<Word>],
    /// `prefix[k]`: letters with a realisation whose prefix of length k is the key.
    prefix: Vec<MaskTable>,
    suffix: Vec<MaskTable>,
    /// Distinct images of distinct letters never coincide.
    disjoint: bool,
    /// Sorted legal words of length `t(o)`, per offset `o`.
    legal: Vec<Vec<Vec<u8>>>,
    /// Visible pieces per offset and letter: first block, middle, last block.
    first_pieces: Vec<Vec<Vec<Box<[u8]>>>>,
    middle_pieces: Vec<Vec<Box<[u8]>>>,
    last_pieces: Vec<Vec<Vec<Box<[u8]>>>>,
}

impl<'a> WindowCounter<'a> {
    /// `legal[o]` must hold `L^{t(o)}` for every offset.
    pub(super) fn new(
        rules: &'a [Vec<Word>],
        ell: usize,
        n: usize,
        mut legal: Vec<Vec<Vec<u8>>>,
    ) -> Self {
        assert!(ell >= 2 && n > ell && legal.len() == ell);
        for set in &mut legal {
            set.sort_unstable();
        }
        let mut prefix = vec![MaskTable::default(); ell + 1];
        let mut suffix = vec![MaskTable::default(); ell + 1];
        for (x, rs) in rules.iter().enumerate() {
            for r in rs {
                let s = r.as_slice();
                for k in 1..=ell {
                    add(&mut prefix[k], &s[..k], x as u8);
                    add(&mut suffix[k], &s[ell - k..], x as u8);
                }
            }
        }
        let disjoint = prefix[ell].values().all(|m| m.len() == 1);
        let cut = |rs: &Vec<Word>, take: &dyn Fn(&[u8]) -> Box<[u8]>| -> Vec<Box<[u8]>> {
            let mut out: Vec<Box<[u8]>> = rs.iter().map(|r| take(r.as_slice())).collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        let first_pieces = (0..ell)
            .map(|o| rules.iter().map(|rs| cut(rs, &|r| r[o..].into())).collect())
            .collect();
        let middle_pieces = rules.iter().map(|rs| cut(rs, &|r| r.into())).collect();
        let last_pieces = (0..ell)
            .map(|o| {
                let t = (o + n).div_ceil(ell);
                let len = n + o - (t - 1) * ell;
                rules.iter().map(|rs| cut(rs, &|r| r[..len].into())).collect()
            })
            .collect();
        WindowCounter {
            first_pieces,
            middle_pieces,
            last_pieces,
            ell,
            n,
            rules,
            prefix,
            suffix,
            disjoint,
            legal,
        }
    }

    fn blocks(&self, o: usize) -> usize {
        (o + self.n).div_ceil(self.ell)
    }

    /// Positions `[s, e)` of block `j` at offset `o`.
    fn span(&self, o: usize, j: usize) -> (usize, usize) {
        let s = (j * self.ell).saturating_sub(o);
        let e = ((j + 1) * self.ell - o).min(self.n);
        (s, e)
    }

    fn mask(&self, o: usize, j: usize, piece: &[u8]) -> &[u8] {
        let table = if j == 0 {
            &self.suffix[piece.len()]
        } else if j + 1 == self.blocks(o) {
            &self.prefix[piece.len()]
        } else {
            &self.prefix[self.ell]
        };
        table.get(piece).map_or(&[], Vec::as_slice)
    }

    /// Distinct visible pieces of block `j` of a parse at offset `o`.
    fn pieces(&self, o: usize, j: usize, x: u8) -> &[Box<[u8]>] {
        let x = x as usize;
        if j == 0 {
            &self.first_pieces[o][x]
        } else if j + 1 == self.blocks(o) {
            &self.last_pieces[o][x]
        } else {
            &self.middle_pieces[x]
        }
    }

    pub(super) fn count(&self) -> u128 {
        let roots: Vec<(usize, usize)> = (0..self.ell)
            .flat_map(|o| (0..self.legal[o].len()).map(move |i| (o, i)))
            .collect();
        roots
            .par_iter()
            .map(|&(o, i)| self.count_root(o, &self.legal[o][i]))
            .sum()
    }

    fn count_root(&self, o: usize, v: &[u8]) -> u128 {
        let mut state = State {
            w: vec![0u8; self.n],
            arena: Vec::with_capacity(64),
            heads: Vec::with_capacity(o + 1),
            saved: Vec::with_capacity(64),
        };
        for q in 0..=o {
            state.arena.push(Range {
                lo: 0,
                hi: self.legal[q].len(),
                less: q < o,
            });
            state.heads.push(Head {
                next_block: 0,
                start: q,
                end: q + 1,
            });
        }
        self.descend(o, v, 0, &mut state)
    }

    fn descend(&self, o: usize, v: &[u8], i: usize, state: &mut State) -> u128 {
        let t = v.len();
        let (s, e) = self.span(o, i);
        let mut total = 0u128;
        for piece in self.pieces(o, i, v[i]) {
            state.w[s..e].copy_from_slice(piece);
            let mark = state.arena.len();
            let hmark = state.saved.len();
            state.saved.extend_from_slice(&state.heads);
            let alive = self.advance(o, v, e, state);
            if alive {
                if i + 1 == t {
                    if state.live().all(|g| !g.less) {
                        total += 1;
                    }
                } else if let Some(c) = self.shortcut(o, v, i, state) {
                    total += c;
                } else {
                    total += self.descend(o, v, i + 1, state);
                }
            }
            let k = state.heads.len();
            state.heads.copy_from_slice(&state.saved[hmark..hmark + k]);
            state.saved.truncate(hmark);
            state.arena.truncate(mark);
        }
        total
    }

    /// Folds every rival block that ends by position `upto`. Returns false
    /// once a strictly smaller rival has completed, i.e. the window under
    /// construction is already counted elsewhere.
    fn advance(&self, o: usize, v: &[u8], upto: usize, state: &mut State) -> bool {
        for q in 0..=o {
            let tq = self.blocks(q);
            let words = &self.legal[q];
            loop {
                let head = state.heads[q];
                let j = head.next_block;
                if j >= tq {
                    break;
                }
                let (s, e) = self.span(q, j);
                if e > upto || (j + 1 == tq && upto < self.n) {
                    break;
                }
                let mask = self.mask(q, j, &state.w[s..e]);
                let start = state.arena.len();
                for idx in head.start..head.end {
                    let g = state.arena[idx];
                    for &x in mask {
                        let less = if q == o && !g.less {
                            match x.cmp(&v[j]) {
                                std::cmp::Ordering::Greater => continue,
                                std::cmp::Ordering::Less => true,
                                std::cmp::Ordering::Equal => false,
                            }
                        } else {
                            g.less
                        };
                        let (lo, hi) = narrow(words, g.lo, g.hi, j, x);
                        if lo < hi {
                            state.arena.push(Range { lo, hi, less });
                        }
                    }
                }
                state.heads[q] = Head {
                    next_block: j + 1,
                    start,
                    end: state.arena.len(),
                };
            }
        }
        // a completed smaller rival means this window is not canonical
        !state.heads.iter().enumerate().any(|(q, h)| {
            h.next_block == self.blocks(q) && state.arena[h.start..h.end].iter().any(|g| g.less)
        })
    }

    /// With disjoint images and no live rival at a smaller offset, the
    /// middle blocks are forced, so only the last piece can still admit a
    /// smaller parse at the same offset.
    fn shortcut(&self, o: usize, v: &[u8], i: usize, state: &State) -> Option<u128> {
        if !self.disjoint {
            return None;
        }
        if state.heads[..o].iter().any(|h| h.start < h.end) {
            return None;
        }
        let t = v.len();
        let words = &self.legal[o];
        let mut product = 1u128;
        for j in (i + 1)..(t - 1) {
            product *= self.rules[v[j] as usize].len() as u128;
        }
        // Same-offset parses agree with v on every middle block, since a
        // full image determines its letter.
        let own = state.heads[o];
        let ranges: Vec<Range> = state.arena[own.start..own.end]
            .iter()
            .filter_map(|g| {
                let (lo, hi) = narrow_slice(words, g.lo, g.hi, i + 1, &v[i + 1..t - 1]);
                (lo < hi).then_some(Range { lo, hi, less: g.less })
            })
            .collect();
        let last = t - 1;
        let good = self
            .pieces(o, last, v[last])
            .iter()
            .filter(|p| {
                !self.mask(o, last, p).iter().any(|&x| {
                    ranges.iter().any(|g| {
                        if !g.less && x >= v[last] {
                            return false;
                        }
                        let (a, b) = narrow(words, g.lo, g.hi, last, x);
                        a < b
                    })
                })
            })
            .count() as u128;
        Some(product * good)
    }
}

/// Progress of one rival offset; its live ranges are `arena[start..end]`.
#[derive(Clone, Copy)]
struct Head {
    next_block: usize,
    start: usize,
    end: usize,
}

/// Search state, restored by truncation when backtracking.
struct State {
    w: Vec<u8>,
    arena: Vec<Range>,
    heads: Vec<Head>,
    saved: Vec<Head>,
}

impl State {
    fn live(&self) -> impl Iterator<Item = &Range> {
        self.heads.iter().flat_map(|h| &self.arena[h.start..h.end])
    }
}

fn add(table: &mut MaskTable, key: &[u8], x: u8) {
    let e = table.entry(key.to_vec()).or_default();
    if !e.contains(&x) {
        e.push(x);
        e.sort_unstable();
    }
}

/// Sub-range of `words[lo..hi]` (sharing a prefix of length `pos`) that
/// continues with `pat`.
fn narrow_slice(words: &[Vec<u8>], lo: usize, hi: usize, pos: usize, pat: &[u8]) -> (usize, usize) {
    let end = pos + pat.len();
    let slice = &words[lo..hi];
    let a = slice.partition_point(|w| &w[pos..end] < pat);
    let b = slice.partition_point(|w| &w[pos..end] <= pat);
    (lo + a, lo + b)
}

/// Sub-range of `words[lo..hi]` (sharing a prefix of length `pos`) whose
/// letter at `pos` is `x`.
fn narrow(words: &[Vec<u8>], lo: usize, hi: usize, pos: usize, x: u8) -> (usize, usize) {
    let slice = &words[lo..hi];
    let a = slice.partition_point(|w| w[pos] < x);
    let b = slice.partition_point(|w| w[pos] <= x);
    (lo + a, lo + b)
}
