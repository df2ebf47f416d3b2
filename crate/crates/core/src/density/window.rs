use super::{CountingSet, DensityError};
use crate::bits;
use rayon::prelude::*;
use std::sync::OnceLock;

/// A subset of the half-open window `[lo, hi)` of the naturals, stored as a
/// dense bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntWindow {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
}

impl IntWindow {
    /// Empty subset of `[lo, hi)`.
    ///
    /// # Panics
    /// If `lo >= hi` or the window does not fit in memory addressing.
    pub fn new(lo: u64, hi: u64) -> Self {
        assert!(lo < hi, "window [{lo}, {hi}) is empty");
        let len = usize::try_from(hi - lo).expect("window too large");
        IntWindow { lo, hi, words: vec![0; bits::words_for(len)] }
    }

    pub fn from_predicate(lo: u64, hi: u64, mut pred: impl FnMut(u64) -> bool) -> Self {
        let mut w = IntWindow::new(lo, hi);
        for n in lo..hi {
            if pred(n) {
                bits::set(&mut w.words, (n - lo) as usize);
            }
        }
        w
    }

    pub fn from_members<I: IntoIterator<Item = u64>>(lo: u64, hi: u64, members: I) -> Result<Self, DensityError> {
        let mut w = IntWindow::new(lo, hi);
        for n in members {
            w.insert(n)?;
        }
        Ok(w)
    }

    /// `[lo, hi)` in full.
    pub fn full(lo: u64, hi: u64) -> Self {
        let mut w = IntWindow::new(lo, hi);
        let width = w.width();
        bits::set_range(&mut w.words, 0, width);
        w
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn insert(&mut self, n: u64) -> Result<(), DensityError> {
        if n < self.lo || n >= self.hi {
            return Err(DensityError::OutOfWindow { n, lo: self.lo, hi: self.hi });
        }
        bits::set(&mut self.words, (n - self.lo) as usize);
        Ok(())
    }

    pub fn len(&self) -> u64 {
        bits::popcount(&self.words) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        bits::ones(&self.words).map(move |i| self.lo + i as u64)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<u64> {
        let (wi, w) = self.words.iter().enumerate().rev().find(|(_, &w)| w != 0)?;
        Some(self.lo + (wi * 64 + 63 - w.leading_zeros() as usize) as u64)
    }

    /// The same members in the window `[lo, hi)`; members outside are dropped.
    pub fn rewindow(&self, lo: u64, hi: u64) -> IntWindow {
        let mut w = IntWindow::new(lo, hi);
        let (a, b) = (lo.max(self.lo), hi.min(self.hi));
        if a < b {
            let src_off = (a - self.lo) as usize;
            let dst_off = (a - lo) as usize;
            let mut tmp = vec![0u64; self.words.len()];
            bits::shr_or(&mut tmp, &self.words, src_off);
            bits::mask_tail(&mut tmp, (b - a) as usize);
            bits::shl_or(&mut w.words, &tmp, dst_off);
            let width = w.width();
            bits::mask_tail(&mut w.words, width);
        }
        w
    }

    /// Union over the hull of both windows.
    pub fn union(&self, other: &IntWindow) -> IntWindow {
        let mut w = self.rewindow(self.lo.min(other.lo), self.hi.max(other.hi));
        w.or_assign(other);
        w
    }

    /// ORs the members of `other` that fall inside this window.
    pub fn or_assign(&mut self, other: &IntWindow) {
        let a = self.lo.max(other.lo);
        let b = self.hi.min(other.hi);
        if a >= b {
            return;
        }
        let part = other.rewindow(a, b);
        bits::shl_or(&mut self.words, &part.words, (a - self.lo) as usize);
        let width = self.width();
        bits::mask_tail(&mut self.words, width);
    }

    /// `{a + b}` on the window `[lo1 + lo2, hi1 + hi2 - 1)`.
    pub fn sumset(&self, other: &IntWindow) -> IntWindow {
        let words = bits::sumset_bits(&self.words, self.width(), &other.words, other.width());
        let lo = self.lo + other.lo;
        IntWindow { lo, hi: self.hi + other.hi - 1, words }
    }

    /// Members shifted by `s` (window shifted too).
    pub fn translate(&self, s: u64) -> IntWindow {
        IntWindow { lo: self.lo + s, hi: self.hi + s, words: self.words.clone() }
    }

    /// Sets every multiple-of-`step` offset `first, first+step, ..., <= last`
    /// that lies inside the window.
    pub fn insert_progression(&mut self, first: u64, last: u64, step: u64) {
        if last < first || step == 0 {
            return;
        }
        let a = first.max(self.lo);
        let b = last.min(self.hi - 1);
        if a > b {
            return;
        }
        let start = first + (a - first).div_ceil(step) * step;
        if start > b {
            return;
        }
        if step == 1 {
            bits::set_range(&mut self.words, (start - self.lo) as usize, (b - self.lo) as usize + 1);
            return;
        }
        let mut n = start;
        while n <= b {
            bits::set(&mut self.words, (n - self.lo) as usize);
            n += step;
        }
    }
}

impl CountingSet for IntWindow {
    fn contains(&self, n: u64) -> bool {
        n >= self.lo && n < self.hi && bits::get(&self.words, (n - self.lo) as usize)
    }

    fn count_range(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if a >= b {
            return 0;
        }
        let (ia, ib) = ((a - self.lo) as usize, (b - self.lo) as usize);
        (bits::popcount_below(&self.words, ib) - bits::popcount_below(&self.words, ia)) as u64
    }
}

/// Block size of [`LazyWindow`] materialization.
pub const LAZY_BLOCK: u64 = 1 << 20;

/// A predicate on `[lo, hi)` evaluated block by block on first use; each
/// block is computed once and cached.
pub struct LazyWindow<F> {
    lo: u64,
    hi: u64,
    pred: F,
    blocks: Vec<OnceLock<Vec<u64>>>,
}

impl<F: Fn(u64) -> bool + Sync> LazyWindow<F> {
    /// # Panics
    /// If `lo >= hi`.
    pub fn new(lo: u64, hi: u64, pred: F) -> Self {
        assert!(lo < hi, "window [{lo}, {hi}) is empty");
        let n = (hi - lo).div_ceil(LAZY_BLOCK) as usize;
        LazyWindow { lo, hi, pred, blocks: (0..n).map(|_| OnceLock::new()).collect() }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    fn block(&self, k: usize) -> &[u64] {
        self.blocks[k].get_or_init(|| {
            let start = self.lo + k as u64 * LAZY_BLOCK;
            let end = (start + LAZY_BLOCK).min(self.hi);
            let mut words = vec![0u64; bits::words_for((end - start) as usize)];
            for n in start..end {
                if (self.pred)(n) {
                    bits::set(&mut words, (n - start) as usize);
                }
            }
            words
        })
    }

    /// Number of blocks computed so far.
    pub fn materialized_blocks(&self) -> usize {
        self.blocks.iter().filter(|b| b.get().is_some()).count()
    }

    pub fn materialize(&self) -> IntWindow {
        let mut w = IntWindow::new(self.lo, self.hi);
        for k in 0..self.blocks.len() {
            bits::shl_or(&mut w.words, self.block(k), k * LAZY_BLOCK as usize);
        }
        let width = w.width();
        bits::mask_tail(&mut w.words, width);
        w
    }
}

impl<F: Fn(u64) -> bool + Sync> CountingSet for LazyWindow<F> {
    fn contains(&self, n: u64) -> bool {
        if n < self.lo || n >= self.hi {
            return false;
        }
        let off = n - self.lo;
        bits::get(self.block((off / LAZY_BLOCK) as usize), (off % LAZY_BLOCK) as usize)
    }

    fn count_range(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if a >= b {
            return 0;
        }
        let (ka, kb) = (((a - self.lo) / LAZY_BLOCK) as usize, ((b - 1 - self.lo) / LAZY_BLOCK) as usize);
        (ka..=kb)
            .into_par_iter()
            .map(|k| {
                let start = self.lo + k as u64 * LAZY_BLOCK;
                let words = self.block(k);
                let lo = (a.max(start) - start) as usize;
                let hi = (b.min(start + LAZY_BLOCK) - start) as usize;
                (bits::popcount_below(words, hi) - bits::popcount_below(words, lo)) as u64
            })
            .sum()
    }
}
