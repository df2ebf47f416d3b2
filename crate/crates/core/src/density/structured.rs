use super::{CountingSet, IntWindow};
use num_integer::Integer;
use std::collections::BTreeMap;

/// One building block of a [`StructuredSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    /// `{first, first + step, ..., last}`.
    Prog { first: u64, last: u64, step: u64 },
    Bits(IntWindow),
}

impl Piece {
    /// `None` for a malformed progression.
    pub fn prog(first: u64, last: u64, step: u64) -> Option<Piece> {
        (step >= 1 && last >= first && (last - first) % step == 0).then_some(Piece::Prog { first, last, step })
    }

    /// Smallest and largest possible member (for windows, the window bounds).
    fn span(&self) -> (u64, u64) {
        match self {
            Piece::Prog { first, last, .. } => (*first, *last),
            Piece::Bits(w) => (w.lo(), w.hi() - 1),
        }
    }

    fn clip(&self, hi: u64) -> Option<Piece> {
        match *self {
            Piece::Prog { first, last, step } => {
                if first >= hi {
                    return None;
                }
                let last = if last < hi { last } else { first + (hi - 1 - first) / step * step };
                Some(Piece::Prog { first, last, step })
            }
            Piece::Bits(ref w) => {
                if w.lo() >= hi {
                    None
                } else if w.hi() <= hi {
                    Some(self.clone())
                } else {
                    Some(Piece::Bits(w.rewindow(w.lo(), hi)))
                }
            }
        }
    }

    fn to_window(&self) -> IntWindow {
        match *self {
            Piece::Prog { first, last, step } => {
                let mut w = IntWindow::new(first, last + 1);
                w.insert_progression(first, last, step);
                w
            }
            Piece::Bits(ref w) => w.clone(),
        }
    }
}

/// A finite union of arithmetic progressions and dense windows. Sumsets of
/// long progressions with short pieces stay progressions, which lets sets
/// spanning 10^14 integers be added and counted exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructuredSet {
    pieces: Vec<Piece>,
}

fn prog_sum(f1: u64, l1: u64, s1: u64, f2: u64, l2: u64, s2: u64) -> Option<Piece> {
    let (c1, c2) = ((l1 - f1) / s1 + 1, (l2 - f2) / s2 + 1);
    if c1 == 1 {
        return Piece::prog(f1 + f2, f1 + l2, s2);
    }
    if c2 == 1 {
        return Piece::prog(f1 + f2, l1 + f2, s1);
    }
    // A progression of step s2 | s1 with at least s1 / s2 terms fills the gaps.
    if s1 % s2 == 0 && c2 >= s1 / s2 {
        return Piece::prog(f1 + f2, l1 + l2, s2);
    }
    if s2 % s1 == 0 && c1 >= s2 / s1 {
        return Piece::prog(f1 + f2, l1 + l2, s1);
    }
    None
}

/// `P + W` when `P` is at least as long as the span of `W`: within each
/// residue class mod `step` the shifted copies of `P` overlap, so the result
/// is one progression per class met by `W`.
fn prog_window_sum(first: u64, last: u64, step: u64, w: &IntWindow) -> Option<Vec<Piece>> {
    let (wmin, wmax) = (w.min()?, w.max()?);
    if last - first < wmax - wmin {
        return None;
    }
    let mut classes: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for b in w.iter() {
        classes.entry(b % step).and_modify(|e| e.1 = b).or_insert((b, b));
    }
    Some(classes.values().filter_map(|&(lo, hi)| Piece::prog(first + lo, last + hi, step)).collect())
}

fn piece_sum(x: &Piece, y: &Piece) -> Vec<Piece> {
    match (x, y) {
        (Piece::Prog { first: f1, last: l1, step: s1 }, Piece::Prog { first: f2, last: l2, step: s2 }) => {
            if let Some(p) = prog_sum(*f1, *l1, *s1, *f2, *l2, *s2) {
                return vec![p];
            }
        }
        (Piece::Prog { first, last, step }, Piece::Bits(w)) | (Piece::Bits(w), Piece::Prog { first, last, step }) => {
            if w.is_empty() {
                return Vec::new();
            }
            if let Some(ps) = prog_window_sum(*first, *last, *step, w) {
                return ps;
            }
        }
        (Piece::Bits(a), Piece::Bits(b)) => {
            if a.is_empty() || b.is_empty() {
                return Vec::new();
            }
            return vec![Piece::Bits(a.sumset(b))];
        }
    }
    vec![Piece::Bits(x.to_window().sumset(&y.to_window()))]
}

impl StructuredSet {
    pub fn new() -> Self {
        StructuredSet::default()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn push(&mut self, p: Piece) {
        self.pieces.push(p);
    }

    /// Appends `{first, first+step, ..., <= last}`; ignored when empty.
    pub fn push_prog(&mut self, first: u64, last: u64, step: u64) {
        if step == 0 || last < first {
            return;
        }
        let last = first + (last - first) / step * step;
        self.pieces.push(Piece::Prog { first, last, step });
    }

    pub fn push_window(&mut self, w: IntWindow) {
        if !w.is_empty() {
            self.pieces.push(Piece::Bits(w));
        }
    }

    pub fn union(&self, other: &StructuredSet) -> StructuredSet {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        StructuredSet { pieces }
    }

    /// Members below `hi`.
    pub fn clip(&self, hi: u64) -> StructuredSet {
        StructuredSet { pieces: self.pieces.iter().filter_map(|p| p.clip(hi)).collect() }
    }

    /// Replaces every piece lying entirely below `limit` by a single window,
    /// which keeps sumsets from multiplying small pieces.
    pub fn densify_below(&self, limit: u64) -> StructuredSet {
        let (low, high): (Vec<&Piece>, Vec<&Piece>) = self.pieces.iter().partition(|p| p.span().1 < limit);
        let mut out = StructuredSet { pieces: high.into_iter().cloned().collect() };
        if let (Some(lo), Some(hi)) = (low.iter().map(|p| p.span().0).min(), low.iter().map(|p| p.span().1).max()) {
            let mut w = IntWindow::new(lo, hi + 1);
            for p in low {
                match p {
                    Piece::Prog { first, last, step } => w.insert_progression(*first, *last, *step),
                    Piece::Bits(b) => w.or_assign(b),
                }
            }
            out.push_window(w);
        }
        out
    }

    /// `A + B` restricted to `[0, hi)`.
    pub fn sumset_below(&self, other: &StructuredSet, hi: u64) -> StructuredSet {
        let mut pieces = Vec::new();
        for x in &self.pieces {
            for y in &other.pieces {
                if x.span().0 + y.span().0 >= hi {
                    continue;
                }
                let (x, y) = (x.clip(hi).expect("starts below hi"), y.clip(hi).expect("starts below hi"));
                pieces.extend(piece_sum(&x, &y).iter().filter_map(|p| p.clip(hi)));
            }
        }
        pieces.sort_by_key(|p| p.span());
        pieces.dedup();
        StructuredSet { pieces }
    }

    /// Dense window of the members in `[lo, hi)`.
    pub fn materialize(&self, lo: u64, hi: u64) -> IntWindow {
        let mut w = IntWindow::new(lo, hi);
        for p in &self.pieces {
            match p {
                Piece::Prog { first, last, step } => w.insert_progression(*first, *last, *step),
                Piece::Bits(b) => w.or_assign(b),
            }
        }
        w
    }

    /// Members of the union of progressions in `[a, b)`, merging intervals
    /// of indices per residue class modulo the lcm of the steps.
    ///
    /// # Panics
    /// If the lcm of the steps exceeds 2^16.
    fn count_progs(&self, a: u64, b: u64) -> u64 {
        let progs: Vec<(u64, u64, u64)> = self
            .pieces
            .iter()
            .filter_map(|p| match *p {
                Piece::Prog { first, last, step } => Some((first, last, step)),
                Piece::Bits(_) => None,
            })
            .collect();
        if progs.is_empty() || a >= b {
            return 0;
        }
        let l = progs.iter().fold(1u64, |acc, &(f, la, s)| if f == la { acc } else { acc.lcm(&s) });
        assert!(l <= 1 << 16, "progression steps have lcm {l}; too large to count");
        let mut per_class: Vec<Vec<(u64, u64)>> = vec![Vec::new(); l as usize];
        for &(f, la, s) in &progs {
            let (lo, hi) = (f.max(a), la.min(b - 1));
            if lo > hi {
                continue;
            }
            let s = if f == la { l } else { s };
            for k in 0..l / s {
                let r = (f + k * s) % l;
                // Members of this class in [lo, hi] that are >= f: n = r + j l.
                let lo_n = lo.max(f + k * s);
                if lo_n > hi {
                    continue;
                }
                let j0 = (lo_n - r).div_ceil(l);
                if r + j0 * l > hi {
                    continue;
                }
                let j1 = (hi - r) / l;
                per_class[r as usize].push((j0, j1));
            }
        }
        per_class
            .into_iter()
            .map(|mut iv| {
                iv.sort_unstable();
                let mut total = 0u64;
                let mut cur: Option<(u64, u64)> = None;
                for (s, e) in iv {
                    match cur {
                        Some((cs, ce)) if s <= ce + 1 => cur = Some((cs, ce.max(e))),
                        Some((cs, ce)) => {
                            total += ce - cs + 1;
                            cur = Some((s, e));
                        }
                        None => cur = Some((s, e)),
                    }
                }
                total + cur.map_or(0, |(cs, ce)| ce - cs + 1)
            })
            .sum()
    }

    /// Disjoint sorted zones covered by windows, clipped to `[a, b)`.
    fn window_zones(&self, a: u64, b: u64) -> Vec<(u64, u64)> {
        let mut z: Vec<(u64, u64)> = self
            .pieces
            .iter()
            .filter_map(|p| match p {
                Piece::Bits(w) => {
                    let (lo, hi) = (w.lo().max(a), w.hi().min(b));
                    (lo < hi).then_some((lo, hi))
                }
                Piece::Prog { .. } => None,
            })
            .collect();
        z.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::new();
        for (lo, hi) in z {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        merged
    }
}

impl CountingSet for StructuredSet {
    fn contains(&self, n: u64) -> bool {
        self.pieces.iter().any(|p| match *p {
            Piece::Prog { first, last, step } => n >= first && n <= last && (n - first) % step == 0,
            Piece::Bits(ref w) => w.contains(n),
        })
    }

    fn count_range(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            return 0;
        }
        let zones = self.window_zones(a, b);
        let mut total = 0;
        let mut cursor = a;
        for &(lo, hi) in &zones {
            total += self.count_progs(cursor, lo);
            total += self.materialize(lo, hi).len();
            cursor = hi;
        }
        total + self.count_progs(cursor, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn explicit(s: &StructuredSet, hi: u64) -> BTreeSet<u64> {
        (0..hi).filter(|&n| s.contains(n)).collect()
    }

    fn sample() -> (StructuredSet, StructuredSet) {
        let mut a = StructuredSet::new();
        a.push_prog(10, 400, 2);
        a.push_prog(500, 900, 1);
        a.push_window(IntWindow::from_members(0, 30, [1, 4, 9, 16, 25]).unwrap());
        a.push_prog(7, 7, 1);
        let mut b = StructuredSet::new();
        b.push_prog(3, 51, 3);
        b.push_window(IntWindow::from_members(100, 140, [101, 102, 117, 139]).unwrap());
        b.push_prog(1000, 1400, 2);
        (a, b)
    }

    #[test]
    fn counts_match_enumeration() {
        let (a, b) = sample();
        let u = a.union(&b);
        let e = explicit(&u, 2000);
        for (lo, hi) in [(0, 2000), (5, 17), (120, 1200), (899, 901)] {
            assert_eq!(u.count_range(lo, hi), e.range(lo..hi).count() as u64, "[{lo}, {hi})");
        }
    }

    #[test]
    fn sumset_matches_enumeration() {
        let (a, b) = sample();
        let hi = 2000;
        let s = a.sumset_below(&b, hi);
        let ea = explicit(&a, hi);
        let eb = explicit(&b, hi);
        let mut expect = BTreeSet::new();
        for x in &ea {
            for y in &eb {
                if x + y < hi {
                    expect.insert(x + y);
                }
            }
        }
        assert_eq!(explicit(&s, hi), expect);
        assert_eq!(s.count_range(0, hi), expect.len() as u64);
    }

    #[test]
    fn densify_preserves_members() {
        let (a, _) = sample();
        let d = a.densify_below(450);
        assert!(d.pieces().len() < a.pieces().len());
        assert_eq!(explicit(&d, 1000), explicit(&a, 1000));
    }

    #[test]
    fn huge_progressions_count_exactly() {
        let mut a = StructuredSet::new();
        let big = 1u64 << 50;
        a.push_prog(1, big, 1);
        let mut b = StructuredSet::new();
        b.push_prog(0, 10, 10);
        let s = a.sumset_below(&b, big);
        assert_eq!(s.count_range(0, big), big - 1);
        let mut evens = StructuredSet::new();
        evens.push_prog(2, big, 2);
        evens.push_prog(3, big, 3);
        let six = big / 6;
        assert_eq!(evens.count_range(0, 6 * six), 4 * six - 1);
    }
}
