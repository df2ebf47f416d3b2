//! Bohr-interval fitting: pick the dominant nonzero Fourier frequency of an
//! indicator, read off the homomorphism `m -> t m mod N` it induces, and find
//! the arc of `Z/N` whose preimage is closest to the set.

use crate::zq::{Subgroup, ZqSet};
use num_integer::Integer;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// The arc `{start, start+1, ..., start+len-1}` of `Z/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcZ {
    pub start: usize,
    pub len: usize,
}

impl ArcZ {
    pub fn full(n: usize) -> Self {
        ArcZ { start: 0, len: n }
    }

    pub fn contains(&self, y: usize, n: usize) -> bool {
        self.len >= n || (y % n + n - self.start % n) % n < self.len
    }

    /// Image under `y -> -y`.
    pub fn reflect(&self, n: usize) -> Self {
        if self.len == 0 || self.len >= n {
            return *self;
        }
        let last = (self.start + self.len - 1) % n;
        ArcZ { start: (n - last) % n, len: self.len }
    }

    /// Image under `y -> y + s`.
    pub fn translate(&self, s: usize, n: usize) -> Self {
        if self.len == 0 || self.len >= n {
            return *self;
        }
        ArcZ { start: (self.start + s) % n, len: self.len }
    }
}

/// The surjection `H -> Z/N`, `d j -> t j mod N`, where `H = dZ/QZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Homomorphism {
    pub subgroup: Subgroup,
    pub n: usize,
    pub t: usize,
}

impl Homomorphism {
    /// Well defined and surjective iff `N` divides `|H|` and `gcd(t, N) = 1`.
    pub fn is_valid(&self) -> bool {
        self.n >= 1 && self.subgroup.order() % self.n == 0 && self.t.gcd(&self.n) == 1
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        let d = self.subgroup.index;
        (x % d == 0).then(|| ((x / d) as u128 * self.t as u128 % self.n as u128) as usize)
    }

    /// `phi^{-1}(arc)` as a subset of Z/Q.
    pub fn preimage(&self, arc: &ArcZ) -> ZqSet {
        ZqSet::from_predicate(self.subgroup.modulus, |x| self.apply(x).is_some_and(|y| arc.contains(y, self.n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrFit {
    /// The frequency the fit was built from (0 for the trivial fit).
    pub frequency: usize,
    pub n: usize,
    pub t: usize,
    pub interval: ArcZ,
    /// `|phi^{-1}(I) symmetric-difference S|`.
    pub error_mass: usize,
}

/// `|sum_{x in S} e(-x xi / Q)|` for every `xi` in `[0, Q)`.
pub fn spectrum(s: &ZqSet) -> Vec<f64> {
    let q = s.modulus();
    let mut buf: Vec<Complex64> = (0..q).map(|x| Complex64::new(s.contains(x) as u8 as f64, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(q).process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

/// Largest-magnitude nonzero frequency; ties (up to rounding) go to the
/// smallest frequency. `None` when every nonzero coefficient vanishes.
pub fn dominant_frequency(s: &ZqSet) -> Option<usize> {
    let spec = spectrum(s);
    let tol = 1e-9 * (s.len().max(1) as f64);
    let best = spec.iter().skip(1).cloned().fold(0.0f64, f64::max);
    if best <= tol {
        return None;
    }
    (1..spec.len()).find(|&xi| spec[xi] >= best - tol)
}

pub fn fit_bohr_interval(s: &ZqSet) -> BohrFit {
    match dominant_frequency(s) {
        Some(xi) => fit_bohr_interval_at(s, xi),
        None => fit_bohr_interval_at(s, 0),
    }
}

/// The fit induced by a given frequency `xi`: `N = Q / gcd(xi, Q)`,
/// `t = xi / gcd(xi, Q)`, best arc under `m -> t m mod N`. `xi = 0` gives the
/// trivial fit with `N = 1`.
pub fn fit_bohr_interval_at(s: &ZqSet, xi: usize) -> BohrFit {
    let q = s.modulus();
    let (n, t) = if xi % q == 0 {
        (1, 1)
    } else {
        let g = (xi % q).gcd(&q);
        (q / g, (xi % q) / g)
    };
    let phi = Homomorphism { subgroup: Subgroup::whole(q), n, t };
    let mut counts = vec![0usize; n];
    for x in s.iter() {
        counts[phi.apply(x).expect("whole group")] += 1;
    }
    let (interval, delta) = best_arc(&counts, q / n);
    BohrFit { frequency: xi % q, n, t: t % n.max(1), interval, error_mass: (s.len() as i64 + delta) as usize }
}

/// Exact search used for `N` up to this size; larger `N` falls back to a
/// linear-time circular scan whose tie-breaking is unspecified.
pub const EXACT_ARC_LIMIT: usize = 4096;

/// Minimizes `sum_{y in I} (fiber - 2 counts[y])` over arcs `I` (including
/// the empty and the full arc), which minimizes the symmetric difference.
/// Ties go to the shortest arc, then the smallest start. Returns the arc and
/// its cost.
pub fn best_arc(counts: &[usize], fiber: usize) -> (ArcZ, i64) {
    let n = counts.len();
    let w: Vec<i64> = counts.iter().map(|&c| fiber as i64 - 2 * c as i64).collect();
    let total: i64 = w.iter().sum();
    if n > EXACT_ARC_LIMIT {
        return best_arc_linear(&w, total);
    }
    let mut prefix = vec![0i64; 2 * n + 1];
    for i in 0..2 * n {
        prefix[i + 1] = prefix[i] + w[i % n];
    }
    let mut best = (0i64, 0usize, 0usize);
    for len in 1..n {
        for start in 0..n {
            let c = prefix[start + len] - prefix[start];
            if c < best.0 {
                best = (c, len, start);
            }
        }
    }
    if total < best.0 {
        best = (total, n, 0);
    }
    (ArcZ { start: best.2, len: best.1 }, best.0)
}

fn best_arc_linear(w: &[i64], total: i64) -> (ArcZ, i64) {
    let n = w.len();
    let mut best = (0i64, ArcZ { start: 0, len: 0 });
    if total < best.0 {
        best = (total, ArcZ::full(n));
    }
    // Minimum-sum contiguous run (non-wrapping).
    let (mut cur, mut cur_start) = (0i64, 0usize);
    for (i, &x) in w.iter().enumerate() {
        if cur > 0 {
            cur = 0;
            cur_start = i;
        }
        cur += x;
        if cur < best.0 {
            best = (cur, ArcZ { start: cur_start, len: i + 1 - cur_start });
        }
    }
    // Wrapping arcs are complements of maximum-sum runs.
    let (mut cur, mut cur_start) = (0i64, 0usize);
    for (i, &x) in w.iter().enumerate() {
        if cur < 0 {
            cur = 0;
            cur_start = i;
        }
        cur += x;
        let c = total - cur;
        let len = n - (i + 1 - cur_start);
        if c < best.0 && len > 0 {
            best = (c, ArcZ { start: (i + 1) % n, len });
        }
    }
    (best.1, best.0)
}

/// True when `(t, arc)` and `(t', arc')` describe the same preimage up to the
/// sign of the unit, i.e. `t' = +-t mod N`.
pub fn same_frequency(n: usize, t: usize, t2: usize) -> bool {
    n <= 2 || t % n == t2 % n || (t + t2) % n == 0
}
