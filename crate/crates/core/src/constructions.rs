//! Generators for explicit example sets: coin-flip sets, the block sets
//! `C(t, M, N)` and the pair `(A, B)` with `d(A + B) = d(A)`, the two-scale
//! pair whose sumset has no density, and lifted parallel Bohr sets.
//!
//! Large constructions are held as [`StructuredSet`]s (unions of
//! progressions and dense windows), so densities of `A`, `B` and `A + B` can
//! be counted exactly far beyond what a bit vector could hold.
//! `build_*_pair` materializes a prefix as dense windows.

use crate::density::{IntWindow, StructuredSet};
use crate::equidist::{bohr_members, EquidistError, TorusInterval, TorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid parameters: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("bound {0} is too small")]
    BadBound(u64),
    #[error(transparent)]
    Equidist(#[from] EquidistError),
}

/// Members among the multiples of `modulus` in `[1, bound]`, each kept
/// independently with probability `p`. The `k`-th flip decides `k·modulus`.
pub fn coinflip_set(seed: u64, bound: u64, modulus: u64, p: f64) -> Result<IntWindow, ConstructionError> {
    if bound == 0 || modulus == 0 || !(0.0..=1.0).contains(&p) {
        return Err(ConstructionError::Invalid(vec!["coinflip needs bound >= 1, modulus >= 1, p in [0, 1]".into()]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = IntWindow::new(1, bound + 1);
    let mut n = modulus;
    while n <= bound {
        if rng.gen_bool(p) {
            w.insert(n).expect("inside window");
        }
        n += modulus;
    }
    Ok(w)
}

/// `A = {2n : the n-th fair flip is heads}` on `[1, bound]`.
pub fn coinflip_even_set(seed: u64, bound: u64) -> Result<IntWindow, ConstructionError> {
    if bound < 2 {
        return Err(ConstructionError::BadBound(bound));
    }
    coinflip_set(seed, bound, 2, 0.5)
}

fn block_len(t: u64, alpha: f64) -> u64 {
    (alpha * t as f64).floor() as u64
}

/// Pushes `(tZ + {1, ..., ⌊αt⌋}) ∩ [m, n)` (intersected with `hZ`) as one
/// progression per period.
fn push_block_progs(set: &mut StructuredSet, t: u64, len: u64, m: u64, n: u64, h: u64) {
    if len == 0 || m >= n {
        return;
    }
    let mut base = m / t * t;
    while base < n {
        let lo = (base + 1).max(m);
        let hi = (base + len).min(n - 1);
        if lo <= hi {
            let first = lo.div_ceil(h) * h;
            if first <= hi {
                set.push_prog(first, hi, h);
            }
        }
        base += t;
    }
}

/// `C(t, M, N) = (tZ + {1, ..., ⌊αt⌋}) ∩ [M, N)` on the window `[M, N)`.
pub fn ctmn_block(t: u64, m: u64, n: u64, alpha: f64) -> Result<IntWindow, ConstructionError> {
    if t == 0 || m >= n || !(0.0..1.0).contains(&alpha) {
        return Err(ConstructionError::Invalid(vec!["need t >= 1, M < N, α in [0, 1)".into()]));
    }
    let len = block_len(t, alpha);
    Ok(IntWindow::from_predicate(m, n, |x| {
        let r = x % t;
        r >= 1 && r <= len
    }))
}

/// Parameters of the pair `A = ∪ C(t_i, K_i, K_{i+1})`, `B = ∪ (b_i + [b_{i-2}])`.
/// Indices run from 1; `k` has one more entry than `t` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtmnParams {
    pub alpha: f64,
    pub t: Vec<u64>,
    pub k: Vec<u64>,
    pub b: Vec<u64>,
    /// Required `t_i/K_i <= 1/r1`, `i² K_i/b_i <= 1/r2`, `b_i/t_{i+1} <= 1/r3`.
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

impl CtmnParams {
    /// `t_1 = 10`, `K_i = r t_i`, `b_i = ⌈r i² K_i / t_i⌉ t_i`, `t_{i+1} = r b_i`,
    /// with every ratio threshold equal to `r`.
    pub fn preset(alpha: f64, r: u64, stages: usize) -> CtmnParams {
        let mut t = vec![10u64];
        let mut k = Vec::new();
        let mut b = Vec::new();
        for i in 1..=stages as u64 {
            let ti = *t.last().expect("nonempty");
            let ki = r * ti;
            k.push(ki);
            b.push((r * i * i * ki).div_ceil(ti) * ti);
            if (i as usize) < stages {
                t.push(r * b[b.len() - 1]);
            }
        }
        k.push(r * r * b[b.len() - 1]);
        let rf = r as f64;
        CtmnParams { alpha, t, k, b, r1: rf, r2: rf, r3: rf }
    }

    pub fn stages(&self) -> usize {
        self.t.len()
    }

    /// Lists every violated condition.
    pub fn validate(&self) -> Result<(), ConstructionError> {
        let mut bad = Vec::new();
        let s = self.t.len();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bad.push(format!("alpha = {} is not in (0, 1)", self.alpha));
        }
        if s == 0 || self.b.len() != s || self.k.len() != s + 1 {
            bad.push(format!("need |t| = |b| = s >= 1 and |K| = s + 1, got {}, {}, {}", s, self.b.len(), self.k.len()));
            return Err(ConstructionError::Invalid(bad));
        }
        if self.t.iter().chain(&self.k).chain(&self.b).any(|&x| x == 0) {
            bad.push("sequence entries must be positive".into());
        }
        if self.k.windows(2).any(|w| w[0] >= w[1]) {
            bad.push("K is not strictly increasing".into());
        }
        for i in 0..s {
            let idx = i as f64 + 1.0;
            let (t, k, b) = (self.t[i] as f64, self.k[i] as f64, self.b[i] as f64);
            if self.t[i] != 0 && self.b[i] % self.t[i] != 0 {
                bad.push(format!("b_{} = {} is not a multiple of t_{} = {}", i + 1, self.b[i], i + 1, self.t[i]));
            }
            if t / k > 1.0 / self.r1 {
                bad.push(format!("t_{0}/K_{0} = {1} exceeds 1/r1", i + 1, t / k));
            }
            if idx * idx * k / b > 1.0 / self.r2 {
                bad.push(format!("i²K_{0}/b_{0} = {1} exceeds 1/r2", i + 1, idx * idx * k / b));
            }
            if i + 1 < s && b / self.t[i + 1] as f64 > 1.0 / self.r3 {
                bad.push(format!("b_{}/t_{} = {} exceeds 1/r3", i + 1, i + 2, b / self.t[i + 1] as f64));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConstructionError::Invalid(bad))
        }
    }

    /// `b_j` for `j >= 1`; `b_j` with `j <= 0` is read as 1, so `[b_{-1}] = [b_0] = {1}`.
    fn b_at(&self, j: i64) -> u64 {
        if j <= 0 {
            1
        } else {
            self.b[j as usize - 1]
        }
    }
}

/// `A` and `B` of the ctmn pair as structured sets on `[1, K_{s+1})`.
pub fn ctmn_structured(p: &CtmnParams) -> Result<(StructuredSet, StructuredSet), ConstructionError> {
    p.validate()?;
    let mut a = StructuredSet::new();
    let mut b = StructuredSet::new();
    for i in 0..p.stages() {
        push_block_progs(&mut a, p.t[i], block_len(p.t[i], p.alpha), p.k[i], p.k[i + 1], 1);
        let bi = p.b[i];
        b.push_prog(bi + 1, bi + p.b_at(i as i64 - 1), 1);
    }
    Ok((a, b.clip(p.k[p.stages()])))
}

/// The ctmn pair materialized on `[1, bound]`.
pub fn build_ctmn_pair(p: &CtmnParams, bound: u64) -> Result<(IntWindow, IntWindow), ConstructionError> {
    if bound == 0 {
        return Err(ConstructionError::BadBound(bound));
    }
    let (a, b) = ctmn_structured(p)?;
    Ok((a.materialize(1, bound + 1), b.materialize(1, bound + 1)))
}

/// A coin-flip reference set: multiples of `modulus`, each kept with
/// probability `p`, flips drawn in order from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinFlip {
    pub seed: u64,
    pub p: f64,
    pub modulus: u64,
}

/// Parameters of the two-scale pair. `β = 1 - 1/h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoScaleParams {
    pub h: u64,
    pub alpha: f64,
    pub n: Vec<u64>,
    pub m: Vec<u64>,
    pub k: Vec<u64>,
    pub t: Vec<u64>,
    pub a_star: CoinFlip,
    pub b_star: CoinFlip,
    /// Upper bound for `M_s/t_s`, `t_s/K_s`, `K_s/N_s` and `N_{s-1}/M_s`.
    pub ratio_threshold: f64,
}

impl TwoScaleParams {
    /// `M_1 = 32`, `t_s = 32 M_s`, `K_s = 2 t_s`, `N_s = 32 K_s`,
    /// `M_{s+1} = 8 N_s`; `A*` keeps multiples of `h` with probability `αh`
    /// and `B*` keeps every integer with probability `β`.
    pub fn preset(h: u64, alpha: f64, stages: usize, seed: u64) -> TwoScaleParams {
        let (mut n, mut m, mut k, mut t) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        let mut ms = 32u64;
        for _ in 0..stages {
            let ts = 32 * ms;
            let ks = 2 * ts;
            let ns = 32 * ks;
            m.push(ms);
            t.push(ts);
            k.push(ks);
            n.push(ns);
            ms = 8 * ns;
        }
        let beta = 1.0 - 1.0 / h.max(1) as f64;
        TwoScaleParams {
            h,
            alpha,
            n,
            m,
            k,
            t,
            a_star: CoinFlip { seed, p: alpha * h as f64, modulus: h },
            b_star: CoinFlip { seed: seed.wrapping_add(1), p: beta, modulus: 1 },
            ratio_threshold: 0.5,
        }
    }

    pub fn beta(&self) -> f64 {
        1.0 - 1.0 / self.h as f64
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let mut bad = Vec::new();
        let s = self.n.len();
        if self.h < 2 {
            bad.push(format!("h = {} must be at least 2", self.h));
        }
        if !(self.alpha > 0.0 && self.alpha * (self.h as f64) < 1.0) {
            bad.push(format!("alpha = {} must lie in (0, 1/h)", self.alpha));
        }
        if s == 0 || self.m.len() != s || self.k.len() != s || self.t.len() != s {
            bad.push("N, M, K, t must be nonempty with equal lengths".into());
            return Err(ConstructionError::Invalid(bad));
        }
        if self.a_star.modulus != self.h || self.b_star.modulus == 0 {
            bad.push("A* must live on multiples of h".into());
        }
        for c in [self.a_star, self.b_star] {
            if !(0.0..=1.0).contains(&c.p) {
                bad.push(format!("reference probability {} is not in [0, 1]", c.p));
            }
        }
        let r = self.ratio_threshold;
        let ratio = |a: u64, b: u64| a as f64 / b.max(1) as f64;
        for i in 0..s {
            let checks = [
                ("M/t", ratio(self.m[i], self.t[i])),
                ("t/K", ratio(self.t[i], self.k[i])),
                ("K/N", ratio(self.k[i], self.n[i])),
            ];
            for (name, v) in checks {
                if v > r {
                    bad.push(format!("{name} at s = {} is {v}, above {r}", i + 1));
                }
            }
            if i > 0 && ratio(self.n[i - 1], self.m[i]) > r {
                bad.push(format!("N_{}/M_{} is {}, above {r}", i, i + 1, ratio(self.n[i - 1], self.m[i])));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ConstructionError::Invalid(bad))
        }
    }
}

/// `A = ∪ A_s' ∪ A_s''` and `B = ∪ B_s' ∪ B_s''` on `[1, N_S]` with
/// `A_s' = A* ∩ (N_{s-1}, K_s]`, `A_s'' = (t_s N + {1..⌊αh t_s⌋}) ∩ (K_s, N_s] ∩ hN`,
/// `B_s' = B* ∩ (N_{s-1}, M_s]`, `B_s'' = (N ∖ hN) ∩ (M_s, N_s]`.
pub fn two_scale_structured(p: &TwoScaleParams) -> Result<(StructuredSet, StructuredSet), ConstructionError> {
    p.validate()?;
    let s = p.n.len();
    let a_star = coinflip_set(p.a_star.seed, p.k[s - 1], p.a_star.modulus, p.a_star.p)?;
    let b_star = coinflip_set(p.b_star.seed, p.m[s - 1], p.b_star.modulus, p.b_star.p)?;
    let (mut a, mut b) = (StructuredSet::new(), StructuredSet::new());
    for i in 0..s {
        let prev = if i == 0 { 0 } else { p.n[i - 1] };
        if prev < p.k[i] {
            a.push_window(a_star.rewindow(prev + 1, p.k[i] + 1));
        }
        let len = block_len(p.t[i], p.alpha * p.h as f64);
        push_block_progs(&mut a, p.t[i], len, p.k[i] + 1, p.n[i] + 1, p.h);
        if prev < p.m[i] {
            b.push_window(b_star.rewindow(prev + 1, p.m[i] + 1));
        }
        for r in 1..p.h {
            let first = p.m[i] + 1 + (r + p.h - (p.m[i] + 1) % p.h) % p.h;
            b.push_prog(first, p.n[i], p.h);
        }
    }
    Ok((a, b))
}

/// The two-scale pair materialized on `[1, bound]`.
pub fn build_two_scale_pair(p: &TwoScaleParams, bound: u64) -> Result<(IntWindow, IntWindow), ConstructionError> {
    if bound == 0 {
        return Err(ConstructionError::BadBound(bound));
    }
    let (a, b) = two_scale_structured(p)?;
    Ok((a.materialize(1, bound + 1), b.materialize(1, bound + 1)))
}

/// `A = {n ∈ hN : nθ ∈ I} - a0` and `B = ({n ∈ hN : nθ ∈ J} ∪ (N ∖ hN)) - b0`,
/// both on `[1, bound]`.
pub fn lifted_bohr_pair(
    h: u64,
    theta: &TorusPoint,
    i: &TorusInterval,
    j: &TorusInterval,
    a0: u64,
    b0: u64,
    bound: u64,
) -> Result<(IntWindow, IntWindow), ConstructionError> {
    if h == 0 || a0 >= h || b0 >= h {
        return Err(ConstructionError::Invalid(vec!["need h >= 1 and a0, b0 in [0, h)".into()]));
    }
    if bound == 0 {
        return Err(ConstructionError::BadBound(bound));
    }
    let lift = |interval: &TorusInterval, shift: u64, fill: bool| -> Result<IntWindow, ConstructionError> {
        let members = bohr_members(theta, interval, 1, bound + shift + 1)?.window;
        let mut w = IntWindow::new(1, bound + 1);
        for n in 1 + shift..=bound + shift {
            let inside = if n % h == 0 { crate::density::CountingSet::contains(&members, n) } else { fill };
            if inside {
                w.insert(n - shift).expect("inside window");
            }
        }
        Ok(w)
    };
    Ok((lift(i, a0, false)?, lift(j, b0, true)?))
}
