//! Densities of subsets of the naturals on finite windows, Schnirelmann
//! density, and the constructive Schnirelmann subinterval finder.
//!
//! Sets are accessed through [`CountingSet`], implemented by dense windows
//! ([`IntWindow`]), lazily materialized predicates ([`LazyWindow`]) and
//! unions of progressions and windows ([`StructuredSet`]).

mod structured;
mod window;

pub use structured::{Piece, StructuredSet};
pub use window::{IntWindow, LazyWindow, LAZY_BLOCK};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("{n} outside window [{lo}, {hi})")]
    OutOfWindow { n: u64, lo: u64, hi: u64 },
    #[error("checkpoints must be positive and strictly increasing")]
    BadCheckpoints,
    #[error("N must be positive")]
    ZeroLength,
    #[error("sigma(A, [N]) = 0, so the hypothesis fails")]
    ZeroSchnirelmann,
    #[error("|A| = {size} is below delta N = {bound}")]
    TooSmall { size: u64, bound: f64 },
    #[error("epsilon must be positive")]
    BadEpsilon,
    #[error("postcondition violated: {0}")]
    Postcondition(String),
}

/// Exact membership and counting on the naturals.
pub trait CountingSet {
    fn contains(&self, n: u64) -> bool;
    /// `|S ∩ [a, b)|`.
    fn count_range(&self, a: u64, b: u64) -> u64;
    /// `|S ∩ [1, n]|`.
    fn count_upto(&self, n: u64) -> u64 {
        self.count_range(1, n + 1)
    }
    /// `|S ∩ [1, n]| / n`.
    fn density_at(&self, n: u64) -> f64 {
        self.count_upto(n) as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub checkpoints: Vec<u64>,
    pub counts: Vec<u64>,
    pub values: Vec<f64>,
    pub running_min: Vec<f64>,
    pub running_max: Vec<f64>,
}

impl DensityProfile {
    /// `N,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,value\n");
        for (n, v) in self.checkpoints.iter().zip(&self.values) {
            s.push_str(&format!("{n},{v}\n"));
        }
        s
    }
}

/// `|A ∩ [N_i]| / N_i` at each checkpoint.
pub fn density_profile(set: &impl CountingSet, checkpoints: &[u64]) -> Result<DensityProfile, DensityError> {
    if checkpoints.first() == Some(&0) || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::BadCheckpoints);
    }
    let mut counts = Vec::with_capacity(checkpoints.len());
    let mut prev = (0u64, 0u64);
    for &n in checkpoints {
        let c = prev.1 + set.count_range(prev.0 + 1, n + 1);
        counts.push(c);
        prev = (n, c);
    }
    let values: Vec<f64> = counts.iter().zip(checkpoints).map(|(&c, &n)| c as f64 / n as f64).collect();
    let running_min = values.iter().scan(f64::INFINITY, |m, &v| {
        *m = m.min(v);
        Some(*m)
    });
    let running_max = values.iter().scan(f64::NEG_INFINITY, |m, &v| {
        *m = m.max(v);
        Some(*m)
    });
    Ok(DensityProfile {
        checkpoints: checkpoints.to_vec(),
        running_min: running_min.collect(),
        running_max: running_max.collect(),
        counts,
        values,
    })
}

/// `σ(A, [N]) = min_{1 <= M <= N} |A ∩ [M]| / M`, exactly.
pub fn schnirelmann(set: &impl CountingSet, n: u64) -> Result<Ratio<u64>, DensityError> {
    schnirelmann_on(set, 1, n)
}

/// `σ(A, {a, ..., b}) = min_{a <= x <= b} |A ∩ {a, ..., x}| / (x - a + 1)`.
pub fn schnirelmann_on(set: &impl CountingSet, a: u64, b: u64) -> Result<Ratio<u64>, DensityError> {
    if b < a {
        return Err(DensityError::ZeroLength);
    }
    let mut best = Ratio::new(1, 1);
    let mut count = 0u64;
    for x in a..=b {
        count += set.contains(x) as u64;
        let r = Ratio::new(count, x - a + 1);
        if r < best {
            best = r;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionCheck {
    pub n: u64,
    /// `σ(A, [N])` as `(numerator, denominator)`.
    pub alpha: (u64, u64),
    pub beta: (u64, u64),
    /// `|(A ∪ (A+B)) ∩ [N]|`.
    pub union_count: u64,
    pub holds: bool,
}

/// Checks `|A ∪ (A+B)| / N >= α + β(1 - α)` on `[N]` with `α = σ(A,[N])`,
/// `β = σ(B,[N])`, in exact rational arithmetic. `A` and `B` are read on
/// `[1, N]`.
pub fn schnirelmann_union_check(a: &IntWindow, b: &IntWindow, n: u64) -> Result<UnionCheck, DensityError> {
    if n == 0 {
        return Err(DensityError::ZeroLength);
    }
    let a = a.rewindow(1, n + 1);
    let b = b.rewindow(1, n + 1);
    let alpha = schnirelmann(&a, n)?;
    if *alpha.numer() == 0 {
        return Err(DensityError::ZeroSchnirelmann);
    }
    let beta = schnirelmann(&b, n)?;
    let union_count = if b.is_empty() { a.len() } else { a.sumset(&b).rewindow(1, n + 1).union(&a).len() };
    let one = Ratio::from_integer(1u64);
    let rhs = alpha + beta * (one - alpha);
    let holds = Ratio::new(union_count, n) >= rhs;
    Ok(UnionCheck {
        n,
        alpha: (*alpha.numer(), *alpha.denom()),
        beta: (*beta.numer(), *beta.denom()),
        union_count,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionSweep {
    pub n: u32,
    pub tested: u64,
    /// `(A, B)` bitmasks, bit `i - 1` for element `i`.
    pub violations: Vec<(u32, u32)>,
}

/// [`schnirelmann_union_check`] over every `A ∋ 1` and every `B` in `[N]`,
/// using bitmasks and cross-multiplied integer comparisons.
///
/// # Panics
/// If `n > 20`.
pub fn schnirelmann_union_sweep(n: u32) -> UnionSweep {
    assert!((1..=20).contains(&n), "sweep supports 1 <= N <= 20");
    let full = (1u32 << n) - 1;
    // sigma[mask] = (s, m) minimizing s / m.
    let sigma: Vec<(u64, u64)> = (0..=full)
        .map(|mask| {
            let mut best = (1u64, 1u64);
            let mut c = 0u64;
            for m in 1..=n as u64 {
                c += ((mask >> (m - 1)) & 1) as u64;
                if c * best.1 < best.0 * m {
                    best = (c, m);
                }
            }
            best
        })
        .collect();
    let mut tested = 0u64;
    let mut violations = Vec::new();
    for b in 0..=full {
        let (sb, mb) = sigma[b as usize];
        let shifts: Vec<u32> = (0..n).filter(|i| (b >> i) & 1 == 1).map(|i| i + 1).collect();
        for a in (1..=full).step_by(2) {
            let (sa, ma) = sigma[a as usize];
            let mut sum = 0u32;
            for &s in &shifts {
                sum |= a << s;
            }
            let count = ((sum | a) & full).count_ones() as u64;
            // count / n >= (sa mb + sb (ma - sa)) / (ma mb)
            let lhs = count * ma * mb;
            let rhs = n as u64 * (sa * mb + sb * (ma - sa));
            tested += 1;
            if lhs < rhs {
                violations.push((a, b));
            }
        }
    }
    UnionSweep { n, tested, violations }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subinterval {
    pub x: u64,
    /// `σ(A, {x+1, ..., N})`.
    pub sigma: (u64, u64),
}

/// Absolute slack in the comparison `|A ∩ [M]| <= (δ - ε) M`.
const RULE_SLACK: f64 = 1e-9;

/// `x = max{M in [N] : |A ∩ [M]| <= (δ - ε) M}` (0 if none), returned only
/// after checking `x <= (1 - ε) N` and `σ(A, {x+1, ..., N}) > δ - ε`.
pub fn find_schnirelmann_subinterval(a: &impl CountingSet, n: u64, delta: f64, eps: f64) -> Result<Subinterval, DensityError> {
    if n == 0 {
        return Err(DensityError::ZeroLength);
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(DensityError::BadEpsilon);
    }
    let size = a.count_upto(n);
    if (size as f64) < delta * n as f64 {
        return Err(DensityError::TooSmall { size, bound: delta * n as f64 });
    }
    let slope = delta - eps;
    let mut x = 0;
    let mut c = 0u64;
    for m in 1..=n {
        c += a.contains(m) as u64;
        if c as f64 <= slope * m as f64 + RULE_SLACK {
            x = m;
        }
    }
    if x as f64 > (1.0 - eps) * n as f64 {
        return Err(DensityError::Postcondition(format!("x = {x} exceeds (1 - eps) N")));
    }
    let sigma = schnirelmann_on(a, x + 1, n)?;
    if *sigma.numer() as f64 <= slope * *sigma.denom() as f64 {
        return Err(DensityError::Postcondition(format!("sigma = {sigma} is not above delta - eps")));
    }
    Ok(Subinterval { x, sigma: (*sigma.numer(), *sigma.denom()) })
}
