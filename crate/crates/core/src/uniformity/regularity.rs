use super::u2::u2_interval;
use super::{SignalWindow, UniformityError};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    /// Mean of `f` on each block of length `L`, aligned to the start.
    pub structured: Vec<f64>,
    pub uniform: Vec<f64>,
}

/// `f = f_str + f_unf` with `f_str` the blockwise mean. A trailing partial
/// block is averaged over its own length.
pub fn block_decompose(f: &[f64], block: usize) -> Result<BlockDecomposition, UniformityError> {
    if block == 0 {
        return Err(UniformityError::ZeroBlock);
    }
    let mut structured = Vec::with_capacity(f.len());
    for chunk in f.chunks(block) {
        let mean = chunk.iter().sum::<f64>() / chunk.len() as f64;
        structured.extend(std::iter::repeat(mean).take(chunk.len()));
    }
    let uniform = f.iter().zip(&structured).map(|(a, b)| a - b).collect();
    Ok(BlockDecomposition { structured, uniform })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityDecomposition {
    pub structured: Vec<f64>,
    pub pseudorandom: Vec<f64>,
    /// Extracted frequencies in order; the first is always 0.
    pub frequencies: Vec<f64>,
    /// Measured `‖f_psd‖_{u²([N])}`.
    pub u2: f64,
    /// Whether the measured value is at most `ε`.
    pub success: bool,
}

/// Target for the unclamped residual, leaving room for the clamp.
const TARGET: f64 = 0.9;

/// Gram-Schmidt basis of the structured span.
struct Basis {
    vectors: Vec<Vec<f64>>,
}

impl Basis {
    /// Orthonormalizes `v` against the basis (two passes) and adds it
    /// unless it is numerically dependent.
    fn push(&mut self, mut v: Vec<f64>) -> Option<&[f64]> {
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-8 * scale.max(1e-300) {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        self.vectors.push(v);
        self.vectors.last().map(|v| v.as_slice())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Shifts `p` by the `λ` for which `Σ clamp(p + λ, 0, 1) = target`.
fn clamp_to_sum(p: &[f64], target: f64) -> Vec<f64> {
    let clamped = |l: f64| -> f64 { p.iter().map(|x| (x + l).clamp(0.0, 1.0)).sum() };
    let lo_p = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_p = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (-hi_p - 1.0, 1.0 - lo_p);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clamped(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = 0.5 * (lo + hi);
    p.iter().map(|x| (x + l).clamp(0.0, 1.0)).collect()
}

fn measure(v: &[f64]) -> Result<(f64, f64), UniformityError> {
    let e = u2_interval(&SignalWindow::from_real(0, v))?;
    Ok((e.value, e.alpha))
}

/// Splits a `[0, 1]`-valued `f` on `[N]` into `f_str + f_psd`.
///
/// Starting from the constant, the dominant `u²` frequency of the residual
/// is added as a cosine/sine pair and `f` is projected onto the span. After
/// each step the projection is clamped to `[0, 1]` and shifted so that
/// `f_psd` has mean zero; the process stops once `‖f_psd‖_{u²} <= ε` or
/// after `⌈4/ε²⌉` frequencies.
pub fn regularity_decompose(f: &[f64], eps: f64) -> Result<RegularityDecomposition, UniformityError> {
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(UniformityError::BadEpsilon(eps));
    }
    if let Some(&v) = f.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(UniformityError::OutsideUnitInterval(v));
    }
    let n = f.len();
    let cap = (4.0 / (eps * eps)).ceil() as usize;
    let total: f64 = f.iter().sum();
    let mut basis = Basis { vectors: Vec::new() };
    let mut projection = vec![0.0; n];
    let mut residual = f.to_vec();
    let mut frequencies = Vec::new();
    let mut next = Some(0.0);
    loop {
        if let Some(alpha) = next {
            frequencies.push(alpha);
            let atoms: Vec<Vec<f64>> = if alpha == 0.0 {
                vec![vec![1.0; n]]
            } else {
                let phase = |i: usize| TAU * (alpha * (i + 1) as f64).fract();
                vec![(0..n).map(|i| phase(i).cos()).collect(), (0..n).map(|i| phase(i).sin()).collect()]
            };
            for atom in atoms {
                if let Some(q) = basis.push(atom) {
                    let c = dot(q, &residual);
                    for ((r, p), y) in residual.iter_mut().zip(projection.iter_mut()).zip(q) {
                        *r -= c * y;
                        *p += c * y;
                    }
                }
            }
        }
        let structured = clamp_to_sum(&projection, total);
        let pseudorandom: Vec<f64> = f.iter().zip(&structured).map(|(a, b)| a - b).collect();
        let (u2, _) = measure(&pseudorandom)?;
        if u2 <= eps {
            return Ok(RegularityDecomposition { structured, pseudorandom, frequencies, u2, success: true });
        }
        let (res_u2, alpha) = measure(&residual)?;
        let candidate = if res_u2 > TARGET * eps { alpha } else { measure(&pseudorandom)?.1 };
        let stalled = frequencies.iter().any(|&a| (a - candidate).abs() < 1e-12);
        if frequencies.len() > cap || stalled {
            return Ok(RegularityDecomposition { structured, pseudorandom, frequencies, u2, success: false });
        }
        next = Some(candidate);
    }
}
