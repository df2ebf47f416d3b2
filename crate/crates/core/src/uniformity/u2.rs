use super::{Complex64, SignalWindow, UniformityError};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Grid local maxima refined by golden-section search.
const REFINED_PEAKS: usize = 4;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2Estimate {
    /// `|(1/N) Σ f(x+n) e(αn)|` at the best frequency found.
    pub value: f64,
    /// The maximizing frequency in `[0, 1)`.
    pub alpha: f64,
    pub grid_size: usize,
    /// `π · value · N / grid_size`, the first-order Bernstein bound on the
    /// gap between the grid maximum and the supremum.
    pub error_bound: f64,
}

/// `|(1/N) Σ_{i<N} v_i e(α i)|`; the phase shift from `n = i + 1` does not
/// change the modulus.
pub(crate) fn exp_sum_at(values: &[Complex64], alpha: f64) -> f64 {
    let step = Complex64::from_polar(1.0, TAU * alpha);
    let mut w = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        // Re-seed the rotation periodically to bound drift.
        if i % 256 == 0 {
            w = Complex64::from_polar(1.0, TAU * (alpha * i as f64).fract());
        }
        s += v * w;
        w *= step;
    }
    s.norm() / values.len() as f64
}

/// `|(1/N) Σ v_i e(ij/G)|` for every `j < G`.
pub(crate) fn grid_values(values: &[Complex64], g: usize) -> Vec<f64> {
    let mut buf = values.to_vec();
    buf.resize(g, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_inverse(g).process(&mut buf);
    let n = values.len() as f64;
    buf.iter().map(|c| c.norm() / n).collect()
}

fn golden_max(values: &[Complex64], lo: f64, hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (exp_sum_at(values, c), exp_sum_at(values, d));
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = exp_sum_at(values, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = exp_sum_at(values, d);
        }
    }
    if fc >= fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

/// `sup_α |(1/N) Σ_{n=1}^{N} f(x+n) e(αn)|` estimated on a grid of spacing
/// at most `1/(8N)` and refined around the best grid peaks. Every reported
/// value is an actual evaluation, so it never exceeds the supremum.
pub fn u2_interval(f: &SignalWindow) -> Result<U2Estimate, UniformityError> {
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    let g = (8 * f.len()).next_power_of_two();
    let grid = grid_values(&f.values, g);
    let mut peaks: Vec<usize> =
        (0..g).filter(|&j| grid[j] >= grid[(j + g - 1) % g] && grid[j] >= grid[(j + 1) % g]).collect();
    peaks.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));
    peaks.truncate(REFINED_PEAKS);
    let (mut value, mut alpha) = (grid[peaks[0]], peaks[0] as f64 / g as f64);
    for &j in &peaks {
        let centre = j as f64 / g as f64;
        let (v, a) = golden_max(&f.values, centre - 1.0 / g as f64, centre + 1.0 / g as f64);
        if v > value {
            value = v;
            alpha = a.rem_euclid(1.0);
        }
    }
    let error_bound = std::f64::consts::PI * value * f.len() as f64 / g as f64;
    Ok(U2Estimate { value, alpha, grid_size: g, error_bound })
}
