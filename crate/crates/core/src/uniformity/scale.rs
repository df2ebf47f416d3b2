use super::{check_order, Complex64, SignalWindow, UniformityError};
use rayon::prelude::*;

fn check_window(f: &[Complex64], n: usize, h: usize) -> Result<(), UniformityError> {
    if h == 0 || h > n {
        return Err(UniformityError::BadWindow { n, h });
    }
    if f.len() < n {
        return Err(UniformityError::TooShort { len: f.len(), n });
    }
    Ok(())
}

fn prefix_sums(f: &[Complex64]) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(f.len() + 1);
    p.push(Complex64::new(0.0, 0.0));
    for v in f {
        let last = *p.last().expect("nonempty");
        p.push(last + v);
    }
    p
}

/// `(1/(N-H+1)) Σ_{n=1}^{N-H+1} |(1/H) Σ_{j<H} f(n+j)|`, where `f[0] = f(1)`.
pub fn u1_scale_estimate(f: &[Complex64], n: usize, h: usize) -> Result<f64, UniformityError> {
    check_window(f, n, h)?;
    let p = prefix_sums(&f[..n]);
    let windows = n - h + 1;
    let total: f64 = (0..windows).map(|s| (p[s + h] - p[s]).norm() / h as f64).sum();
    Ok(total / windows as f64)
}

/// Average of `‖f‖_{U^k({n, ..., n+H-1})}` over `n = 1, ..., N-H+1`.
pub fn u2_scale_estimate(f: &[Complex64], n: usize, h: usize, k: u32) -> Result<f64, UniformityError> {
    check_order(k)?;
    if k == 1 {
        return u1_scale_estimate(f, n, h);
    }
    check_window(f, n, h)?;
    let windows = n - h + 1;
    let total: f64 = (0..windows)
        .into_par_iter()
        .map(|s| super::gowers_interval(&SignalWindow::new(s as u64, f[s..s + h].to_vec()), 2))
        .collect::<Result<Vec<f64>, _>>()?
        .into_iter()
        .sum();
    Ok(total / windows as f64)
}

/// `(1/N) Σ_{n=1}^{N} |(1/H) Σ_{h=1}^{H} f(n+h)|` with `f` zero past its end.
pub fn local_ergodicity_stat(f: &[Complex64], n: usize, h: usize) -> Result<f64, UniformityError> {
    if h == 0 || n == 0 {
        return Err(UniformityError::BadWindow { n, h });
    }
    let p = prefix_sums(f);
    let at = |i: usize| p[i.min(f.len())];
    // Σ_{j=m+1}^{m+H} f(j) with f(j) = f[j-1].
    let total: f64 = (1..=n).map(|m| (at(m + h) - at(m)).norm() / h as f64).sum();
    Ok(total / n as f64)
}
