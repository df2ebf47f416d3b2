use super::{EquidistError, Pos, TorusPoint, TWO64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn check_eps(eps: f64) -> Result<(), EquidistError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(EquidistError::BadEpsilon(eps))
    }
}

fn check_dim(d: u32) -> Result<(), EquidistError> {
    if d == 0 {
        Err(EquidistError::ZeroDimension)
    } else {
        Ok(())
    }
}

/// `D(d, ε) = 2 d^{d/2+2} 3^{d+2} ε^{-d}`.
pub fn paper_constant_d(d: u32, eps: f64) -> Result<f64, EquidistError> {
    check_dim(d)?;
    check_eps(eps)?;
    let df = d as f64;
    Ok(2.0 * df.powf(df / 2.0 + 2.0) * 3f64.powi(d as i32 + 2) * eps.powi(-(d as i32)))
}

/// `C0(d, ε) = d^{d/2+2} 3^{d+2} (2D+1)^d / ε^{d+1}`.
pub fn paper_constant_c0(d: u32, eps: f64) -> Result<f64, EquidistError> {
    let big_d = paper_constant_d(d, eps)?;
    let df = d as f64;
    Ok(df.powf(df / 2.0 + 2.0) * 3f64.powi(d as i32 + 2) * (2.0 * big_d + 1.0).powi(d as i32) / eps.powi(d as i32 + 1))
}

/// `C(1, ε) = ε^{-2}` and `C(d, ε) = max{C0(d, ε), C(d-1, ε/(2d C0(d, ε))), 2/ε}`.
pub fn paper_constant_c(d: u32, eps: f64) -> Result<f64, EquidistError> {
    check_dim(d)?;
    check_eps(eps)?;
    if d == 1 {
        return Ok(eps.powi(-2));
    }
    let c0 = paper_constant_c0(d, eps)?;
    let inner = paper_constant_c(d - 1, eps / (2.0 * d as f64 * c0))?;
    Ok(c0.max(inner).max(2.0 / eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseCheck {
    /// `‖Σ w_i α_i‖ >= C0/H` for every nonzero integer `w` with `|w_i| <= C0`.
    pub hypothesis_holds: bool,
    /// The orbit `{kα : 0 <= k <= ⌊εH⌋}` is `ε`-dense in the sup metric.
    pub orbit_dense: bool,
    /// False when the grid refinement budget ran out before a decision; in
    /// that case `orbit_dense` is false.
    pub conclusive: bool,
}

/// Largest number of grid-to-orbit distance evaluations in the `d >= 2` test.
const GRID_BUDGET: f64 = 4e9;

/// Checks the hypothesis and conclusion of the almost-denseness lemma for the
/// orbit `{kα : k = 0, ..., ⌊εH⌋}` with constant `c0`.
///
/// In dimension 1 the largest gap of the orbit is computed exactly by the
/// three-gap theorem, so any `H` is supported. In higher dimension grids of
/// step `s <= ε/2` are refined until every grid point lies within `ε - s/2`
/// of the orbit (dense) or some grid point is farther than `ε` (not dense).
pub fn epsilon_dense_check(alphas: &[TorusPoint], h: u64, eps: f64, c0: f64) -> Result<DenseCheck, EquidistError> {
    check_eps(eps)?;
    if alphas.is_empty() {
        return Err(EquidistError::ZeroDimension);
    }
    let hypothesis_holds = hypothesis(alphas, h, c0)?;
    let n = (eps * h as f64).floor() as u64 + 1;
    let (orbit_dense, conclusive) = if alphas.len() == 1 {
        let (gap, modulus) = max_gap(&alphas[0].pos(), n);
        ((gap as f64) <= 2.0 * eps * modulus as f64, true)
    } else {
        grid_dense(alphas, n, eps)?
    };
    Ok(DenseCheck { hypothesis_holds, orbit_dense, conclusive })
}

fn hypothesis(alphas: &[TorusPoint], h: u64, c0: f64) -> Result<bool, EquidistError> {
    if !c0.is_finite() || c0 < 0.0 {
        return Err(EquidistError::NotFinite(c0));
    }
    let w_max = c0.floor() as i64;
    let d = alphas.len() as i32;
    let count = (2.0 * w_max as f64 + 1.0).powi(d);
    if count > 1e10 {
        return Err(EquidistError::TooManyFrequencies(count));
    }
    let threshold = c0 / h as f64;
    let fixed: Vec<u64> = alphas.iter().map(|a| a.pos().fixed()).collect();
    let mut w = vec![-w_max; alphas.len()];
    loop {
        // Only one of each pair w, -w: the first nonzero coordinate is positive.
        if w.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            let s = fixed.iter().zip(&w).fold(0u64, |acc, (&a, &wi)| acc.wrapping_add(a.wrapping_mul(wi as u64)));
            if (s.min(s.wrapping_neg()) as f64 / TWO64) < threshold {
                return Ok(false);
            }
        }
        let mut i = 0;
        while i < w.len() {
            w[i] += 1;
            if w[i] <= w_max {
                break;
            }
            w[i] = -w_max;
            i += 1;
        }
        if i == w.len() {
            return Ok(true);
        }
    }
}

/// Largest gap between consecutive points of `{kα : 0 <= k < n}`, in units of
/// `1/modulus`, together with the modulus (`q` for `α = p/q`, else `2^64`).
pub(crate) fn max_gap(alpha: &Pos, n: u64) -> (u128, u128) {
    let (x, modulus) = match *alpha {
        Pos::Rat(p, q) => (p as u128, q as u128),
        Pos::Fix(x) => (x as u128, 1u128 << 64),
    };
    let mut n = n;
    'restart: loop {
        if n <= 1 || x == 0 {
            return (modulus, modulus);
        }
        // Nearest point to the right of 0 at index u (distance a) and to the
        // left at index v (distance b), among indices 1..n.
        let (mut u, mut a) = (1u128, x);
        let (mut v, mut b) = (1u128, modulus - x);
        let limit = n as u128 - 1;
        loop {
            if a > b {
                let c = (a / b).min((limit - u) / v);
                if c == 0 {
                    break;
                }
                u += c * v;
                a -= c * b;
                if a == 0 {
                    n = u as u64;
                    continue 'restart;
                }
            } else if b > a {
                let c = (b / a).min((limit - v) / u);
                if c == 0 {
                    break;
                }
                v += c * u;
                b -= c * a;
                if b == 0 {
                    n = v as u64;
                    continue 'restart;
                }
            } else {
                // a == b: 2α = 0, period 2.
                if u + v <= limit {
                    n = (u + v) as u64;
                    continue 'restart;
                }
                break;
            }
        }
        let gap = if u + v > n as u128 { a + b } else { a.max(b) };
        return (gap, modulus);
    }
}

fn grid_dense(alphas: &[TorusPoint], n: u64, eps: f64) -> Result<(bool, bool), EquidistError> {
    let d = alphas.len();
    let orbit: Vec<Vec<u64>> =
        (0..n).map(|k| alphas.iter().map(|a| a.multiple(k).fixed()).collect()).collect();
    let far = (eps * TWO64) as u64;
    let mut g = (2.0 / eps).ceil() as u64;
    loop {
        let cells = (g as f64).powi(d as i32);
        if cells * n as f64 > GRID_BUDGET {
            return Ok((false, false));
        }
        let step = TWO64 / g as f64;
        let near = ((eps - 0.5 / g as f64) * TWO64) as u64;
        let distances: Vec<u64> = (0..cells as u64)
            .into_par_iter()
            .map(|idx| {
                let mut rest = idx;
                let point: Vec<u64> = (0..d)
                    .map(|_| {
                        let j = rest % g;
                        rest /= g;
                        (j as f64 * step) as u64
                    })
                    .collect();
                orbit
                    .iter()
                    .map(|o| {
                        o.iter()
                            .zip(&point)
                            .map(|(&a, &b)| {
                                let t = a.wrapping_sub(b);
                                t.min(t.wrapping_neg())
                            })
                            .max()
                            .unwrap_or(0)
                    })
                    .min()
                    .unwrap_or(u64::MAX)
            })
            .collect();
        let worst = distances.into_iter().max().unwrap_or(0);
        if worst > far {
            return Ok((false, true));
        }
        if worst <= near {
            return Ok((true, true));
        }
        g *= 2;
    }
}

/// First `m` with `(x - ε)H <= m <= (x + ε)H`, `m >= 1` and `‖mα_i‖ <= ε` for
/// every `i`.
pub fn almost_period_search(alphas: &[TorusPoint], h: u64, x: f64, eps: f64) -> Result<Option<u64>, EquidistError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(EquidistError::BadEpsilon(eps));
    }
    if !x.is_finite() {
        return Err(EquidistError::NotFinite(x));
    }
    let lo = ((x - eps) * h as f64).ceil().max(1.0) as u64;
    let hi = ((x + eps) * h as f64).floor().max(0.0) as u64;
    if lo > hi {
        return Err(EquidistError::EmptyRange);
    }
    let found = (lo..=hi).find(|&m| alphas.iter().all(|a| a.multiple(m).norm() <= eps));
    if let Some(m) = found {
        let mf = m as f64;
        assert!(
            (x - eps) * h as f64 <= mf && mf <= (x + eps) * h as f64,
            "almost period {m} outside its window"
        );
        assert!(alphas.iter().all(|a| a.multiple(m).norm() <= eps), "almost period {m} fails the norm bound");
    }
    Ok(found)
}
