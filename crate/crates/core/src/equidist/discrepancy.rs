use super::{EquidistError, Pos, TorusPoint, TWO64};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    Closed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub n: usize,
    pub value: f64,
    /// An arc from `left` counterclockwise to `right` attaining the value.
    pub left: f64,
    pub right: f64,
    pub kind: ArcKind,
}

/// `sup_I | #{x_j in I}/N - |I| |` scaled by `N·2^64`, as an exact integer.
fn to_value(numerator: i128, n: usize) -> f64 {
    numerator as f64 / (n as f64 * TWO64)
}

/// Exact discrepancy of fixed-point positions via the sorted-gap formula
/// `D = 1/N + max_i (i/N - x_(i)) - min_i (i/N - x_(i))`.
///
/// # Panics
/// If `xs` is empty.
pub fn discrepancy_fixed(xs: &[u64]) -> DiscrepancyResult {
    assert!(!xs.is_empty(), "discrepancy of an empty sequence");
    let n = xs.len();
    let mut s = xs.to_vec();
    s.sort_unstable();
    let unit: i128 = 1 << 64;
    let (mut hi, mut lo) = ((i128::MIN, 0usize), (i128::MAX, 0usize));
    for (i, &x) in s.iter().enumerate() {
        let v = (i as i128 + 1) * unit - n as i128 * x as i128;
        if v > hi.0 {
            hi = (v, i);
        }
        if v < lo.0 {
            lo = (v, i);
        }
    }
    let numerator = unit + hi.0 - lo.0;
    let (left, right, kind) = if hi.1 >= lo.1 {
        (s[lo.1], s[hi.1], ArcKind::Closed)
    } else {
        (s[hi.1], s[lo.1], ArcKind::Open)
    };
    DiscrepancyResult {
        n,
        value: to_value(numerator, n),
        left: left as f64 / TWO64,
        right: right as f64 / TWO64,
        kind,
    }
}

pub fn discrepancy_exact(points: &[TorusPoint]) -> Result<DiscrepancyResult, EquidistError> {
    if points.is_empty() {
        return Err(EquidistError::EmptyRange);
    }
    let xs: Vec<u64> = points.iter().map(|p| p.pos().fixed()).collect();
    Ok(discrepancy_fixed(&xs))
}

/// `nθ mod 1` for `n = 1, ..., count`; exact and reduced for rationals, and for floats
/// the exact fixed-point multiple rounded to `f64`.
pub fn kronecker_points(theta: &TorusPoint, count: u64) -> Vec<TorusPoint> {
    (1..=count)
        .map(|n| match theta.multiple(n) {
            Pos::Rat(p, q) => TorusPoint::rational(p, q).expect("nonzero denominator"),
            Pos::Fix(x) => TorusPoint::float(x as f64 / TWO64).expect("finite"),
        })
        .collect()
}

/// Discrepancy of `nθ`, `n = 1, ..., count`, from exact fixed-point multiples.
pub fn kronecker_discrepancy(theta: &TorusPoint, count: u64) -> Result<DiscrepancyResult, EquidistError> {
    if count == 0 {
        return Err(EquidistError::EmptyRange);
    }
    let xs: Vec<u64> = (1..=count).map(|n| theta.multiple(n).fixed()).collect();
    Ok(discrepancy_fixed(&xs))
}

/// All-pairs evaluation over closed arcs `[v_i, v_j]` (which maximize
/// count minus length) and open arcs `(v_i, v_j)` (which maximize length
/// minus count), wrapping arcs included. `O(N^2)`.
pub fn discrepancy_oracle(xs: &[u64]) -> f64 {
    assert!(!xs.is_empty());
    let n = xs.len() as i128;
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    let m = v.len();
    let mut prefix = vec![0i128; m + 1];
    {
        let mut sorted = xs.to_vec();
        sorted.sort_unstable();
        let mut k = 0;
        for (i, &val) in v.iter().enumerate() {
            while k < sorted.len() && sorted[k] == val {
                k += 1;
            }
            prefix[i + 1] = k as i128;
        }
    }
    let unit: i128 = 1 << 64;
    let mut best = i128::MIN;
    for i in 0..m {
        for j in i..m {
            let len = (v[j] - v[i]) as i128;
            // closed [v_i, v_j]
            let c = prefix[j + 1] - prefix[i];
            best = best.max(c * unit - n * len);
            // closed wrap [v_j, v_i] through 0
            let cw = n - (prefix[j] - prefix[i + 1]).max(0);
            best = best.max(cw * unit - n * (unit - len));
            // open (v_i, v_j)
            let co = if j > i { prefix[j] - prefix[i + 1] } else { 0 };
            if j > i {
                best = best.max(n * len - co * unit);
            }
            // open wrap (v_j, v_i) through 0
            let cow = n - (prefix[j + 1] - prefix[i]);
            best = best.max(n * (unit - len) - cow * unit);
        }
    }
    to_value(best, xs.len())
}

fn exp_sum(positions: &[u64], k: u64) -> Complex64 {
    positions
        .iter()
        .map(|&x| {
            let a = x.wrapping_mul(k) as f64 / TWO64 * TAU;
            Complex64::new(a.cos(), a.sin())
        })
        .sum()
}

fn fixed_positions(points: &[TorusPoint]) -> Vec<u64> {
    points.iter().map(|p| p.pos().fixed()).collect()
}

/// `C0 (1/n + (1/m) Σ_{k<=n} (1/k) |Σ_j e(k t_j)|)`.
pub fn erdos_turan_bound(points: &[TorusPoint], n: u64, c0: f64) -> Result<f64, EquidistError> {
    if points.is_empty() || n == 0 {
        return Err(EquidistError::EmptyRange);
    }
    let m = points.len() as f64;
    let rational = points.iter().all(|p| p.is_rational());
    let fixed = fixed_positions(points);
    let sum: f64 = (1..=n)
        .map(|k| {
            let s = if rational { exp_sum_rational(points, k) } else { exp_sum(&fixed, k) };
            s.norm() / k as f64
        })
        .sum();
    Ok(c0 * (1.0 / n as f64 + sum / m))
}

/// Rational points use exact residues so that vanishing sums vanish up to
/// rounding of `cos`/`sin` only.
fn exp_sum_rational(points: &[TorusPoint], k: u64) -> Complex64 {
    points
        .iter()
        .map(|p| match p.multiple(k) {
            Pos::Rat(r, q) => {
                let a = r as f64 / q as f64 * TAU;
                Complex64::new(a.cos(), a.sin())
            }
            Pos::Fix(x) => {
                let a = x as f64 / TWO64 * TAU;
                Complex64::new(a.cos(), a.sin())
            }
        })
        .sum()
}

/// `6 d^2 3^d (1/n + (1/m) Σ_{0 < |h|_∞ <= n} |Σ_j e(<h, t_j>)| / Π max(1, |h_i|))`.
pub fn etk_bound(points: &[Vec<TorusPoint>], n: u64) -> Result<f64, EquidistError> {
    let d = points.first().map(|p| p.len()).ok_or(EquidistError::EmptyRange)?;
    if d == 0 {
        return Err(EquidistError::ZeroDimension);
    }
    if n == 0 || points.iter().any(|p| p.len() != d) {
        return Err(EquidistError::EmptyRange);
    }
    let count = (2.0 * n as f64 + 1.0).powi(d as i32);
    if count * points.len() as f64 > 1e10 {
        return Err(EquidistError::TooManyFrequencies(count));
    }
    let m = points.len() as f64;
    let fixed: Vec<Vec<u64>> = points.iter().map(|p| fixed_positions(p)).collect();
    let n = n as i64;
    let mut h = vec![-n; d];
    let mut total = 0.0;
    loop {
        if h.iter().any(|&x| x != 0) {
            let weight: f64 = h.iter().map(|&x| x.unsigned_abs().max(1) as f64).product();
            let s: Complex64 = fixed
                .iter()
                .map(|x| {
                    let phase = x.iter().zip(&h).fold(0u64, |acc, (&xi, &hi)| acc.wrapping_add(xi.wrapping_mul(hi as u64)));
                    let a = phase as f64 / TWO64 * TAU;
                    Complex64::new(a.cos(), a.sin())
                })
                .sum();
            total += s.norm() / weight;
        }
        let mut i = 0;
        while i < d {
            h[i] += 1;
            if h[i] <= n {
                break;
            }
            h[i] = -n;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    let df = d as f64;
    Ok(6.0 * df * df * 3f64.powi(d as i32) * (1.0 / n as f64 + total / m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equidist::to_fixed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equally_spaced_points() {
        for n in [1usize, 2, 7, 100, 1000] {
            let pts: Vec<TorusPoint> = (1..=n as u64).map(|k| TorusPoint::rational(k, n as u64).unwrap()).collect();
            let r = discrepancy_exact(&pts).unwrap();
            assert_eq!(r.value, 1.0 / n as f64, "n={n}");
        }
    }

    #[test]
    fn kronecker_orbits() {
        let third = TorusPoint::rational(1, 3).unwrap();
        assert_eq!(kronecker_points(&third, 3), vec![third, TorusPoint::rational(2, 3).unwrap(), TorusPoint::rational(0, 1).unwrap()]);
        assert_eq!(kronecker_discrepancy(&third, 3).unwrap().value, 1.0 / 3.0);
        let phi = TorusPoint::Float(0.618_033_988_749_894_8);
        let direct = discrepancy_exact(&kronecker_points(&phi, 500)).unwrap().value;
        assert!((kronecker_discrepancy(&phi, 500).unwrap().value - direct).abs() < 1e-12);
        assert!(kronecker_discrepancy(&phi, 0).is_err());
    }

    #[test]
    fn single_point_has_full_discrepancy() {
        assert_eq!(discrepancy_fixed(&[to_fixed(0.3)]).value, 1.0);
        assert_eq!(discrepancy_oracle(&[to_fixed(0.3)]), 1.0);
    }

    #[test]
    fn fast_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(1..200);
            let clustered = rng.gen_bool(0.5);
            let xs: Vec<u64> = (0..n)
                .map(|_| if clustered { (rng.gen_range(0..8u64)) << 61 } else { rng.gen() })
                .collect();
            assert_eq!(discrepancy_fixed(&xs).value, discrepancy_oracle(&xs));
        }
    }

    #[test]
    fn witness_attains_value() {
        let phi = TorusPoint::Float((5f64.sqrt() - 1.0) / 2.0);
        let xs: Vec<u64> = (1..=300u64).map(|n| phi.multiple(n).fixed()).collect();
        let r = discrepancy_fixed(&xs);
        let (l, rr) = (to_fixed(r.left), to_fixed(r.right));
        let inside = |x: u64| match r.kind {
            ArcKind::Closed => x.wrapping_sub(l) <= rr.wrapping_sub(l),
            ArcKind::Open => x.wrapping_sub(l) > 0 && x.wrapping_sub(l) < rr.wrapping_sub(l),
        };
        let count = xs.iter().filter(|&&x| inside(x)).count() as f64;
        let len = rr.wrapping_sub(l) as f64 / TWO64;
        assert!(((count / 300.0 - len).abs() - r.value).abs() < 1e-12);
    }

    #[test]
    fn erdos_turan_examples() {
        let half = [TorusPoint::rational(0, 1).unwrap(), TorusPoint::rational(1, 2).unwrap()];
        assert!((erdos_turan_bound(&half, 1, 3.0).unwrap() - 3.0).abs() < 1e-12);
        let m = 12u64;
        let pts: Vec<TorusPoint> = (0..m).map(|k| TorusPoint::rational(k, m).unwrap()).collect();
        for n in 1..m {
            assert!((erdos_turan_bound(&pts, n, 2.0).unwrap() - 2.0 / n as f64).abs() < 1e-9);
        }
        let origin = [TorusPoint::Float(0.0)];
        let n = 5u64;
        let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        assert!((erdos_turan_bound(&origin, n, 1.5).unwrap() - 1.5 * (1.0 / n as f64 + harmonic)).abs() < 1e-12);
    }

    #[test]
    fn etk_one_dimension_matches_et() {
        let phi = TorusPoint::Float(0.618_033_988_749_894_8);
        let pts: Vec<TorusPoint> = (1..=50u64).map(|k| TorusPoint::Float(phi.multiple(k).to_f64())).collect();
        let wrapped: Vec<Vec<TorusPoint>> = pts.iter().map(|p| vec![*p]).collect();
        for n in [1u64, 4, 9] {
            let et = erdos_turan_bound(&pts, n, 1.0).unwrap();
            let etk = etk_bound(&wrapped, n).unwrap();
            assert!((etk - 18.0 * (2.0 * et - 1.0 / n as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn etk_origin_closed_form() {
        let d = 2;
        let n = 3u64;
        let pts = vec![vec![TorusPoint::Float(0.0); d]; 4];
        let mut weights = 0.0;
        for h1 in -3i64..=3 {
            for h2 in -3i64..=3 {
                if (h1, h2) != (0, 0) {
                    weights += 1.0 / (h1.unsigned_abs().max(1) * h2.unsigned_abs().max(1)) as f64;
                }
            }
        }
        let expect = 6.0 * 4.0 * 9.0 * (1.0 / 3.0 + weights);
        assert!((etk_bound(&pts, n).unwrap() - expect).abs() < 1e-9);
    }
}
