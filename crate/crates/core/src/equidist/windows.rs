use super::{EquidistError, Pos, TorusInterval, TorusPoint, TWO64};
use crate::density::{CountingSet, IntWindow};
use serde::{Deserialize, Serialize};

/// Distance to an endpoint, as a fraction of the circle, below which a
/// floating point membership decision is reported as ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BohrMembers {
    pub window: IntWindow,
    /// Members or non-members whose orbit point lies within
    /// [`AMBIGUITY_MARGIN`] of an endpoint of the interval. Always empty for
    /// rational `θ`.
    pub ambiguous: Vec<u64>,
}

/// Walks `nθ mod 1` for `n` in `[lo, hi)` and reports membership in `interval`.
fn walk(theta: &TorusPoint, interval: &TorusInterval, lo: u64, hi: u64, mut visit: impl FnMut(u64, bool, bool)) {
    let step = theta.pos();
    let margin = (AMBIGUITY_MARGIN * TWO64) as u64;
    let check_margin = !theta.is_rational();
    let mut pos = step.times(lo);
    for n in lo..hi {
        let inside = interval.contains_pos(&pos);
        let ambiguous = check_margin && interval.endpoint_distance(&pos) <= margin;
        visit(n, inside, ambiguous);
        pos = match (pos, step) {
            (Pos::Rat(r, q), Pos::Rat(p, _)) => Pos::Rat(((r as u128 + p as u128) % q as u128) as u64, q),
            (Pos::Fix(x), Pos::Fix(t)) => Pos::Fix(x.wrapping_add(t)),
            _ => unreachable!("orbit keeps the representation of θ"),
        };
    }
}

/// `Bohr(θ, I) ∩ [lo, hi)`. Rational `θ` is exact; floating `θ` is exact for
/// its fixed-point image and flags points near the interval endpoints.
pub fn bohr_members(theta: &TorusPoint, interval: &TorusInterval, lo: u64, hi: u64) -> Result<BohrMembers, EquidistError> {
    if lo >= hi {
        return Err(EquidistError::EmptyRange);
    }
    let mut window = IntWindow::new(lo, hi);
    let mut ambiguous = Vec::new();
    walk(theta, interval, lo, hi, |n, inside, amb| {
        if inside {
            window.insert(n).expect("n lies in the window");
        }
        if amb {
            ambiguous.push(n);
        }
    });
    Ok(BohrMembers { window, ambiguous })
}

/// `|Bohr(θ, I) ∩ {x+1, ..., x+M}| / M`.
pub fn window_density(theta: &TorusPoint, interval: &TorusInterval, x: u64, m: u64) -> Result<f64, EquidistError> {
    if m == 0 {
        return Err(EquidistError::EmptyRange);
    }
    let mut count = 0u64;
    walk(theta, interval, x + 1, x + m + 1, |_, inside, _| count += inside as u64);
    Ok(count as f64 / m as f64)
}

/// Window densities for every start `x` in `[x_lo, x_hi)` with a sliding count.
pub fn window_profile(
    theta: &TorusPoint,
    interval: &TorusInterval,
    x_lo: u64,
    x_hi: u64,
    m: u64,
) -> Result<Vec<(u64, f64)>, EquidistError> {
    if m == 0 || x_lo >= x_hi {
        return Err(EquidistError::EmptyRange);
    }
    let members = bohr_members(theta, interval, x_lo + 1, x_hi + m)?.window;
    let mut count = members.count_range(x_lo + 1, x_lo + m + 1);
    let mut out = Vec::with_capacity((x_hi - x_lo) as usize);
    for x in x_lo..x_hi {
        out.push((x, count as f64 / m as f64));
        count = count + members.contains(x + m + 1) as u64 - members.contains(x + 1) as u64;
    }
    Ok(out)
}

/// One failure of `|count/M - (b-a)/q| < q/M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowViolation {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub x: u64,
    pub m: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalSweep {
    pub q: u64,
    pub tested: u64,
    /// Largest `|q·count - M(b-a)| / q^2` seen; the lemma asks for `< 1`.
    pub max_ratio: f64,
    pub violations: Vec<WindowViolation>,
}

/// Checks `|count/M - (b-a)/q| < q/M` for every `θ = p/q` with `gcd(p, q) = 1`,
/// every `[a/q, b/q)` with `0 <= a < b <= q`, every `x <= x_max` and every
/// `M <= m_max`, in integer arithmetic.
pub fn rational_window_sweep(q: u64, x_max: u64, m_max: u64) -> Result<RationalSweep, EquidistError> {
    if q == 0 {
        return Err(EquidistError::ZeroDenominator);
    }
    let q2 = (q * q) as i64;
    let mut sweep = RationalSweep { q, tested: 0, max_ratio: 0.0, violations: Vec::new() };
    let mut worst = 0i64;
    for p in (0..q).filter(|&p| num_integer::gcd(p, q) == 1) {
        for x in 0..=x_max {
            let residues: Vec<u64> = (1..=m_max).map(|i| (x + i) % q * p % q).collect();
            for a in 0..q {
                for b in a + 1..=q {
                    let mut count = 0i64;
                    for (i, &r) in residues.iter().enumerate() {
                        let m = i as i64 + 1;
                        count += (a <= r && r < b) as i64;
                        let dev = (q as i64 * count - m * (b - a) as i64).abs();
                        worst = worst.max(dev);
                        if dev >= q2 {
                            sweep.violations.push(WindowViolation { p, a, b, x, m: m as u64, count: count as u64 });
                        }
                    }
                    sweep.tested += m_max;
                }
            }
        }
    }
    sweep.max_ratio = worst as f64 / q2 as f64;
    Ok(sweep)
}

/// `(1/H) Σ_{x=1}^{H} |window_density(θ, I, x, M) - |I||`.
pub fn major_arc_mean_deviation(theta: &TorusPoint, interval: &TorusInterval, h: u64, m: u64) -> Result<f64, EquidistError> {
    if h == 0 {
        return Err(EquidistError::EmptyRange);
    }
    let len = interval.length_f64();
    let total: f64 = window_profile(theta, interval, 1, h + 1, m)?.iter().map(|&(_, d)| (d - len).abs()).sum();
    Ok(total / h as f64)
}

/// Fraction of `x` in `[1, H]` for which `Bohr(θ, I) ∩ {x+1, ..., x+M}` is the
/// union of exactly `⌈q|I|⌉` residue classes mod `q` restricted to the window.
pub fn local_periodicity_scan(
    theta: &TorusPoint,
    interval: &TorusInterval,
    q: u64,
    h: u64,
    m: u64,
) -> Result<f64, EquidistError> {
    if q == 0 {
        return Err(EquidistError::ZeroDenominator);
    }
    if h == 0 || m == 0 {
        return Err(EquidistError::EmptyRange);
    }
    let want = (q as f64 * interval.length_f64() - 1e-9).ceil() as u64;
    let members = bohr_members(theta, interval, 2, h + m + 1)?.window;
    let qs = q as usize;
    let mut count = vec![0u64; qs];
    let mut size = vec![0u64; qs];
    for n in 2..m + 2 {
        size[(n % q) as usize] += 1;
        count[(n % q) as usize] += members.contains(n) as u64;
    }
    // Classes that are neither empty nor full, and full nonempty classes.
    let status = |c: u64, s: u64| -> (u64, u64) { ((c != 0 && c != s) as u64, (s > 0 && c == s) as u64) };
    let (mut mixed, mut full) = (0u64, 0u64);
    for r in 0..qs {
        let (x, f) = status(count[r], size[r]);
        mixed += x;
        full += f;
    }
    let mut good = 0u64;
    for x in 1..=h {
        if mixed == 0 && full == want {
            good += 1;
        }
        if x == h {
            break;
        }
        for (n, add) in [(x + 1, false), (x + m + 1, true)] {
            let r = (n % q) as usize;
            let (x0, f0) = status(count[r], size[r]);
            let hit = members.contains(n) as u64;
            if add {
                size[r] += 1;
                count[r] += hit;
            } else {
                size[r] -= 1;
                count[r] -= hit;
            }
            let (x1, f1) = status(count[r], size[r]);
            mixed = mixed + x1 - x0;
            full = full + f1 - f0;
        }
    }
    Ok(good as f64 / h as f64)
}

/// `min_{1 <= q <= Q} ‖qθ‖`.
pub fn minor_arc_delta(theta: &TorusPoint, q_max: u64) -> Result<f64, EquidistError> {
    if q_max == 0 {
        return Err(EquidistError::EmptyRange);
    }
    Ok((1..=q_max).map(|q| theta.multiple(q).norm()).fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> TorusPoint {
        TorusPoint::float((5f64.sqrt() - 1.0) / 2.0).unwrap()
    }

    #[test]
    fn bohr_examples() {
        let half = TorusPoint::rational(1, 2).unwrap();
        let i = TorusInterval::rational(0, 1, 2).unwrap();
        assert_eq!(bohr_members(&half, &i, 1, 11).unwrap().window.to_vec(), vec![2, 4, 6, 8, 10]);
        let full = TorusInterval::half_open(0.3, 1.0).unwrap();
        assert_eq!(bohr_members(&phi(), &full, 4, 9).unwrap().window.len(), 5);
        let quarter = TorusInterval::half_open(0.0, 0.25).unwrap();
        let r = bohr_members(&phi(), &quarter, 1, 21).unwrap();
        let oracle: Vec<u64> = (1..21u64)
            .filter(|&n| {
                let t = (n as f64 * (5f64.sqrt() - 1.0) / 2.0).fract();
                t < 0.25
            })
            .collect();
        assert_eq!(r.window.to_vec(), oracle);
        assert!(r.ambiguous.is_empty());
        assert!(bohr_members(&half, &i, 3, 3).is_err());
    }

    #[test]
    fn ambiguity_flag_near_endpoints() {
        let theta = TorusPoint::float(0.25).unwrap();
        let i = TorusInterval::half_open(0.0, 0.5).unwrap();
        let r = bohr_members(&theta, &i, 1, 9).unwrap();
        assert_eq!(r.window.to_vec(), vec![1, 4, 5, 8]);
        assert_eq!(r.ambiguous, vec![2, 4, 6, 8]);
    }

    #[test]
    fn profile_matches_pointwise() {
        let i = TorusInterval::half_open(0.1, 0.3).unwrap();
        let prof = window_profile(&phi(), &i, 0, 50, 17).unwrap();
        for &(x, d) in &prof {
            assert_eq!(d, window_density(&phi(), &i, x, 17).unwrap());
        }
    }

    #[test]
    fn rational_lemma_small_q() {
        for q in 1..=6 {
            let s = rational_window_sweep(q, 3 * q, 60).unwrap();
            assert!(s.violations.is_empty(), "q={q}");
            assert!(s.max_ratio < 1.0);
        }
    }

    #[test]
    fn major_arc_examples() {
        let theta = TorusPoint::float(0.5 + 1e-5).unwrap();
        let i = TorusInterval::half_open(0.0, 0.3).unwrap();
        let dev = major_arc_mean_deviation(&theta, &i, 10_000, 100).unwrap();
        assert!(dev >= 0.4 / 2.0 - 0.02, "{dev}");
        let third = TorusPoint::rational(1, 3).unwrap();
        let i = TorusInterval::rational(0, 1, 3).unwrap();
        assert!(major_arc_mean_deviation(&third, &i, 1000, 90).unwrap() < 3.0 / 90.0);
    }

    #[test]
    fn periodicity_examples() {
        let theta = TorusPoint::rational(2, 5).unwrap();
        let i = TorusInterval::rational(0, 2, 5).unwrap();
        assert_eq!(local_periodicity_scan(&theta, &i, 5, 200, 40).unwrap(), 1.0);
        let near = TorusPoint::float(1.0 / 3.0 + 1e-6).unwrap();
        let half = TorusInterval::half_open(0.0, 0.5).unwrap();
        let f = local_periodicity_scan(&near, &half, 3, 100_000, 1000).unwrap();
        assert!(f >= 0.4, "{f}");
        let tiny = TorusInterval::half_open(0.0, 0.1).unwrap();
        let g = local_periodicity_scan(&TorusPoint::float(1.0 / 3.0 + 1e-3).unwrap(), &tiny, 3, 10_000, 1000).unwrap();
        assert!(g < 0.05, "{g}");
    }

    #[test]
    fn minor_arc_delta_golden() {
        let d = minor_arc_delta(&phi(), 50).unwrap();
        let brute = (1..=50).map(|q| {
            let t = (q as f64 * 0.618_033_988_749_894_8).fract();
            t.min(1.0 - t)
        });
        assert!((d - brute.fold(1.0, f64::min)).abs() < 1e-12);
    }
}
