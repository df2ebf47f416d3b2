//! Certificates `(A', B')` showing that a popular sumset almost contains a
//! full sumset after small removals.

use super::CertError;
use crate::zq::{popular_sumset, ZqError, ZqSet};
use serde::{Deserialize, Serialize};

/// Largest modulus searched exhaustively.
pub const EXHAUSTIVE_COVER_MAX_Q: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    /// Minimum total removal, proven by enumeration.
    Exhaustive,
    /// Greedy removal; not guaranteed minimal.
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSearch {
    pub a: ZqSet,
    pub b: ZqSet,
    pub removals: usize,
    pub method: CoverMethod,
    /// Candidate pairs checked.
    pub evaluated: u64,
}

fn uncovered(a2: &ZqSet, b2: &ZqSet, popular: &ZqSet) -> Result<usize, CertError> {
    Ok(a2.sumset(b2)?.difference(popular)?.len())
}

/// `|(A'+B') \ (A +_δ B)| < εQ`, `|A \ A'| < εQ` and `|B \ B'| < εQ`.
pub fn verify_popular_cover(
    a: &ZqSet,
    b: &ZqSet,
    a2: &ZqSet,
    b2: &ZqSet,
    delta: f64,
    eps: f64,
) -> Result<bool, CertError> {
    for s in [b, a2, b2] {
        if s.modulus() != a.modulus() {
            return Err(ZqError::ModulusMismatch(a.modulus(), s.modulus()).into());
        }
    }
    if !a2.is_subset(a) || !b2.is_subset(b) {
        return Err(CertError::NotSubset);
    }
    let eq = eps * a.modulus() as f64;
    let popular = popular_sumset(a, b, delta)?;
    Ok((uncovered(a2, b2, &popular)? as f64) < eq
        && ((a.len() - a2.len()) as f64) < eq
        && ((b.len() - b2.len()) as f64) < eq)
}

/// Submasks of `mask` grouped by popcount, each group ascending.
fn submasks_by_size(mask: u32) -> Vec<Vec<u32>> {
    let mut groups = vec![Vec::new(); mask.count_ones() as usize + 1];
    let mut s = mask;
    loop {
        groups[s.count_ones() as usize].push(s);
        if s == 0 {
            break;
        }
        s = (s - 1) & mask;
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

fn to_mask(s: &ZqSet) -> u32 {
    s.iter().fold(0u32, |m, x| m | (1 << x))
}

/// Smallest total removal `(A', B')` passing [`verify_popular_cover`],
/// ordered by total removals, then removals from `A`, then removal masks.
/// For `Q ≤ 12` the search is exhaustive until `budget` candidates have been
/// checked; otherwise, or when the budget runs out, a greedy search runs and
/// the result is flagged [`CoverMethod::Heuristic`].
pub fn find_popular_cover_small(
    a: &ZqSet,
    b: &ZqSet,
    delta: f64,
    eps: f64,
    budget: u64,
) -> Result<Option<CoverSearch>, CertError> {
    if a.modulus() != b.modulus() {
        return Err(ZqError::ModulusMismatch(a.modulus(), b.modulus()).into());
    }
    let q = a.modulus();
    let eq = eps * q as f64;
    let popular = popular_sumset(a, b, delta)?;
    let mut evaluated = 0u64;
    if q <= EXHAUSTIVE_COVER_MAX_Q {
        let (ma, mb) = (to_mask(a), to_mask(b));
        let ra = submasks_by_size(ma);
        let rb = submasks_by_size(mb);
        let max_each = (0..=q).take_while(|&r| (r as f64) < eq).last();
        let Some(max_each) = max_each else { return Ok(None) };
        let (na, nb) = (a.len().min(max_each), b.len().min(max_each));
        for total in 0..=na + nb {
            for da in total.saturating_sub(nb)..=total.min(na) {
                let db = total - da;
                for &rem_a in &ra[da] {
                    let a2 = ZqSet::from_mask(q, (ma & !rem_a) as u64);
                    for &rem_b in &rb[db] {
                        if evaluated >= budget {
                            return greedy(a, b, &popular, eq, evaluated);
                        }
                        evaluated += 1;
                        let b2 = ZqSet::from_mask(q, (mb & !rem_b) as u64);
                        if (uncovered(&a2, &b2, &popular)? as f64) < eq {
                            return Ok(Some(CoverSearch { a: a2, b: b2, removals: total, method: CoverMethod::Exhaustive, evaluated }));
                        }
                    }
                }
            }
        }
        return Ok(None);
    }
    greedy(a, b, &popular, eq, evaluated)
}

/// Repeatedly removes the element whose removal most reduces the uncovered
/// mass, preferring `A` and then the smaller element on ties.
fn greedy(a: &ZqSet, b: &ZqSet, popular: &ZqSet, eq: f64, mut evaluated: u64) -> Result<Option<CoverSearch>, CertError> {
    let q = a.modulus();
    let (mut a2, mut b2) = (a.clone(), b.clone());
    loop {
        evaluated += 1;
        let current = uncovered(&a2, &b2, popular)?;
        if (current as f64) < eq {
            let removals = a.len() - a2.len() + b.len() - b2.len();
            return Ok(Some(CoverSearch { a: a2, b: b2, removals, method: CoverMethod::Heuristic, evaluated }));
        }
        let mut best: Option<(usize, bool, usize)> = None;
        for (is_b, set, orig) in [(false, &a2, a), (true, &b2, b)] {
            if ((orig.len() - set.len() + 1) as f64) >= eq {
                continue;
            }
            for x in set.iter() {
                let reduced = set.difference(&ZqSet::singleton(q, x))?;
                evaluated += 1;
                let u = if is_b { uncovered(&a2, &reduced, popular)? } else { uncovered(&reduced, &b2, popular)? };
                if best.is_none_or(|(bu, _, _)| u < bu) {
                    best = Some((u, is_b, x));
                }
            }
        }
        match best {
            Some((u, is_b, x)) if u < current => {
                let s = ZqSet::singleton(q, x);
                if is_b {
                    b2 = b2.difference(&s)?;
                } else {
                    a2 = a2.difference(&s)?;
                }
            }
            _ => return Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(q: usize, e: &[u64]) -> ZqSet {
        ZqSet::from_elements(q, e.iter().copied()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let a = set(4, &[0, 1]);
        assert!(verify_popular_cover(&a, &a, &a, &a, 0.0, 0.01).unwrap());
        assert!(verify_popular_cover(&a, &a, &set(4, &[0]), &set(4, &[1]), 0.25, 0.3).unwrap());
        for eps in [0.3, 0.5] {
            assert!(!verify_popular_cover(&a, &a, &a, &a, 0.25, eps).unwrap());
        }
        assert!(matches!(
            verify_popular_cover(&a, &a, &set(4, &[2]), &a, 0.0, 0.3),
            Err(CertError::NotSubset)
        ));
    }

    #[test]
    fn search_examples() {
        let a = set(4, &[0, 1]);
        let r = find_popular_cover_small(&a, &a, 0.25, 0.3, 1 << 20).unwrap().unwrap();
        assert_eq!(r.method, CoverMethod::Exhaustive);
        assert!(a.len() - r.a.len() <= 1 && a.len() - r.b.len() <= 1);
        assert!(verify_popular_cover(&a, &a, &r.a, &r.b, 0.25, 0.3).unwrap());

        let f = ZqSet::full(6);
        let r = find_popular_cover_small(&f, &f, 0.9, 0.1, 1 << 20).unwrap().unwrap();
        assert_eq!((r.a, r.b, r.removals), (f.clone(), f, 0));

        let x = set(9, &[1, 4, 5]);
        let y = set(9, &[0, 7]);
        let r = find_popular_cover_small(&x, &y, 0.0, 0.2, 1 << 20).unwrap().unwrap();
        assert_eq!((r.a, r.b), (x, y));
    }

    #[test]
    fn exhaustive_is_minimal() {
        let q = 8;
        let a = set(q, &[0, 1, 2, 5]);
        let b = set(q, &[0, 3, 4]);
        let (delta, eps) = (0.2, 0.4);
        let r = find_popular_cover_small(&a, &b, delta, eps, u64::MAX).unwrap().unwrap();
        let (ma, mb) = (to_mask(&a), to_mask(&b));
        for sa in 0..256u32 {
            for sb in 0..256u32 {
                if sa & !ma != 0 || sb & !mb != 0 {
                    continue;
                }
                let (a2, b2) = (ZqSet::from_mask(q, sa as u64), ZqSet::from_mask(q, sb as u64));
                if verify_popular_cover(&a, &b, &a2, &b2, delta, eps).unwrap() {
                    assert!(r.removals <= a.len() - a2.len() + b.len() - b2.len());
                }
            }
        }
    }

    #[test]
    fn large_modulus_uses_heuristic() {
        let q = 40;
        let a = ZqSet::from_predicate(q, |x| x % 3 != 1);
        let r = find_popular_cover_small(&a, &a, 0.0, 0.1, 10).unwrap().unwrap();
        assert_eq!(r.method, CoverMethod::Heuristic);
    }
}
