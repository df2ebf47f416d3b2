//! Checkers for the direct sumset theorems in Z/Q (Cauchy–Davenport, Vosper,
//! cyclic Kneser and the Kneser period identity) plus exhaustive and random
//! sweeps over pairs of sets.

use crate::zq::{is_prime, ZqError, ZqSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirectError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("sets must be nonempty")]
    EmptySet,
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("exhaustive sweep limited to Q <= {max}, got {q}")]
    TooLarge { q: usize, max: usize },
    #[error(transparent)]
    Zq(#[from] ZqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    CauchyDavenport,
    Vosper,
    Kneser,
    KneserIdentity,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::CauchyDavenport => "cauchy-davenport",
            Theorem::Vosper => "vosper",
            Theorem::Kneser => "kneser",
            Theorem::KneserIdentity => "kneser-identity",
        }
    }
}

/// Extra structure attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Both Vosper predicates; `common_difference` is normalized to `min(d, p-d)`.
    Vosper { extremal: bool, common_difference: Option<usize> },
    /// Index of the stabilizer of `A+B` used by the period identity.
    Period { stabilizer_index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectReport {
    pub theorem: Theorem,
    pub modulus: usize,
    pub size_a: usize,
    pub size_b: usize,
    pub size_sum: usize,
    pub bound: f64,
    /// Whether the theorem's hypothesis holds for this pair.
    pub hypothesis_holds: bool,
    /// Whether the conclusion holds; meaningful only when the hypothesis does.
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl DirectReport {
    /// A pair passes when the hypothesis fails or the conclusion holds.
    pub fn passes(&self) -> bool {
        !self.hypothesis_holds || self.satisfied
    }
}

fn prime_pair(p: usize, a: &ZqSet, b: &ZqSet) -> Result<ZqSet, DirectError> {
    if !is_prime(p) {
        return Err(DirectError::NotPrime(p));
    }
    for s in [a, b] {
        if s.modulus() != p {
            return Err(ZqError::ModulusMismatch(p, s.modulus()).into());
        }
    }
    Ok(a.sumset(b)?)
}

/// `|A+B| >= min(p, |A|+|B|-1)`.
pub fn cauchy_davenport_check(p: usize, a: &ZqSet, b: &ZqSet) -> Result<DirectReport, DirectError> {
    let sum = prime_pair(p, a, b)?;
    if a.is_empty() || b.is_empty() {
        return Err(DirectError::EmptySet);
    }
    let bound = p.min(a.len() + b.len() - 1);
    Ok(DirectReport {
        theorem: Theorem::CauchyDavenport,
        modulus: p,
        size_a: a.len(),
        size_b: b.len(),
        size_sum: sum.len(),
        bound: bound as f64,
        hypothesis_holds: true,
        satisfied: sum.len() >= bound,
        witness: None,
    })
}

/// Steps `d` in `[1, p)` for which `S` is an arithmetic progression with
/// difference `d`. Uses that `x -> x + d` is a single `p`-cycle, so `S` is a
/// progression exactly when `S + d` leaves `S` in one element.
pub fn ap_differences(s: &ZqSet) -> Vec<usize> {
    let p = s.modulus();
    let k = s.len();
    if k == 0 || k == p {
        return Vec::new();
    }
    (1..p)
        .filter(|&d| s.translate(d as i64).difference(s).map(|x| x.len() == 1).unwrap_or(false))
        .collect()
}

/// Evaluates the equality case and the common-difference progression
/// structure. The hypothesis is `|A|,|B| > 1` and `|A|+|B| < p`; under it
/// `satisfied` records that the two predicates agree.
pub fn vosper_classify(p: usize, a: &ZqSet, b: &ZqSet) -> Result<DirectReport, DirectError> {
    let sum = prime_pair(p, a, b)?;
    let (ka, kb) = (a.len(), b.len());
    let hypothesis = ka > 1 && kb > 1 && ka + kb < p;
    let bound = (ka + kb).saturating_sub(1);
    let extremal = sum.len() == bound;
    let common = if hypothesis {
        let da = ap_differences(a);
        let db = ap_differences(b);
        da.iter().find(|d| db.contains(d)).map(|&d| d.min(p - d))
    } else {
        None
    };
    Ok(DirectReport {
        theorem: Theorem::Vosper,
        modulus: p,
        size_a: ka,
        size_b: kb,
        size_sum: sum.len(),
        bound: bound as f64,
        hypothesis_holds: hypothesis,
        satisfied: hypothesis && extremal == common.is_some(),
        witness: Some(Witness::Vosper { extremal, common_difference: common }),
    })
}

/// Index threshold `ceil(1/eps)` for the coset hypothesis, computed with a
/// small guard so that `eps = 1/m` maps to `m` despite rounding.
pub fn coset_index_bound(eps: f64) -> usize {
    (1.0 / eps - 1e-9).ceil().max(1.0) as usize
}

/// Cyclic Kneser: if `B` meets every coset of every subgroup of index at most
/// `ceil(1/eps)`, then `|A+B| > |A|+|B| - eps Q` or `A+B = Z/Q`.
pub fn kneser_cyclic_check(q: usize, a: &ZqSet, b: &ZqSet, eps: f64) -> Result<DirectReport, DirectError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(DirectError::NonPositiveEpsilon(eps));
    }
    for s in [a, b] {
        if s.modulus() != q {
            return Err(ZqError::ModulusMismatch(q, s.modulus()).into());
        }
    }
    if a.is_empty() || b.is_empty() {
        return Err(DirectError::EmptySet);
    }
    let sum = a.sumset(b)?;
    let bound = (a.len() + b.len()) as f64 - eps * q as f64;
    Ok(DirectReport {
        theorem: Theorem::Kneser,
        modulus: q,
        size_a: a.len(),
        size_b: b.len(),
        size_sum: sum.len(),
        bound,
        hypothesis_holds: b.meets_all_cosets(coset_index_bound(eps)),
        satisfied: sum.len() as f64 > bound || sum.is_full(),
        witness: None,
    })
}

/// If `|A+B| < |A|+|B|` then with `H` the stabilizer of `A+B`,
/// `|A+B| = |A+H| + |B+H| - |H|`.
pub fn kneser_identity_check(q: usize, a: &ZqSet, b: &ZqSet) -> Result<DirectReport, DirectError> {
    for s in [a, b] {
        if s.modulus() != q {
            return Err(ZqError::ModulusMismatch(q, s.modulus()).into());
        }
    }
    if a.is_empty() || b.is_empty() {
        return Err(DirectError::EmptySet);
    }
    let sum = a.sumset(b)?;
    let h = sum.stabilizer().subgroup;
    let bound = a.add_subgroup(&h)?.len() + b.add_subgroup(&h)?.len() - h.order();
    Ok(DirectReport {
        theorem: Theorem::KneserIdentity,
        modulus: q,
        size_a: a.len(),
        size_b: b.len(),
        size_sum: sum.len(),
        bound: bound as f64,
        hypothesis_holds: sum.len() < a.len() + b.len(),
        satisfied: sum.len() == bound,
        witness: Some(Witness::Period { stabilizer_index: h.index }),
    })
}

/// Runs the named check on one pair.
pub fn check_pair(
    theorem: Theorem,
    q: usize,
    a: &ZqSet,
    b: &ZqSet,
    eps: Option<f64>,
) -> Result<DirectReport, DirectError> {
    match theorem {
        Theorem::CauchyDavenport => cauchy_davenport_check(q, a, b),
        Theorem::Vosper => vosper_classify(q, a, b),
        Theorem::Kneser => kneser_cyclic_check(q, a, b, eps.unwrap_or(1.0 / q as f64)),
        Theorem::KneserIdentity => kneser_identity_check(q, a, b),
    }
}

/// Full inputs of one checked pair, sufficient to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairInstance {
    pub theorem: Theorem,
    pub modulus: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub eps: Option<f64>,
}

impl PairInstance {
    pub fn sets(&self) -> Result<(ZqSet, ZqSet), ZqError> {
        let conv = |v: &[usize]| ZqSet::from_elements(self.modulus, v.iter().map(|&x| x as u64));
        Ok((conv(&self.a)?, conv(&self.b)?))
    }

    pub fn check(&self) -> Result<DirectReport, DirectError> {
        let (a, b) = self.sets()?;
        check_pair(self.theorem, self.modulus, &a, &b, self.eps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub theorem: Theorem,
    pub modulus: usize,
    pub tested: u64,
    pub passed: u64,
    /// Pairs for which the hypothesis held (and the conclusion was checked).
    pub hypothesis_held: u64,
    pub counterexamples: Vec<PairInstance>,
}

/// Largest modulus accepted by [`exhaustive_sweep`].
pub const EXHAUSTIVE_MAX_Q: usize = 14;

fn summarize(
    theorem: Theorem,
    q: usize,
    eps: Option<f64>,
    results: Vec<(ZqSet, ZqSet, DirectReport)>,
) -> SweepSummary {
    let mut s = SweepSummary { theorem, modulus: q, tested: 0, passed: 0, hypothesis_held: 0, counterexamples: Vec::new() };
    for (a, b, r) in results {
        s.tested += 1;
        s.hypothesis_held += r.hypothesis_holds as u64;
        if r.passes() {
            s.passed += 1;
        } else {
            s.counterexamples.push(PairInstance { theorem, modulus: q, a: a.to_vec(), b: b.to_vec(), eps });
        }
    }
    s
}

/// Checks every ordered pair of nonempty subsets of Z/Q.
pub fn exhaustive_sweep(theorem: Theorem, q: usize, eps: Option<f64>) -> Result<SweepSummary, DirectError> {
    if q > EXHAUSTIVE_MAX_Q {
        return Err(DirectError::TooLarge { q, max: EXHAUSTIVE_MAX_Q });
    }
    if matches!(theorem, Theorem::CauchyDavenport | Theorem::Vosper) && !is_prime(q) {
        return Err(DirectError::NotPrime(q));
    }
    let masks: Vec<u64> = (1..(1u64 << q)).collect();
    let per_a: Vec<(Vec<(ZqSet, ZqSet, DirectReport)>, u64)> = masks
        .par_iter()
        .map(|&ma| {
            let a = ZqSet::from_mask(q, ma);
            let mut held = 0u64;
            let mut failures = Vec::new();
            for &mb in &masks {
                let b = ZqSet::from_mask(q, mb);
                let r = check_pair(theorem, q, &a, &b, eps).expect("validated inputs");
                held += r.hypothesis_holds as u64;
                if !r.passes() {
                    failures.push((a.clone(), b, r));
                }
            }
            (failures, held)
        })
        .collect();
    let total = (masks.len() as u64) * (masks.len() as u64);
    let held: u64 = per_a.iter().map(|(_, h)| h).sum();
    let failures: Vec<_> = per_a.into_iter().flat_map(|(f, _)| f).collect();
    let mut summary = summarize(theorem, q, eps, failures);
    // Only failures were materialized; passing pairs are counted here.
    summary.tested = total;
    summary.passed = total - summary.counterexamples.len() as u64;
    summary.hypothesis_held = held;
    Ok(summary)
}

/// Checks `count` random pairs with i.i.d. membership probabilities drawn
/// uniformly from `[0.05, 0.95]` per set. For the Kneser check, `B` is
/// resampled until it satisfies the coset hypothesis.
pub fn random_sweep(
    theorem: Theorem,
    q: usize,
    eps: Option<f64>,
    count: usize,
    seed: u64,
) -> Result<SweepSummary, DirectError> {
    if matches!(theorem, Theorem::CauchyDavenport | Theorem::Vosper) && !is_prime(q) {
        return Err(DirectError::NotPrime(q));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    let idx = coset_index_bound(eps.unwrap_or(1.0 / q as f64));
    while pairs.len() < count {
        let a = random_nonempty(q, &mut rng);
        let b = random_nonempty(q, &mut rng);
        if theorem == Theorem::Kneser && !b.meets_all_cosets(idx) {
            continue;
        }
        pairs.push((a, b));
    }
    let results: Vec<_> = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let r = check_pair(theorem, q, &a, &b, eps);
            r.map(|r| (a, b, r))
        })
        .collect::<Result<_, _>>()?;
    Ok(summarize(theorem, q, eps, results))
}

fn random_nonempty(q: usize, rng: &mut ChaCha8Rng) -> ZqSet {
    loop {
        let p: f64 = rng.gen_range(0.05..0.95);
        let s = ZqSet::from_predicate(q, |_| rng.gen_bool(p));
        if !s.is_empty() {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(q: usize, xs: &[u64]) -> ZqSet {
        ZqSet::from_elements(q, xs.iter().copied()).unwrap()
    }

    #[test]
    fn cauchy_davenport_examples() {
        let r = cauchy_davenport_check(5, &set(5, &[0, 1]), &set(5, &[0, 1])).unwrap();
        assert_eq!((r.size_sum, r.bound, r.satisfied), (3, 3.0, true));
        let b = set(7, &[1, 2, 5]);
        let r = cauchy_davenport_check(7, &set(7, &[4]), &b).unwrap();
        assert_eq!((r.size_sum, r.bound), (3, 3.0));
        assert!(matches!(cauchy_davenport_check(6, &set(6, &[0]), &set(6, &[0])), Err(DirectError::NotPrime(6))));
    }

    #[test]
    fn vosper_examples() {
        let a = set(7, &[0, 1, 2]);
        let r = vosper_classify(7, &a, &a).unwrap();
        assert!(r.hypothesis_holds && r.satisfied);
        assert_eq!(r.witness, Some(Witness::Vosper { extremal: true, common_difference: Some(1) }));
        let a = set(11, &[0, 2, 4]);
        let r = vosper_classify(11, &a, &a).unwrap();
        assert_eq!(r.size_sum, 5);
        assert_eq!(r.witness, Some(Witness::Vosper { extremal: true, common_difference: Some(2) }));
        let a = set(11, &[0, 1, 3]);
        let r = vosper_classify(11, &a, &a).unwrap();
        assert_eq!(r.size_sum, 6);
        assert_eq!(r.witness, Some(Witness::Vosper { extremal: false, common_difference: None }));
        assert!(r.satisfied);
    }

    #[test]
    fn ap_detection() {
        assert_eq!(ap_differences(&set(7, &[0, 2, 4])), vec![2, 5]);
        assert_eq!(ap_differences(&set(7, &[0, 1, 3])), Vec::<usize>::new());
        assert_eq!(ap_differences(&set(5, &[0, 1, 2, 3])).len(), 4);
    }

    #[test]
    fn kneser_examples() {
        let r = kneser_cyclic_check(6, &set(6, &[0, 1]), &set(6, &[0, 1, 2, 3, 4]), 1.0 / 3.0).unwrap();
        assert!(r.hypothesis_holds && r.satisfied);
        assert_eq!(r.size_sum, 6);
        let r = kneser_cyclic_check(6, &set(6, &[2]), &ZqSet::full(6), 0.5).unwrap();
        assert!(r.satisfied);
        assert!(kneser_cyclic_check(6, &set(6, &[2]), &ZqSet::full(6), 0.0).is_err());
        assert_eq!(coset_index_bound(1.0 / 3.0), 3);
        assert_eq!(coset_index_bound(0.3), 4);
    }

    #[test]
    fn kneser_prime_reduces_to_cauchy_davenport() {
        let s = exhaustive_sweep(Theorem::Kneser, 7, Some(1.0 / 7.0)).unwrap();
        assert_eq!(s.tested, 127 * 127);
        assert!(s.counterexamples.is_empty());
    }

    #[test]
    fn kneser_identity_example() {
        let r = kneser_identity_check(6, &set(6, &[0, 3]), &set(6, &[0, 1, 3])).unwrap();
        assert!(r.hypothesis_holds && r.satisfied);
        assert_eq!(r.witness, Some(Witness::Period { stabilizer_index: 3 }));
    }

    #[test]
    fn sweep_counts_all_pairs() {
        let s = exhaustive_sweep(Theorem::CauchyDavenport, 7, None).unwrap();
        assert_eq!((s.tested, s.passed), (16129, 16129));
        assert!(exhaustive_sweep(Theorem::CauchyDavenport, 8, None).is_err());
    }

    #[test]
    fn random_sweep_is_deterministic() {
        let a = random_sweep(Theorem::Kneser, 60, Some(0.25), 200, 9).unwrap();
        let b = random_sweep(Theorem::Kneser, 60, Some(0.25), 200, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tested, 200);
        assert_eq!(a.hypothesis_held, 200);
    }

    #[test]
    fn instance_replays() {
        let inst = PairInstance { theorem: Theorem::Vosper, modulus: 7, a: vec![0, 1], b: vec![0, 2], eps: None };
        let r = inst.check().unwrap();
        assert!(r.passes());
    }
}
