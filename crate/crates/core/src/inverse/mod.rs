//! Inverse-structure certificates for sumsets in Z/Q.
//!
//! A [`StructureCertificate`] records one of the four outcomes of the
//! inverse theorem for pairs `(A, B)` where `B` meets every coset of every
//! small-index subgroup: (i) `A+B` is large relative to `|A|+|B|`, (ii) `A+B`
//! is nearly everything, (iii) `A` and the `H`-part of `B` are close to
//! parallel Bohr intervals while `B` nearly fills the other cosets, or
//! (iv) `B` is concentrated off `H`. Verifiers check every listed condition
//! exactly; [`detect_structure`] searches in a fixed order and only returns
//! certificates that verify.

pub mod cover;
pub mod fit;
pub mod stability;

pub use cover::{find_popular_cover_small, verify_popular_cover, CoverMethod, CoverSearch};
pub use fit::{fit_bohr_interval, fit_bohr_interval_at, same_frequency, ArcZ, BohrFit, Homomorphism};
pub use stability::{verify_stability_case, StabilityData};

use crate::zq::{all_subgroups, Subgroup, ZqError, ZqSet};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("certificate is for case {found:?}, expected {expected:?}")]
    WrongCase { expected: Case, found: Case },
    #[error("Bohr data missing")]
    MissingBohrData,
    #[error("N = {n} must exceed k = {k}")]
    TargetTooSmall { n: usize, k: usize },
    #[error("t = {t} is not a unit mod N = {n}")]
    NotUnit { t: usize, n: usize },
    #[error("N = {n} does not divide |H| = {order}")]
    NotSurjective { n: usize, order: usize },
    #[error("subgroup index {index} exceeds D = {max}")]
    IndexTooLarge { index: usize, max: usize },
    #[error("interval length {len} exceeds N = {n}")]
    IntervalTooLong { len: usize, n: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("subset precondition violated")]
    NotSubset,
    #[error(transparent)]
    Zq(#[from] ZqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

/// Homomorphism target, unit multiplier and the two arcs of case (iii).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BohrData {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    #[serde(rename = "I")]
    pub i: ArcZ,
    #[serde(rename = "J")]
    pub j: ArcZ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureCertificate {
    pub case: Case,
    #[serde(rename = "H")]
    pub subgroup: Subgroup,
    pub a0: usize,
    pub b0: usize,
    #[serde(rename = "A0")]
    pub a_part: ZqSet,
    #[serde(rename = "B0")]
    pub b_part: ZqSet,
    #[serde(rename = "B1")]
    pub b_rest: ZqSet,
    pub bohr: Option<BohrData>,
    pub eps: f64,
    pub eta: f64,
    pub k: usize,
    #[serde(rename = "D")]
    pub max_index: usize,
}

impl StructureCertificate {
    pub fn homomorphism(&self) -> Option<Homomorphism> {
        self.bohr.map(|b| Homomorphism { subgroup: self.subgroup, n: b.n, t: b.t })
    }
}

/// Residual masses of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorMasses {
    /// `|phi^{-1}(I) \ A0|` (0 outside case iii).
    pub a_excess: usize,
    /// `|phi^{-1}(J) \ B0|` (0 outside case iii).
    pub b_excess: usize,
    /// `|(Z/Q \ H) \ B1|`.
    pub b_rest_deficit: usize,
}

impl ErrorMasses {
    pub fn total(&self) -> usize {
        self.a_excess + self.b_excess + self.b_rest_deficit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// `None` when no case matched.
    pub case: Option<Case>,
    pub certificate: Option<StructureCertificate>,
    pub masses: Option<ErrorMasses>,
    /// Frequency whose fit produced the case-(iii) homomorphism.
    pub frequency: Option<usize>,
}

fn check_modulus(a: &ZqSet, b: &ZqSet, cert: &StructureCertificate) -> Result<(), CertError> {
    let q = a.modulus();
    for m in [b.modulus(), cert.subgroup.modulus, cert.a_part.modulus(), cert.b_part.modulus(), cert.b_rest.modulus()] {
        if m != q {
            return Err(ZqError::ModulusMismatch(q, m).into());
        }
    }
    if q % cert.subgroup.index != 0 || cert.subgroup.index == 0 {
        return Err(ZqError::NotDivisor { index: cert.subgroup.index, modulus: q }.into());
    }
    if cert.subgroup.index > cert.max_index {
        return Err(CertError::IndexTooLarge { index: cert.subgroup.index, max: cert.max_index });
    }
    Ok(())
}

/// `A = A0 + a0`, `B = (B0 ∪ B1) + b0`, `A0, B0 ⊆ H`, `B1 ∩ H = ∅`.
fn decomposition_holds(a: &ZqSet, b: &ZqSet, c: &StructureCertificate) -> bool {
    let h = c.subgroup.elements();
    let b_union = c.b_part.union(&c.b_rest).expect("moduli checked");
    c.a_part.translate(c.a0 as i64) == *a
        && b_union.translate(c.b0 as i64) == *b
        && c.a_part.is_subset(&h)
        && c.b_part.is_subset(&h)
        && c.b_rest.intersection(&h).expect("moduli checked").is_empty()
}

fn rest_is_large(c: &StructureCertificate, tol: f64) -> bool {
    let q = c.subgroup.modulus as f64;
    let hs = c.subgroup.order() as f64;
    c.b_rest.len() as f64 > q - hs - tol * hs
}

fn validate_bohr(cert: &StructureCertificate) -> Result<(Homomorphism, BohrData), CertError> {
    let bohr = cert.bohr.ok_or(CertError::MissingBohrData)?;
    if bohr.n <= cert.k {
        return Err(CertError::TargetTooSmall { n: bohr.n, k: cert.k });
    }
    if bohr.t.gcd(&bohr.n) != 1 {
        return Err(CertError::NotUnit { t: bohr.t, n: bohr.n });
    }
    if cert.subgroup.order() % bohr.n != 0 {
        return Err(CertError::NotSurjective { n: bohr.n, order: cert.subgroup.order() });
    }
    for arc in [bohr.i, bohr.j] {
        if arc.len > bohr.n {
            return Err(CertError::IntervalTooLong { len: arc.len, n: bohr.n });
        }
    }
    Ok((Homomorphism { subgroup: cert.subgroup, n: bohr.n, t: bohr.t }, bohr))
}

/// Masses of a certificate against its own data.
pub fn error_masses(cert: &StructureCertificate) -> ErrorMasses {
    let off_h = cert.subgroup.elements().complement();
    let b_rest_deficit = off_h.difference(&cert.b_rest).map(|s| s.len()).unwrap_or(0);
    let (a_excess, b_excess) = match (cert.case, cert.homomorphism()) {
        (Case::III, Some(phi)) => {
            let bohr = cert.bohr.expect("present");
            (
                phi.preimage(&bohr.i).difference(&cert.a_part).map(|s| s.len()).unwrap_or(0),
                phi.preimage(&bohr.j).difference(&cert.b_part).map(|s| s.len()).unwrap_or(0),
            )
        }
        _ => (0, 0),
    };
    ErrorMasses { a_excess, b_excess, b_rest_deficit }
}

/// Checks every condition of case (iii), including `a0 ∈ A` and `b0 ∈ B`.
pub fn verify_case_iii(a: &ZqSet, b: &ZqSet, cert: &StructureCertificate) -> Result<bool, CertError> {
    if cert.case != Case::III {
        return Err(CertError::WrongCase { expected: Case::III, found: cert.case });
    }
    check_modulus(a, b, cert)?;
    let (phi, bohr) = validate_bohr(cert)?;
    if !(a.contains(cert.a0) && b.contains(cert.b0)) || !decomposition_holds(a, b, cert) {
        return Ok(false);
    }
    if !rest_is_large(cert, cert.eps) {
        return Ok(false);
    }
    let eq = cert.eps * a.modulus() as f64;
    let pi = phi.preimage(&bohr.i);
    let pj = phi.preimage(&bohr.j);
    Ok(cert.a_part.is_subset(&pi)
        && cert.b_part.is_subset(&pj)
        && (pi.difference(&cert.a_part)?.len() as f64) < eq
        && (pj.difference(&cert.b_part)?.len() as f64) < eq)
}

/// Checks every condition of case (iv). `b0 ∈ B` is not required, since
/// `B0` may be empty in this case.
pub fn verify_case_iv(a: &ZqSet, b: &ZqSet, cert: &StructureCertificate) -> Result<bool, CertError> {
    if cert.case != Case::IV {
        return Err(CertError::WrongCase { expected: Case::IV, found: cert.case });
    }
    if cert.eta.is_nan() || cert.eta <= 0.0 {
        return Err(CertError::BadTolerance);
    }
    check_modulus(a, b, cert)?;
    if !a.contains(cert.a0) || !decomposition_holds(a, b, cert) {
        return Ok(false);
    }
    let hs = cert.subgroup.order() as f64;
    Ok(rest_is_large(cert, cert.eta) && (cert.b_part.len() as f64) < cert.eta * hs)
}

/// Dispatches to the verifier for the certificate's case. Cases (i) and (ii)
/// carry no decomposition and are not certificate cases.
pub fn verify_certificate(a: &ZqSet, b: &ZqSet, cert: &StructureCertificate) -> Result<bool, CertError> {
    match cert.case {
        Case::III => verify_case_iii(a, b, cert),
        Case::IV => verify_case_iv(a, b, cert),
        other => Err(CertError::WrongCase { expected: Case::III, found: other }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectParams {
    pub eps: f64,
    pub eta: f64,
    pub k: usize,
    #[serde(rename = "D")]
    pub max_index: usize,
    /// Margin for case (i).
    pub delta: f64,
}

impl Default for DetectParams {
    fn default() -> Self {
        DetectParams { eps: 0.05, eta: 0.1, k: 2, max_index: 4, delta: 0.05 }
    }
}

/// Candidate decompositions for subgroup `h`: `a0 = min A` (requires `A` in a
/// single coset) and, per coset met by `B`, `b0` = the least element of `B`
/// in that coset; sorted by `b0`.
fn decompositions(a: &ZqSet, b: &ZqSet, h: &Subgroup) -> Vec<(usize, usize, ZqSet, ZqSet, ZqSet)> {
    let d = h.index;
    let a0 = match a.min() {
        Some(x) => x,
        None => return Vec::new(),
    };
    if a.iter().any(|x| x % d != a0 % d) {
        return Vec::new();
    }
    let a_part = a.translate(-(a0 as i64));
    let mut firsts: Vec<usize> = Vec::new();
    let mut seen = vec![false; d];
    for x in b.iter() {
        if !seen[x % d] {
            seen[x % d] = true;
            firsts.push(x);
        }
    }
    let hset = h.elements();
    firsts
        .into_iter()
        .map(|b0| {
            let shifted = b.translate(-(b0 as i64));
            let b_part = shifted.intersection(&hset).expect("same modulus");
            let b_rest = shifted.difference(&hset).expect("same modulus");
            (a0, b0, a_part.clone(), b_part, b_rest)
        })
        .collect()
}

/// Tries (i), (ii), then (iii) over all subgroups of index at most `D` and
/// all candidate shifts, then (iv) likewise. Returns the first certificate
/// that passes its verifier; never fabricates one.
pub fn detect_structure(a: &ZqSet, b: &ZqSet, p: &DetectParams) -> Result<StructureReport, CertError> {
    if a.modulus() != b.modulus() {
        return Err(ZqError::ModulusMismatch(a.modulus(), b.modulus()).into());
    }
    let none = StructureReport { case: None, certificate: None, masses: None, frequency: None };
    if a.is_empty() || b.is_empty() {
        return Ok(none);
    }
    let q = a.modulus();
    let sum = a.sumset(b)?.len() as f64;
    if sum >= (a.len() + b.len()) as f64 + p.delta * q as f64 {
        return Ok(StructureReport { case: Some(Case::I), ..none });
    }
    if sum >= (1.0 - p.eps) * q as f64 {
        return Ok(StructureReport { case: Some(Case::II), ..none });
    }
    let subgroups: Vec<Subgroup> = all_subgroups(q).into_iter().filter(|h| h.index <= p.max_index).collect();
    let base = |case, h: Subgroup, a0, b0, a_part, b_part, b_rest, bohr| StructureCertificate {
        case,
        subgroup: h,
        a0,
        b0,
        a_part,
        b_part,
        b_rest,
        bohr,
        eps: p.eps,
        eta: p.eta,
        k: p.k,
        max_index: p.max_index,
    };
    for h in &subgroups {
        for (a0, b0, a_part, b_part, b_rest) in decompositions(a, b, h) {
            let a_h = a_part.restrict_to_subgroup(h);
            let b_h = b_part.restrict_to_subgroup(h);
            let mut tried: Vec<usize> = Vec::new();
            for source in [&a_h, &b_h] {
                let xi = match fit::dominant_frequency(source) {
                    Some(xi) => xi,
                    None => continue,
                };
                if tried.contains(&xi) {
                    continue;
                }
                tried.push(xi);
                let fa = fit_bohr_interval_at(&a_h, xi);
                if fa.n <= p.k {
                    continue;
                }
                let fb = fit_bohr_interval_at(&b_h, xi);
                let bohr = BohrData { n: fa.n, t: fa.t, i: fa.interval, j: fb.interval };
                let cert = base(Case::III, *h, a0, b0, a_part.clone(), b_part.clone(), b_rest.clone(), Some(bohr));
                if verify_case_iii(a, b, &cert)? {
                    return Ok(StructureReport {
                        case: Some(Case::III),
                        masses: Some(error_masses(&cert)),
                        certificate: Some(cert),
                        frequency: Some(xi),
                    });
                }
            }
        }
    }
    for h in &subgroups {
        for (a0, b0, a_part, b_part, b_rest) in decompositions(a, b, h) {
            let cert = base(Case::IV, *h, a0, b0, a_part, b_part, b_rest, None);
            if verify_case_iv(a, b, &cert)? {
                return Ok(StructureReport {
                    case: Some(Case::IV),
                    masses: Some(error_masses(&cert)),
                    certificate: Some(cert),
                    frequency: None,
                });
            }
        }
    }
    Ok(none)
}

/// Exact case-(iii) data: `A = phi^{-1}(I) + a0`, `B = phi^{-1}(J) + b0`
/// with `phi: Z/Q -> Z/N`, `m -> t m mod N`. Both preimages are nonempty.
pub fn planted_case_iii(
    q: usize,
    n: usize,
    t: usize,
    i: ArcZ,
    j: ArcZ,
    a0: usize,
    b0: usize,
) -> Result<(ZqSet, ZqSet), CertError> {
    if q == 0 {
        return Err(ZqError::ZeroModulus.into());
    }
    if n == 0 || q % n != 0 {
        return Err(CertError::NotSurjective { n, order: q });
    }
    if t.gcd(&n) != 1 {
        return Err(CertError::NotUnit { t, n });
    }
    for arc in [i, j] {
        if arc.len > n {
            return Err(CertError::IntervalTooLong { len: arc.len, n });
        }
    }
    let phi = Homomorphism { subgroup: Subgroup::whole(q), n, t: t % n };
    Ok((phi.preimage(&i).translate(a0 as i64), phi.preimage(&j).translate(b0 as i64)))
}
