//! Verification of the three outcomes of the cyclic stability theorem.

use super::{BohrData, CertError, Homomorphism};
use crate::zq::{Subgroup, ZqError, ZqSet};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum StabilityData {
    /// `A+B` is ε-periodic with respect to `H`.
    I {
        #[serde(rename = "H")]
        subgroup: Subgroup,
    },
    /// `A = (A0 ∪ A1) + a0`, `B = (B0 ∪ B1) + b0`.
    II {
        #[serde(rename = "H")]
        subgroup: Subgroup,
        a0: usize,
        b0: usize,
        #[serde(rename = "A0")]
        a_zero: ZqSet,
        #[serde(rename = "A1")]
        a_one: ZqSet,
        #[serde(rename = "B0")]
        b_zero: ZqSet,
        #[serde(rename = "B1")]
        b_one: ZqSet,
    },
    /// `A ⊆ x + φ⁻¹(I)`, `B ⊆ y + φ⁻¹(J)`.
    III {
        #[serde(rename = "H")]
        subgroup: Subgroup,
        x: usize,
        y: usize,
        bohr: BohrData,
        k: usize,
    },
}

impl StabilityData {
    pub fn subgroup(&self) -> Subgroup {
        match self {
            StabilityData::I { subgroup } | StabilityData::II { subgroup, .. } | StabilityData::III { subgroup, .. } => *subgroup,
        }
    }
}

fn same_modulus(q: usize, sets: &[&ZqSet]) -> Result<(), CertError> {
    for s in sets {
        if s.modulus() != q {
            return Err(ZqError::ModulusMismatch(q, s.modulus()).into());
        }
    }
    Ok(())
}

/// `|(S+H) \ S|`.
fn periodicity_defect(s: &ZqSet, h: &Subgroup) -> Result<usize, CertError> {
    Ok(s.add_subgroup(h)?.difference(s)?.len())
}

/// True iff every condition of the chosen case holds at tolerance `eps`.
pub fn verify_stability_case(a: &ZqSet, b: &ZqSet, data: &StabilityData, eps: f64) -> Result<bool, CertError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(CertError::BadTolerance);
    }
    let q = a.modulus();
    same_modulus(q, &[b])?;
    let h = data.subgroup();
    if h.modulus != q {
        return Err(ZqError::ModulusMismatch(q, h.modulus).into());
    }
    if h.index == 0 || q % h.index != 0 {
        return Err(ZqError::NotDivisor { index: h.index, modulus: q }.into());
    }
    let hs = h.order() as f64;
    let sum = a.sumset(b)?;
    let periodic = (periodicity_defect(&sum, &h)? as f64) < eps * hs;
    match data {
        StabilityData::I { .. } => {
            let lhs = sum.add_subgroup(&h)?.len();
            let rhs = a.add_subgroup(&h)?.len() + b.add_subgroup(&h)?.len();
            Ok(periodic && lhs <= rhs)
        }
        StabilityData::II { a0, b0, a_zero, a_one, b_zero, b_one, .. } => {
            same_modulus(q, &[a_zero, a_one, b_zero, b_one])?;
            let hset = h.elements();
            let partition = |s: &ZqSet, z: &ZqSet, o: &ZqSet, shift: usize| -> Result<bool, CertError> {
                Ok(z.intersection(o)?.is_empty() && z.union(o)?.translate(shift as i64) == *s)
            };
            let e_cond = |z: &ZqSet, o: &ZqSet| -> Result<bool, CertError> {
                Ok(o.add_subgroup(&h)?.intersection(z)?.is_empty())
            };
            let f_cond = |o: &ZqSet| -> Result<bool, CertError> { Ok(periodicity_defect(o, &h)? as f64 <= eps * hs) };
            Ok(!periodic
                && a.contains(*a0)
                && b.contains(*b0)
                && partition(a, a_zero, a_one, *a0)?
                && partition(b, b_zero, b_one, *b0)?
                && !a_zero.is_empty()
                && !b_zero.is_empty()
                && a_zero.is_subset(&hset)
                && b_zero.is_subset(&hset)
                && (a_zero.sumset(b_zero)?.len() as f64) <= (a_zero.len() + b_zero.len()) as f64 + eps * hs
                && !(a_one.is_empty() && b_one.is_empty())
                && e_cond(a_zero, a_one)?
                && e_cond(b_zero, b_one)?
                && f_cond(a_one)?
                && f_cond(b_one)?)
        }
        StabilityData::III { x, y, bohr, k, .. } => {
            if bohr.n <= *k {
                return Err(CertError::TargetTooSmall { n: bohr.n, k: *k });
            }
            if bohr.t.gcd(&bohr.n) != 1 {
                return Err(CertError::NotUnit { t: bohr.t, n: bohr.n });
            }
            if h.order() % bohr.n != 0 {
                return Err(CertError::NotSurjective { n: bohr.n, order: h.order() });
            }
            let phi = Homomorphism { subgroup: h, n: bohr.n, t: bohr.t };
            let xa = phi.preimage(&bohr.i).translate(*x as i64);
            let yb = phi.preimage(&bohr.j).translate(*y as i64);
            let eq = eps * q as f64;
            Ok((sum.len() as f64) < (1.0 - eps) * hs
                && a.is_subset(&xa)
                && b.is_subset(&yb)
                && (xa.difference(a)?.len() as f64) < eq
                && (yb.difference(b)?.len() as f64) < eq)
        }
    }
}
