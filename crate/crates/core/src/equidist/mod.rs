//! Equidistribution on the circle: Bohr sets in the naturals, exact
//! discrepancy, Erdős–Turán type bounds, window densities of Bohr sets and
//! simultaneous approximation.
//!
//! Positions on the circle are compared exactly. A rational point `p/q` is
//! kept as a fraction; a floating point `θ` is converted to the 64-bit fixed
//! point value `⌊θ·2^64⌋`, which is exact for every double in `[2^-11, 1)`,
//! so `nθ mod 1` is an exact wrapping product. Mixed comparisons
//! cross-multiply in 128-bit integers.

mod approx;
mod discrepancy;
mod windows;

pub use approx::{
    almost_period_search, epsilon_dense_check, paper_constant_c, paper_constant_c0, paper_constant_d, DenseCheck,
};
pub use discrepancy::{
    discrepancy_exact, discrepancy_fixed, discrepancy_oracle, erdos_turan_bound, etk_bound, kronecker_discrepancy,
    kronecker_points, ArcKind, DiscrepancyResult,
};
pub use windows::{
    bohr_members, local_periodicity_scan, major_arc_mean_deviation, minor_arc_delta, rational_window_sweep,
    window_density, window_profile, BohrMembers, RationalSweep,
};

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquidistError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("value {0} is not finite")]
    NotFinite(f64),
    #[error("length {0} outside [0, 1]")]
    BadLength(f64),
    #[error("epsilon {0} outside the allowed range")]
    BadEpsilon(f64),
    #[error("empty range")]
    EmptyRange,
    #[error("{0} frequency vectors exceed the enumeration limit")]
    TooManyFrequencies(f64),
    #[error("dimension must be positive")]
    ZeroDimension,
}

pub(crate) const TWO64: f64 = 18_446_744_073_709_551_616.0;

/// A point of the circle `R/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TorusPoint {
    /// `p/q` in lowest terms with `0 <= p < q`.
    Rational { p: u64, q: u64 },
    Float(f64),
}

impl TorusPoint {
    /// Reduced `p/q mod 1`.
    pub fn rational(p: u64, q: u64) -> Result<Self, EquidistError> {
        if q == 0 {
            return Err(EquidistError::ZeroDenominator);
        }
        let p = p % q;
        let g = num_integer::gcd(p, q);
        Ok(TorusPoint::Rational { p: p / g, q: q / g })
    }

    /// `x mod 1`.
    pub fn float(x: f64) -> Result<Self, EquidistError> {
        if !x.is_finite() {
            return Err(EquidistError::NotFinite(x));
        }
        let f = x - x.floor();
        Ok(TorusPoint::Float(if f >= 1.0 { 0.0 } else { f }))
    }

    pub fn value(&self) -> f64 {
        match *self {
            TorusPoint::Rational { p, q } => p as f64 / q as f64,
            TorusPoint::Float(x) => x,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, TorusPoint::Rational { .. })
    }

    pub(crate) fn pos(&self) -> Pos {
        match *self {
            TorusPoint::Rational { p, q } => Pos::Rat(p, q),
            TorusPoint::Float(x) => Pos::Fix(to_fixed(x)),
        }
    }

    /// Position of `n·self mod 1`.
    pub(crate) fn multiple(&self, n: u64) -> Pos {
        self.pos().times(n)
    }

    /// `‖self‖_T`, the distance to the nearest integer.
    pub fn norm(&self) -> f64 {
        self.pos().norm()
    }
}

/// `⌊x·2^64⌋` for `x` in `[0, 1)`.
pub(crate) fn to_fixed(x: f64) -> u64 {
    let y = x * TWO64;
    if y >= TWO64 {
        u64::MAX
    } else if y <= 0.0 {
        0
    } else {
        y as u64
    }
}

/// An exact position on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pos {
    Rat(u64, u64),
    Fix(u64),
}

impl Pos {
    pub(crate) fn times(&self, n: u64) -> Pos {
        match *self {
            Pos::Rat(p, q) => Pos::Rat(((n % q) as u128 * p as u128 % q as u128) as u64, q),
            Pos::Fix(x) => Pos::Fix(x.wrapping_mul(n)),
        }
    }

    /// Fixed-point image (rounded down for fractions).
    pub(crate) fn fixed(&self) -> u64 {
        match *self {
            Pos::Rat(p, q) => (((p as u128) << 64) / q as u128) as u64,
            Pos::Fix(x) => x,
        }
    }

    #[cfg(test)]
    pub(crate) fn to_f64(self) -> f64 {
        match self {
            Pos::Rat(p, q) => p as f64 / q as f64,
            Pos::Fix(x) => x as f64 / TWO64,
        }
    }

    pub(crate) fn norm(&self) -> f64 {
        match *self {
            Pos::Rat(p, q) => p.min(q - p) as f64 / q as f64,
            Pos::Fix(x) => x.min(x.wrapping_neg()) as f64 / TWO64,
        }
    }

    /// `self + other mod 1`; exact unless a fraction meets a fixed value.
    pub(crate) fn add(&self, other: &Pos) -> Pos {
        match (*self, *other) {
            (Pos::Rat(a, b), Pos::Rat(c, d)) => {
                let l = num_integer::lcm(b as u128, d as u128);
                if l <= u64::MAX as u128 {
                    let n = (a as u128 * (l / b as u128) + c as u128 * (l / d as u128)) % l;
                    let g = num_integer::gcd(n, l).max(1);
                    return Pos::Rat((n / g) as u64, (l / g) as u64);
                }
                Pos::Fix(self.fixed().wrapping_add(other.fixed()))
            }
            _ => Pos::Fix(self.fixed().wrapping_add(other.fixed())),
        }
    }

    /// Exact comparison of the positions in `[0, 1)`.
    pub(crate) fn cmp_exact(&self, other: &Pos) -> Ordering {
        match (*self, *other) {
            (Pos::Rat(a, b), Pos::Rat(c, d)) => (a as u128 * d as u128).cmp(&(c as u128 * b as u128)),
            (Pos::Fix(x), Pos::Fix(y)) => x.cmp(&y),
            (Pos::Rat(a, b), Pos::Fix(y)) => ((a as u128) << 64).cmp(&(y as u128 * b as u128)),
            (Pos::Fix(x), Pos::Rat(c, d)) => (x as u128 * d as u128).cmp(&((c as u128) << 64)),
        }
    }

    /// Circular distance in units of `2^-64` (rounded down).
    pub(crate) fn fixed_distance(&self, other: &Pos) -> u64 {
        let d = self.fixed().wrapping_sub(other.fixed());
        d.min(d.wrapping_neg())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalKind {
    /// `[left, left + length)`.
    HalfOpen,
    /// `[left, left + length]`.
    Closed,
}

/// An arc of the circle starting at `left` of the given length, wrapping
/// past 1 when needed. Length 1 is the whole circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusInterval {
    pub left: TorusPoint,
    /// Length in `[0, 1)`; ignored when `full` is set.
    pub length: TorusPoint,
    pub full: bool,
    pub kind: IntervalKind,
}

impl TorusInterval {
    pub fn half_open(left: f64, length: f64) -> Result<Self, EquidistError> {
        if !(0.0..=1.0).contains(&length) {
            return Err(EquidistError::BadLength(length));
        }
        Ok(TorusInterval {
            left: TorusPoint::float(left)?,
            length: TorusPoint::Float(if length >= 1.0 { 0.0 } else { length }),
            full: length >= 1.0,
            kind: IntervalKind::HalfOpen,
        })
    }

    pub fn closed(left: f64, length: f64) -> Result<Self, EquidistError> {
        Ok(TorusInterval { kind: IntervalKind::Closed, ..TorusInterval::half_open(left, length)? })
    }

    /// `[a/q, b/q)` for `0 <= a <= b <= q`.
    pub fn rational(a: u64, b: u64, q: u64) -> Result<Self, EquidistError> {
        if q == 0 {
            return Err(EquidistError::ZeroDenominator);
        }
        if a > b || b > q {
            return Err(EquidistError::BadLength((b as f64 - a as f64) / q as f64));
        }
        Ok(TorusInterval {
            left: TorusPoint::rational(a, q)?,
            length: TorusPoint::rational((b - a) % q, q)?,
            full: b - a == q,
            kind: IntervalKind::HalfOpen,
        })
    }

    pub fn length_f64(&self) -> f64 {
        if self.full {
            1.0
        } else {
            self.length.value()
        }
    }

    fn right(&self) -> Pos {
        self.left.pos().add(&self.length.pos())
    }

    pub(crate) fn contains_pos(&self, x: &Pos) -> bool {
        if self.full {
            return true;
        }
        let l = self.left.pos();
        let r = self.right();
        let closed = self.kind == IntervalKind::Closed;
        let after_left = x.cmp_exact(&l) != Ordering::Less;
        let before_right = match x.cmp_exact(&r) {
            Ordering::Less => true,
            Ordering::Equal => closed,
            Ordering::Greater => false,
        };
        match l.cmp_exact(&r) {
            Ordering::Less => after_left && before_right,
            Ordering::Greater => after_left || before_right,
            // Zero length: empty, or the single point when closed.
            Ordering::Equal => closed && x.cmp_exact(&l) == Ordering::Equal,
        }
    }

    pub fn contains(&self, x: &TorusPoint) -> bool {
        self.contains_pos(&x.pos())
    }

    /// Distance in `2^-64` units from `x` to the nearer endpoint.
    pub(crate) fn endpoint_distance(&self, x: &Pos) -> u64 {
        if self.full {
            return u64::MAX;
        }
        x.fixed_distance(&self.left.pos()).min(x.fixed_distance(&self.right()))
    }
}
