//! Exact set arithmetic in the cyclic group Z/Q.
//!
//! A [`ZqSet`] is a packed bit vector of length `Q` that carries its modulus.
//! Sumsets use either rotate-and-or on words or the exact transform backend,
//! whichever is cheaper; [`pair_counts_with`] exposes both convolution
//! backends so they can be compared.

use crate::bits;
use crate::ntt;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZqError {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("element {element} out of range for modulus {modulus}")]
    OutOfRange { element: u64, modulus: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("popularity threshold {0} outside [0, 1]")]
    InvalidDelta(f64),
    #[error("{index} does not divide {modulus}")]
    NotDivisor { index: usize, modulus: usize },
    #[error("set file: {0}")]
    Parse(String),
}

/// A subset of Z/Q stored as a dense bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZqSet {
    modulus: usize,
    words: Vec<u64>,
}

impl fmt::Debug for ZqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZqSet(Q={}, {:?})", self.modulus, self.to_vec())
    }
}

impl ZqSet {
    pub fn empty(modulus: usize) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        ZqSet { modulus, words: vec![0; bits::words_for(modulus)] }
    }

    pub fn full(modulus: usize) -> Self {
        let mut s = Self::empty(modulus);
        bits::set_range(&mut s.words, 0, modulus);
        s
    }

    pub fn singleton(modulus: usize, x: usize) -> Self {
        Self::from_predicate(modulus, |y| y == x % modulus)
    }

    /// Builds a set from elements that must already lie in `[0, Q)`.
    pub fn from_elements<I>(modulus: usize, elements: I) -> Result<Self, ZqError>
    where
        I: IntoIterator<Item = u64>,
    {
        if modulus == 0 {
            return Err(ZqError::ZeroModulus);
        }
        let mut s = Self::empty(modulus);
        for e in elements {
            if e >= modulus as u64 {
                return Err(ZqError::OutOfRange { element: e, modulus });
            }
            bits::set(&mut s.words, e as usize);
        }
        Ok(s)
    }

    /// Builds a set from arbitrary integers, reduced mod Q.
    pub fn from_residues<I>(modulus: usize, elements: I) -> Self
    where
        I: IntoIterator<Item = i64>,
    {
        let mut s = Self::empty(modulus);
        for e in elements {
            bits::set(&mut s.words, e.rem_euclid(modulus as i64) as usize);
        }
        s
    }

    pub fn from_predicate(modulus: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::empty(modulus);
        for x in 0..modulus {
            if pred(x) {
                bits::set(&mut s.words, x);
            }
        }
        s
    }

    /// Interprets the low `Q` bits of `mask` as a set (requires `Q <= 64`).
    pub fn from_mask(modulus: usize, mask: u64) -> Self {
        assert!(modulus <= 64);
        let mut s = Self::empty(modulus);
        s.words[0] = mask;
        bits::mask_tail(&mut s.words, modulus);
        s
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn len(&self) -> usize {
        bits::popcount(&self.words)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.modulus
    }

    pub fn contains(&self, x: usize) -> bool {
        x < self.modulus && bits::get(&self.words, x)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        bits::ones(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    fn check_same(&self, other: &ZqSet) -> Result<(), ZqError> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(ZqError::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    fn zip_words(&self, other: &ZqSet, f: impl Fn(u64, u64) -> u64) -> Result<ZqSet, ZqError> {
        self.check_same(other)?;
        let mut words: Vec<u64> = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        bits::mask_tail(&mut words, self.modulus);
        Ok(ZqSet { modulus: self.modulus, words })
    }

    pub fn union(&self, other: &ZqSet) -> Result<ZqSet, ZqError> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &ZqSet) -> Result<ZqSet, ZqError> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &ZqSet) -> Result<ZqSet, ZqError> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &ZqSet) -> Result<ZqSet, ZqError> {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn complement(&self) -> ZqSet {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        bits::mask_tail(&mut words, self.modulus);
        ZqSet { modulus: self.modulus, words }
    }

    pub fn is_subset(&self, other: &ZqSet) -> bool {
        self.modulus == other.modulus && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `S + s`.
    pub fn translate(&self, shift: i64) -> ZqSet {
        let q = self.modulus;
        let s = shift.rem_euclid(q as i64) as usize;
        let mut out = ZqSet::empty(q);
        rotate_or(&mut out.words, &self.words, s, q);
        out
    }

    /// `-S`.
    pub fn negate(&self) -> ZqSet {
        let q = self.modulus;
        let mut out = ZqSet::empty(q);
        for x in self.iter() {
            bits::set(&mut out.words, (q - x) % q);
        }
        out
    }

    /// `{a + b mod Q : a in A, b in B}`.
    pub fn sumset(&self, other: &ZqSet) -> Result<ZqSet, ZqError> {
        self.check_same(other)?;
        let q = self.modulus;
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let m = small.len();
        if m == 0 {
            return Ok(ZqSet::empty(q));
        }
        let shift_cost = m as f64 * (bits::words_for(q) as f64 + 4.0);
        let l = (2 * q).next_power_of_two() as f64;
        let transform_cost = 6.0 * l * l.log2().max(1.0) + 2.0 * q as f64;
        if shift_cost <= transform_cost || !ntt::fits(q, q) {
            let mut out = ZqSet::empty(q);
            for a in small.iter() {
                rotate_or(&mut out.words, &large.words, a, q);
            }
            Ok(out)
        } else {
            let counts = pair_counts_with(self, other, ConvolutionBackend::Transform)?;
            Ok(ZqSet::from_predicate(q, |x| counts.counts[x] > 0))
        }
    }

    /// `S + H`, the union of the cosets of `H` that meet `S`.
    pub fn add_subgroup(&self, h: &Subgroup) -> Result<ZqSet, ZqError> {
        if h.modulus != self.modulus {
            return Err(ZqError::ModulusMismatch(self.modulus, h.modulus));
        }
        let d = h.index;
        let mut hit = vec![false; d];
        for x in self.iter() {
            hit[x % d] = true;
        }
        Ok(ZqSet::from_predicate(self.modulus, |x| hit[x % d]))
    }

    /// Image under `x -> x / d` of `S ∩ dZ/QZ`, as a subset of `Z/(Q/d)`.
    pub fn restrict_to_subgroup(&self, h: &Subgroup) -> ZqSet {
        let d = h.index;
        let mut out = ZqSet::empty(h.order());
        for x in self.iter().filter(|x| x % d == 0) {
            bits::set(&mut out.words, x / d);
        }
        out
    }

    /// Image of a subset of `Z/(Q/d)` under `j -> d j`, as a subset of Z/Q.
    pub fn lift_from_subgroup(part: &ZqSet, h: &Subgroup) -> ZqSet {
        debug_assert_eq!(part.modulus, h.order());
        let mut out = ZqSet::empty(h.modulus);
        for j in part.iter() {
            bits::set(&mut out.words, j * h.index);
        }
        out
    }

    /// Largest subgroup `H` with `S + H = S`.
    pub fn stabilizer(&self) -> Stabilizer {
        let q = self.modulus;
        if self.is_empty() {
            return Stabilizer { subgroup: Subgroup { modulus: q, index: 1 }, empty_input: true };
        }
        for d in divisors(q) {
            if d == q || self.translate(d as i64) == *self {
                return Stabilizer { subgroup: Subgroup { modulus: q, index: d }, empty_input: false };
            }
        }
        unreachable!("index Q always stabilizes")
    }

    /// True iff `self` meets every coset of every subgroup of index at most
    /// `max_index`.
    pub fn meets_all_cosets(&self, max_index: usize) -> bool {
        let members = self.to_vec();
        divisors(self.modulus).into_iter().take_while(|&d| d <= max_index).all(|d| {
            let mut hit = vec![false; d];
            let mut left = d;
            for &x in &members {
                if !hit[x % d] {
                    hit[x % d] = true;
                    left -= 1;
                    if left == 0 {
                        break;
                    }
                }
            }
            left == 0
        })
    }

    /// Text form: a `Q=<int>` header followed by one member per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("Q={}\n", self.modulus);
        for x in self.iter() {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<ZqSet, ZqError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| ZqError::Parse("missing header".into()))?;
        let q: usize = header
            .strip_prefix("Q=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| ZqError::Parse(format!("bad header {header:?}")))?;
        let elems = lines
            .map(|l| l.parse::<u64>().map_err(|_| ZqError::Parse(format!("bad element {l:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        ZqSet::from_elements(q, elems)
    }

    /// Parses either the JSON form or the text form.
    pub fn parse_any(text: &str) -> Result<ZqSet, ZqError> {
        if text.trim_start().starts_with('{') {
            let file: SetFile =
                serde_json::from_str(text).map_err(|e| ZqError::Parse(e.to_string()))?;
            ZqSet::try_from(file)
        } else {
            ZqSet::parse_text(text)
        }
    }
}

/// Cyclic rotation by `s` of the low `q` bits of `src`, or-ed into `dst`.
fn rotate_or(dst: &mut [u64], src: &[u64], s: usize, q: usize) {
    if s == 0 {
        for (d, w) in dst.iter_mut().zip(src) {
            *d |= w;
        }
        return;
    }
    bits::shl_or(dst, src, s);
    bits::mask_tail(dst, q);
    bits::shr_or(dst, src, q - s);
    bits::mask_tail(dst, q);
}

/// Canonical serialized form: modulus plus sorted member list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFile {
    #[serde(rename = "Q")]
    pub modulus: usize,
    pub elements: Vec<u64>,
}

impl TryFrom<SetFile> for ZqSet {
    type Error = ZqError;
    fn try_from(f: SetFile) -> Result<Self, Self::Error> {
        ZqSet::from_elements(f.modulus, f.elements)
    }
}

impl From<ZqSet> for SetFile {
    fn from(s: ZqSet) -> Self {
        SetFile { modulus: s.modulus, elements: s.iter().map(|x| x as u64).collect() }
    }
}

impl Serialize for ZqSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SetFile::from(self.clone()).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ZqSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let f = SetFile::deserialize(de)?;
        ZqSet::try_from(f).map_err(serde::de::Error::custom)
    }
}

/// `counts[x] = #{(a, b) in A x B : a + b = x mod Q}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCountVector {
    pub modulus: usize,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionBackend {
    /// Enumerates all pairs.
    Direct,
    /// Number-theoretic transform of length `>= 2Q`, folded mod Q.
    Transform,
}

pub fn pair_counts(a: &ZqSet, b: &ZqSet) -> Result<PairCountVector, ZqError> {
    let q = a.modulus;
    let backend = if (a.len() as u64) * (b.len() as u64) <= 64 * q as u64 || !ntt::fits(q, q) {
        ConvolutionBackend::Direct
    } else {
        ConvolutionBackend::Transform
    };
    pair_counts_with(a, b, backend)
}

pub fn pair_counts_with(
    a: &ZqSet,
    b: &ZqSet,
    backend: ConvolutionBackend,
) -> Result<PairCountVector, ZqError> {
    a.check_same(b)?;
    let q = a.modulus;
    let mut counts = vec![0u64; q];
    match backend {
        ConvolutionBackend::Direct => {
            let bs = b.to_vec();
            for x in a.iter() {
                for &y in &bs {
                    let s = x + y;
                    counts[if s >= q { s - q } else { s }] += 1;
                }
            }
        }
        ConvolutionBackend::Transform => {
            let ia: Vec<u64> = (0..q).map(|x| a.contains(x) as u64).collect();
            let ib: Vec<u64> = (0..q).map(|x| b.contains(x) as u64).collect();
            for (i, c) in ntt::convolve(&ia, &ib).into_iter().enumerate() {
                counts[i % q] += c;
            }
        }
    }
    Ok(PairCountVector { modulus: q, counts })
}

/// `A +_δ B = {x : counts[x] > δ Q}`.
pub fn popular_sumset(a: &ZqSet, b: &ZqSet, delta: f64) -> Result<ZqSet, ZqError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(ZqError::InvalidDelta(delta));
    }
    let pc = pair_counts(a, b)?;
    let threshold = delta * a.modulus as f64;
    Ok(ZqSet::from_predicate(a.modulus, |x| pc.counts[x] as f64 > threshold))
}

/// The subgroup `dZ/QZ` of index `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subgroup {
    pub modulus: usize,
    pub index: usize,
}

impl Subgroup {
    pub fn new(modulus: usize, index: usize) -> Result<Self, ZqError> {
        if modulus == 0 {
            return Err(ZqError::ZeroModulus);
        }
        if index == 0 || modulus % index != 0 {
            return Err(ZqError::NotDivisor { index, modulus });
        }
        Ok(Subgroup { modulus, index })
    }

    pub fn whole(modulus: usize) -> Self {
        Subgroup { modulus, index: 1 }
    }

    /// The divisor `d` generating `dZ/QZ`.
    pub fn generator(&self) -> usize {
        self.index
    }

    pub fn order(&self) -> usize {
        self.modulus / self.index
    }

    pub fn contains(&self, x: usize) -> bool {
        x % self.index == 0
    }

    pub fn elements(&self) -> ZqSet {
        ZqSet::from_predicate(self.modulus, |x| x % self.index == 0)
    }

    /// The coset `c + H`.
    pub fn coset(&self, c: usize) -> ZqSet {
        let r = c % self.index;
        ZqSet::from_predicate(self.modulus, |x| x % self.index == r)
    }
}

/// Result of [`ZqSet::stabilizer`]; `empty_input` flags the convention that
/// the empty set is stabilized by the whole group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilizer {
    pub subgroup: Subgroup,
    pub empty_input: bool,
}

/// Divisors of `q` in ascending order.
pub fn divisors(q: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= q {
        if q % d == 0 {
            small.push(d);
            if d * d != q {
                large.push(q / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// One subgroup per divisor of `q`, sorted by index ascending.
pub fn all_subgroups(q: usize) -> Vec<Subgroup> {
    divisors(q).into_iter().map(|index| Subgroup { modulus: q, index }).collect()
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
