//! Gowers `U¹`/`U²` norms and the Fourier `u²` norm on `Z/Q` and on finite
//! intervals, single-scale seminorm estimators, the local ergodicity
//! statistic, and constructive structured/uniform decompositions.
//!
//! Signals are complex sequences. On `Z/Q` the Fourier coefficients are
//! `f̂(ξ) = (1/Q) Σ f(n) e(-nξ/Q)`. On an interval `{x+1, ..., x+N}` the
//! signal is zero-padded into `Z/Ñ` with `Ñ` the least power of two with
//! `Ñ >= 2^k N`, and norms are normalized by those of the indicator of `[N]`.

mod regularity;
mod scale;
mod u2;

pub use regularity::{block_decompose, regularity_decompose, BlockDecomposition, RegularityDecomposition};
pub use scale::{local_ergodicity_stat, u1_scale_estimate, u2_scale_estimate};
pub use u2::{u2_interval, U2Estimate};

pub use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UniformityError {
    #[error("only k = 1 and k = 2 are supported, got {0}")]
    UnsupportedOrder(u32),
    #[error("empty signal")]
    Empty,
    #[error("window length {h} must satisfy 1 <= H <= N = {n}")]
    BadWindow { n: usize, h: usize },
    #[error("signal of length {len} is shorter than N = {n}")]
    TooShort { len: usize, n: usize },
    #[error("signal value of modulus {0} exceeds the bound 1")]
    NotBounded(f64),
    #[error("signal value {0} lies outside [0, 1]")]
    OutsideUnitInterval(f64),
    #[error("epsilon must be positive and finite, got {0}")]
    BadEpsilon(f64),
    #[error("block length must be positive")]
    ZeroBlock,
    #[error("scale schedule: {0}")]
    BadSchedule(String),
}

/// Samples `f(x+1), ..., f(x+N)` with the bound `max |f|` recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalWindow {
    pub offset: u64,
    #[serde(with = "signal_values")]
    pub values: Vec<Complex64>,
    pub bound: f64,
}

impl SignalWindow {
    pub fn new(offset: u64, values: Vec<Complex64>) -> Self {
        let bound = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        SignalWindow { offset, values, bound }
    }

    pub fn from_real(offset: u64, values: &[f64]) -> Self {
        SignalWindow::new(offset, real_signal(values))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Signal samples as JSON: `[[re, im], ...]` on output; either that or a
/// plain array of reals on input.
pub mod signal_values {
    use super::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Sample {
        Real(f64),
        Pair([f64; 2]),
    }

    pub fn serialize<S: Serializer>(values: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        values.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<Sample>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|s| match s {
                Sample::Real(r) => Complex64::new(r, 0.0),
                Sample::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect())
    }
}

pub fn real_signal(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// Sequences `N_s` and `H_s` with optional auxiliary `M_s`, `K_s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleSchedule {
    pub n: Vec<u64>,
    pub h: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u64>>,
}

impl ScaleSchedule {
    pub fn new(n: Vec<u64>, h: Vec<u64>) -> Result<Self, UniformityError> {
        let s = ScaleSchedule { n, h, m: None, k: None };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), UniformityError> {
        let bad = |m: &str| Err(UniformityError::BadSchedule(m.to_string()));
        if self.n.len() != self.h.len() {
            return bad("N and H have different lengths");
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("N is not strictly increasing");
        }
        if self.n.iter().zip(&self.h).any(|(&n, &h)| h == 0 || h > n) {
            return bad("H_s must lie in [1, N_s]");
        }
        for aux in [&self.m, &self.k].into_iter().flatten() {
            if aux.len() != self.n.len() {
                return bad("auxiliary sequence has the wrong length");
            }
        }
        Ok(())
    }
}

pub(crate) fn check_order(k: u32) -> Result<(), UniformityError> {
    if k == 1 || k == 2 {
        Ok(())
    } else {
        Err(UniformityError::UnsupportedOrder(k))
    }
}

/// `f̂(ξ) = (1/Q) Σ_n f(n) e(-nξ/Q)` for all `ξ`.
pub fn fourier_coefficients(f: &[Complex64]) -> Vec<Complex64> {
    let q = f.len();
    let mut buf = f.to_vec();
    FftPlanner::new().plan_fft_forward(q).process(&mut buf);
    let scale = 1.0 / q as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// `‖f‖_{U^k(Z/Q)}`: `|E f|` for `k = 1` and `‖f̂‖_{ℓ⁴}` for `k = 2`.
pub fn gowers_cyclic(f: &[Complex64], k: u32) -> Result<f64, UniformityError> {
    check_order(k)?;
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    Ok(match k {
        1 => (f.iter().sum::<Complex64>() / f.len() as f64).norm(),
        _ => fourier_coefficients(f).iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>().powf(0.25),
    })
}

/// `‖f‖_{U²(Z/Q)}` from the additive-derivative form
/// `Q^{-3} Σ_h |Σ_x f(x) conj f(x+h)|²`, which regroups the `(x, h₁, h₂)`
/// triple sum without any transform. `O(Q²)`.
pub fn gowers_u2_direct(f: &[Complex64]) -> Result<f64, UniformityError> {
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    let q = f.len();
    let total: f64 = (0..q)
        .map(|h| (0..q).map(|x| f[x] * f[(x + h) % q].conj()).sum::<Complex64>().norm_sqr())
        .sum();
    Ok((total / (q as f64).powi(3)).powf(0.25))
}

fn embedding_size(n: usize, k: u32) -> usize {
    (n << k).next_power_of_two()
}

/// `‖f‖_{U^k({x+1, ..., x+N})} = ‖f̃‖_{U^k(Z/Ñ)} / ‖1_{[N]}‖_{U^k(Z/Ñ)}`.
pub fn gowers_interval(f: &SignalWindow, k: u32) -> Result<f64, UniformityError> {
    check_order(k)?;
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    let size = embedding_size(f.len(), k);
    let mut padded = f.values.clone();
    padded.resize(size, Complex64::new(0.0, 0.0));
    let mut indicator = vec![Complex64::new(1.0, 0.0); f.len()];
    indicator.resize(size, Complex64::new(0.0, 0.0));
    Ok(gowers_cyclic(&padded, k)? / gowers_cyclic(&indicator, k)?)
}

/// The chain `max |f̂| <= ‖f̂‖₄ <= (max |f̂|)^{1/2}` for a 1-bounded `f` on `Z/Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2Chain {
    pub u2: f64,
    pub big_u2: f64,
    pub sqrt_u2: f64,
    pub holds: bool,
}

/// Additive tolerance of [`u2_big_u2_chain`].
pub const CHAIN_SLACK: f64 = 1e-9;

pub fn u2_big_u2_chain(f: &[Complex64]) -> Result<U2Chain, UniformityError> {
    if f.is_empty() {
        return Err(UniformityError::Empty);
    }
    if let Some(v) = f.iter().map(|v| v.norm()).find(|&m| m > 1.0 + 1e-12) {
        return Err(UniformityError::NotBounded(v));
    }
    let coeffs = fourier_coefficients(f);
    let u2 = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let big_u2 = coeffs.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>().powf(0.25);
    let sqrt_u2 = u2.sqrt();
    let holds = u2 <= big_u2 + CHAIN_SLACK && big_u2 <= sqrt_u2 + CHAIN_SLACK;
    Ok(U2Chain { u2, big_u2, sqrt_u2, holds })
}
