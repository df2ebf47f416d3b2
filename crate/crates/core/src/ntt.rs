//! Exact integer convolution via a number-theoretic transform over the prime
//! 998244353 = 119·2^23 + 1. Results are exact whenever every true
//! coefficient of the convolution is below the modulus.

pub const MODULUS: u64 = 998_244_353;
const PRIMITIVE_ROOT: u64 = 3;
/// Largest supported transform length (2^23).
pub const MAX_LEN: usize = 1 << 23;

/// Modular exponentiation by repeated squaring.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// In-place iterative radix-2 transform. `a.len()` must be a power of two
/// no larger than `MAX_LEN`.
pub fn transform(a: &mut [u64], invert: bool) {
    let n = a.len();
    assert!(n.is_power_of_two() && n <= MAX_LEN, "bad transform length {n}");
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(PRIMITIVE_ROOT, (MODULUS - 1) / len as u64, MODULUS);
        if invert {
            w = pow_mod(w, MODULUS - 2, MODULUS);
        }
        let half = len / 2;
        let mut roots = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            roots.push(cur);
            cur = cur * w % MODULUS;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let u = lo[k];
                let v = hi[k] * roots[k] % MODULUS;
                lo[k] = if u + v >= MODULUS { u + v - MODULUS } else { u + v };
                hi[k] = if u >= v { u - v } else { u + MODULUS - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, MODULUS - 2, MODULUS);
        for x in a.iter_mut() {
            *x = *x * inv_n % MODULUS;
        }
    }
}

/// Linear convolution of two nonnegative integer sequences. Exact provided
/// every output coefficient is below `MODULUS`.
pub fn convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![0u64; n];
    let mut fb = vec![0u64; n];
    for (dst, &src) in fa.iter_mut().zip(a) {
        *dst = src % MODULUS;
    }
    for (dst, &src) in fb.iter_mut().zip(b) {
        *dst = src % MODULUS;
    }
    transform(&mut fa, false);
    transform(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % MODULUS;
    }
    transform(&mut fa, true);
    fa.truncate(out_len);
    fa
}

/// Whether a linear convolution of these lengths fits the transform.
pub fn fits(len_a: usize, len_b: usize) -> bool {
    len_a + len_b <= MAX_LEN + 1
}
