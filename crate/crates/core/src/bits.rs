//! Word-level helpers for packed bit vectors (bit `i` lives in word `i / 64`).

pub(crate) fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

/// `dst |= src << k`, dropping bits that fall beyond `dst`.
pub(crate) fn shl_or(dst: &mut [u64], src: &[u64], k: usize) {
    let ws = k / 64;
    let bs = k % 64;
    if ws >= dst.len() {
        return;
    }
    let limit = (dst.len() - ws).min(src.len());
    if bs == 0 {
        for i in 0..limit {
            dst[i + ws] |= src[i];
        }
    } else {
        for i in 0..limit {
            dst[i + ws] |= src[i] << bs;
            if i + ws + 1 < dst.len() {
                dst[i + ws + 1] |= src[i] >> (64 - bs);
            }
        }
    }
}

/// `dst |= src >> k`.
pub(crate) fn shr_or(dst: &mut [u64], src: &[u64], k: usize) {
    let ws = k / 64;
    let bs = k % 64;
    if ws >= src.len() {
        return;
    }
    let n = (src.len() - ws).min(dst.len());
    if bs == 0 {
        for i in 0..n {
            dst[i] |= src[i + ws];
        }
    } else {
        for i in 0..n {
            let mut w = src[i + ws] >> bs;
            if i + ws + 1 < src.len() {
                w |= src[i + ws + 1] << (64 - bs);
            }
            dst[i] |= w;
        }
    }
}

/// Clear every bit at position `>= nbits`.
pub(crate) fn mask_tail(words: &mut [u64], nbits: usize) {
    let full = nbits / 64;
    let rem = nbits % 64;
    if full < words.len() {
        if rem == 0 {
            words[full] = 0;
        } else {
            words[full] &= (1u64 << rem) - 1;
        }
        for w in words.iter_mut().skip(full + 1) {
            *w = 0;
        }
    }
}

pub(crate) fn get(words: &[u64], i: usize) -> bool {
    (words[i / 64] >> (i % 64)) & 1 == 1
}

pub(crate) fn set(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

pub(crate) fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Number of set bits strictly below position `end`.
pub(crate) fn popcount_below(words: &[u64], end: usize) -> usize {
    let full = end / 64;
    let mut c = popcount(&words[..full.min(words.len())]);
    let rem = end % 64;
    if rem > 0 && full < words.len() {
        c += (words[full] & ((1u64 << rem) - 1)).count_ones() as usize;
    }
    c
}

/// Set every bit in `[lo, hi)`.
pub(crate) fn set_range(words: &mut [u64], lo: usize, hi: usize) {
    if lo >= hi {
        return;
    }
    let (wl, wh) = (lo / 64, (hi - 1) / 64);
    let lo_mask = !0u64 << (lo % 64);
    let hi_mask = !0u64 >> (63 - (hi - 1) % 64);
    if wl == wh {
        words[wl] |= lo_mask & hi_mask;
    } else {
        words[wl] |= lo_mask;
        for w in &mut words[wl + 1..wh] {
            *w = !0;
        }
        words[wh] |= hi_mask;
    }
}

/// Ascending iterator over set bit positions.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz)
            }
        })
    })
}

/// Bit vector of `{i + j : a_i = b_j = 1}` of length `la + lb - 1`, by
/// shift-or when one side is sparse and by chunked NTT convolution otherwise.
pub(crate) fn sumset_bits(a: &[u64], la: usize, b: &[u64], lb: usize) -> Vec<u64> {
    if la == 0 || lb == 0 {
        return Vec::new();
    }
    let (pa, pb) = (popcount(a), popcount(b));
    let shift_cost = pa.min(pb) as u128 * words_for(la + lb) as u128;
    if shift_cost <= 24 * (la + lb) as u128 {
        sumset_shift(a, la, b, lb)
    } else {
        sumset_ntt(a, la, b, lb)
    }
}

fn sumset_shift(a: &[u64], la: usize, b: &[u64], lb: usize) -> Vec<u64> {
    let out_len = la + lb - 1;
    let mut out = vec![0u64; words_for(out_len)];
    let (small, large) = if popcount(a) <= popcount(b) { (a, b) } else { (b, a) };
    for e in ones(small) {
        shl_or(&mut out, large, e);
    }
    mask_tail(&mut out, out_len);
    out
}

fn sumset_ntt(a: &[u64], la: usize, b: &[u64], lb: usize) -> Vec<u64> {
    const CHUNK: usize = 1 << 21;
    let out_len = la + lb - 1;
    let mut out = vec![0u64; words_for(out_len)];
    let chunks = |w: &[u64], len: usize| -> Vec<(usize, Vec<u64>)> {
        (0..len)
            .step_by(CHUNK)
            .filter_map(|start| {
                let end = (start + CHUNK).min(len);
                let v: Vec<u64> = (start..end).map(|i| get(w, i) as u64).collect();
                v.contains(&1).then_some((start, v))
            })
            .collect()
    };
    let cb = chunks(b, lb);
    for (sa, va) in chunks(a, la) {
        for (sb, vb) in &cb {
            for (k, c) in crate::ntt::convolve(&va, vb).into_iter().enumerate() {
                if c != 0 {
                    set(&mut out, sa + sb + k);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_bits(words: &[u64], n: usize) -> Vec<bool> {
        (0..n).map(|i| get(words, i)).collect()
    }

    #[test]
    fn shifts_match_naive() {
        let n = 200;
        let mut src = vec![0u64; words_for(n)];
        for i in (0..n).filter(|i| (i * 7 + 3) % 5 < 2) {
            set(&mut src, i);
        }
        for k in [0, 1, 63, 64, 65, 130, 199] {
            let mut l = vec![0u64; words_for(n)];
            shl_or(&mut l, &src, k);
            mask_tail(&mut l, n);
            let mut r = vec![0u64; words_for(n)];
            shr_or(&mut r, &src, k);
            let s = to_bits(&src, n);
            for i in 0..n {
                assert_eq!(get(&l, i), i >= k && s[i - k], "shl k={k} i={i}");
                assert_eq!(get(&r, i), i + k < n && s[i + k], "shr k={k} i={i}");
            }
        }
    }

    #[test]
    fn ranges_and_counts() {
        let mut w = vec![0u64; 4];
        set_range(&mut w, 5, 190);
        assert_eq!(popcount(&w), 185);
        assert_eq!(popcount_below(&w, 64), 59);
        assert_eq!(ones(&w).next(), Some(5));
        assert_eq!(ones(&w).last(), Some(189));
    }

    #[test]
    fn sumset_paths_agree() {
        let la = 3000;
        let lb = 2500;
        let mut a = vec![0u64; words_for(la)];
        let mut b = vec![0u64; words_for(lb)];
        for i in (0..la).filter(|i| (i * 13 + 5) % 7 < 3) {
            set(&mut a, i);
        }
        for i in (0..lb).filter(|i| (i * 11 + 1) % 9 == 0) {
            set(&mut b, i);
        }
        let mut naive = vec![false; la + lb - 1];
        for i in ones(&a) {
            for j in ones(&b) {
                naive[i + j] = true;
            }
        }
        for f in [sumset_bits, sumset_shift, sumset_ntt] {
            assert_eq!(to_bits(&f(&a, la, &b, lb), la + lb - 1), naive);
        }
        let mut sparse = vec![0u64; words_for(lb)];
        set(&mut sparse, 17);
        set(&mut sparse, 2000);
        let s = sumset_bits(&a, la, &sparse, lb);
        for k in 0..la + lb - 1 {
            let expect = (k >= 17 && k - 17 < la && get(&a, k - 17)) || (k >= 2000 && k - 2000 < la && get(&a, k - 2000));
            assert_eq!(get(&s, k), expect);
        }
    }
}
