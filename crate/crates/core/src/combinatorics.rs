//! Colexicographic ranking of fixed-weight bit vectors.
//!
//! The colex order on `k`-subsets of `0..n` coincides with numeric order of
//! their bitmasks, so consecutive ranks are one Gosper step apart.

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

/// Position of `mask` among all masks of the same weight, in increasing order.
pub fn rank_colex(mask: u64) -> u64 {
    let mut rank = 0;
    let mut bits = mask;
    let mut i = 1;
    while bits != 0 {
        let pos = bits.trailing_zeros();
        rank += binomial(pos, i);
        bits &= bits - 1;
        i += 1;
    }
    rank
}

/// Inverse of [`rank_colex`] for weight `k`.
pub fn unrank_colex(mut rank: u64, k: u32) -> u64 {
    let mut mask = 0;
    for i in (1..=k).rev() {
        // largest c with C(c, i) <= rank
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        rank -= binomial(c, i);
        mask |= 1 << c;
    }
    mask
}

/// Next larger integer with the same popcount (Gosper's hack). `x` must be nonzero.
#[inline]
pub fn next_same_weight(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Splits `0..total` into at most `parts` contiguous, nearly equal ranges.
pub fn chunk_ranges(total: u64, parts: usize) -> Vec<std::ops::Range<u64>> {
    let parts = (parts.max(1) as u64).min(total.max(1));
    (0..parts).map(|p| (total * p / parts)..(total * (p + 1) / parts)).filter(|r| !r.is_empty()).collect()
}
