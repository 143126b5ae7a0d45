//! Low-discrepancy point sets.

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    out
}

/// The `index`-th Halton point in `[0, 1)^dim` (index 0 is skipped so no
/// coordinate is exactly 0).
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton sequence supports up to {} dimensions", PRIMES.len());
    (0..dim).map(|d| radical_inverse(index as u64 + 1, PRIMES[d])).collect()
}

/// The first `count` Halton points in `[0, 1)^dim`.
pub fn halton_set(count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count).map(|i| halton(i, dim)).collect()
}
