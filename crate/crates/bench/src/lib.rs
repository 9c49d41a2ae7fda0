//! Shared fixtures for the criterion benches.

use dapc_core::generate::{self, BlobsParams};
use dapc_core::Dataset;

/// Five equal Gaussian blobs in the plane, fixed seed.
pub fn blobs(n: usize) -> Dataset {
    blobs_in(n, 2)
}

pub fn blobs_in(n: usize, dim: usize) -> Dataset {
    generate::blobs(&BlobsParams {
        n,
        clusters: 5,
        dim,
        seed: 42,
        ..Default::default()
    })
    .0
}

/// Deterministic pseudo-random pairs in `0..n` for union-find workloads.
pub fn index_pairs(n: usize, count: usize) -> Vec<(usize, usize)> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % n as u64) as usize
    };
    (0..count).map(|_| (next(), next())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_stable() {
        assert_eq!(blobs(100), blobs(100));
        assert_eq!(blobs_in(10, 3).dim(), 3);
        let pairs = index_pairs(10, 50);
        assert_eq!(pairs, index_pairs(10, 50));
        assert!(pairs.iter().all(|&(a, b)| a < 10 && b < 10));
    }
}
