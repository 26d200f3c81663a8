//! Deterministic work scheduling.
//!
//! Every embarrassingly parallel loop in this crate (bootstrap resamples,
//! synthetic assignment draws, study replications) goes through
//! [`indexed_map`]. Each task derives its own RNG seed from the master seed
//! and its index, so the collected results are bit-identical whether the
//! loop runs on one thread, many threads, or the sequential fallback built
//! without the `parallel` feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Derives an independent per-task seed from a master seed and a task index
/// (SplitMix64 finalizer over master + index stride).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps `f` over `0..len`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..len`, preserving index order in the output.
#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    indexed_map_seq(len, f)
}

/// Always-sequential variant, kept public so benchmarks can compare the two.
pub fn indexed_map_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_across_indices() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), seeds.len());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let par = indexed_map(257, |i| derive_seed(7, i as u64));
        let seq = indexed_map_seq(257, |i| derive_seed(7, i as u64));
        assert_eq!(par, seq);
    }
}
