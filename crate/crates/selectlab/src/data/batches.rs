//! Seeded epoch shuffling.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Splits `0..n` into shuffled batches. Each `(seed, epoch)` pair selects
/// an independent ChaCha stream, so epochs permute independently while the
/// whole schedule stays reproducible.
pub fn minibatches(n: usize, batch_size: usize, seed: u64, epoch: u64) -> Vec<Vec<usize>> {
    assert!(batch_size >= 1, "batch_size must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    indices.chunks(batch_size).map(<[usize]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_are_full_then_remainder() {
        let batches = minibatches(10, 4, 0, 0);
        let sizes: Vec<usize> = batches.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
    }

    #[test]
    fn same_seed_and_epoch_same_order() {
        assert_eq!(minibatches(50, 7, 3, 9), minibatches(50, 7, 3, 9));
        assert_ne!(minibatches(50, 7, 3, 9), minibatches(50, 7, 3, 10));
    }

    #[test]
    fn batches_partition_all_indices() {
        let mut seen: Vec<usize> = minibatches(123, 8, 5, 2).concat();
        seen.sort_unstable();
        assert_eq!(seen, (0..123).collect::<Vec<_>>());
    }
}
