//! Experiment harness: seeded multi-strategy runs, CSV/JSON emission, and
//! the built-in self-check suite.

mod config;
mod experiment;
mod selfcheck;
mod summary;

pub use config::{parse_config, parse_config_file, DatasetSpec, ExperimentConfig, StrategyKind};
pub use experiment::{prepare_data, run_experiment, run_one, ExperimentOutcome, RunRecord};
pub use selfcheck::{selfcheck, CheckResult};
pub use summary::{median, render_summary, summarize_dir, summarize_records, write_summary, Summary, SummaryRow};

use rand::seq::SliceRandom;

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Splits off a class-balanced held-out test set: every class contributes
/// `floor(fraction * smallest_class)` samples, so the test set is balanced
/// even if the source is not. The remainder is returned first, for carving.
pub fn held_out_test_split(
    source: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if fraction <= 0.0 || fraction > 0.5 || fraction.is_nan() {
        return Err(Error::input(format!(
            "test fraction must be in (0, 0.5], got {fraction}"
        )));
    }
    let counts = source.class_counts();
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let per_class = (fraction * min_count as f64).floor() as usize;
    if per_class == 0 {
        return Err(Error::input(format!(
            "fraction {fraction} of the smallest class ({min_count} samples) is empty"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut test_idx = Vec::with_capacity(per_class * counts.len());
    let mut train_idx = Vec::new();
    for mut group in source.indices_by_class() {
        group.shuffle(&mut rng);
        test_idx.extend_from_slice(&group[..per_class]);
        train_idx.extend_from_slice(&group[per_class..]);
    }
    test_idx.sort_unstable();
    train_idx.sort_unstable();
    Ok((source.subset(&train_idx)?, source.subset(&test_idx)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_gaussian_blobs;

    #[test]
    fn balanced_test_split_counts() {
        let source = generate_gaussian_blobs(4, 100, 4, 1.0, 3).unwrap();
        let (train, test) = held_out_test_split(&source, 0.1, 7).unwrap();
        assert_eq!(test.class_counts(), vec![10, 10, 10, 10]);
        assert_eq!(train.class_counts(), vec![90, 90, 90, 90]);
    }

    #[test]
    fn split_is_disjoint_and_complete() {
        let source = generate_gaussian_blobs(3, 50, 3, 1.0, 5).unwrap();
        let (train, test) = held_out_test_split(&source, 0.2, 1).unwrap();
        assert_eq!(train.len() + test.len(), source.len());
        // No feature row occurs in both sides.
        for i in 0..test.len() {
            let row = test.features().row(i);
            let dup = (0..train.len()).any(|j| train.features().row(j) == row);
            assert!(!dup, "test row {i} also appears in train");
        }
    }

    #[test]
    fn same_seed_same_split() {
        let source = generate_gaussian_blobs(3, 50, 3, 1.0, 5).unwrap();
        let a = held_out_test_split(&source, 0.2, 9).unwrap();
        let b = held_out_test_split(&source, 0.2, 9).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn degenerate_fractions_rejected() {
        let source = generate_gaussian_blobs(3, 50, 3, 1.0, 5).unwrap();
        assert!(held_out_test_split(&source, 0.0, 1).is_err());
        assert!(held_out_test_split(&source, 0.6, 1).is_err());
        assert!(held_out_test_split(&source, 0.001, 1).is_err());
    }
}
