//! Random oversampling with replacement.

use rand::Rng;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Balances class counts by re-drawing (with replacement) from each
/// deficient class until every class matches the largest one. All original
/// samples are retained in their original order; duplicates are appended.
pub fn oversample_to_balance(ds: &LabeledDataset, seed: u64) -> Result<LabeledDataset> {
    let counts = ds.class_counts();
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::input(format!("class {empty} has no samples to oversample")));
    }
    let target = *counts.iter().max().expect("at least one class");
    let groups = ds.indices_by_class();

    let mut rng = rng_from_seed(seed);
    let mut rows: Vec<usize> = (0..ds.len()).collect();
    for group in &groups {
        for _ in group.len()..target {
            rows.push(group[rng.gen_range(0..group.len())]);
        }
    }
    if rows.len() == ds.len() {
        return Ok(ds.clone());
    }
    let features = ds.features().select_rows(&rows);
    let labels = rows.iter().map(|&i| ds.labels()[i]).collect();
    LabeledDataset::new(features, labels, ds.num_classes())
}

/// True when every row of `over` equals some row of `base` with the same
/// label. Used by tests and the self-check suite.
pub fn rows_come_from(base: &LabeledDataset, over: &LabeledDataset) -> bool {
    let find = |row: &[f64], label: usize| {
        (0..base.len()).any(|i| base.labels()[i] == label && base.features().row(i) == row)
    };
    (0..over.len()).all(|i| find(over.features().row(i), over.labels()[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate::generate_gaussian_blobs;

    fn imbalanced(counts: &[usize], seed: u64) -> LabeledDataset {
        let max = *counts.iter().max().unwrap();
        let ds = generate_gaussian_blobs(counts.len(), max, counts.len().div_ceil(2).max(1), 1.0, seed)
            .unwrap();
        let mut keep = Vec::new();
        for (class, group) in ds.indices_by_class().into_iter().enumerate() {
            keep.extend_from_slice(&group[..counts[class]]);
        }
        keep.sort_unstable();
        ds.subset(&keep).unwrap()
    }

    #[test]
    fn nine_hundred_vs_ten_becomes_square() {
        let ds = imbalanced(&[900, 10], 3);
        let balanced = oversample_to_balance(&ds, 11).unwrap();
        assert_eq!(balanced.class_counts(), vec![900, 900]);
        assert!(rows_come_from(&ds, &balanced));
        // Originals are retained as a prefix.
        assert_eq!(balanced.subset(&(0..ds.len()).collect::<Vec<_>>()).unwrap(), ds);
    }

    #[test]
    fn already_balanced_is_identity() {
        let ds = generate_gaussian_blobs(3, 40, 2, 1.0, 9).unwrap();
        let balanced = oversample_to_balance(&ds, 11).unwrap();
        assert_eq!(balanced, ds);
    }

    #[test]
    fn three_way_imbalance() {
        let ds = imbalanced(&[450, 50, 50], 5);
        let balanced = oversample_to_balance(&ds, 2).unwrap();
        assert_eq!(balanced.class_counts(), vec![450, 450, 450]);
        assert!(rows_come_from(&ds, &balanced));
    }
}
