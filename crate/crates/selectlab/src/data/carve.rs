//! Carving a balanced source into an imbalanced labeled set plus an
//! unlabeled pool.
//!
//! For every class, a keep-fraction of its samples stays labeled and the
//! remainder moves into the pool with its ground truth hidden. Minor
//! classes get a small keep-fraction, major classes a large one; with a
//! balanced source the resulting imbalance ratio is exactly
//! `major_keep_fraction / minor_keep_fraction`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use super::dataset::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceSpec {
    minor_classes: BTreeSet<usize>,
    minor_keep_fraction: f64,
    major_keep_fraction: f64,
    seed: u64,
}

impl ImbalanceSpec {
    pub fn new(
        minor_classes: impl IntoIterator<Item = usize>,
        minor_keep_fraction: f64,
        major_keep_fraction: f64,
        seed: u64,
    ) -> Result<Self> {
        let minor_classes: BTreeSet<usize> = minor_classes.into_iter().collect();
        if minor_classes.is_empty() {
            return Err(Error::input("at least one minor class required".to_string()));
        }
        for (name, frac) in [
            ("minor_keep_fraction", minor_keep_fraction),
            ("major_keep_fraction", major_keep_fraction),
        ] {
            if frac <= 0.0 || frac > 1.0 || frac.is_nan() {
                return Err(Error::input(format!("{name} must be in (0, 1], got {frac}")));
            }
        }
        Ok(ImbalanceSpec {
            minor_classes,
            minor_keep_fraction,
            major_keep_fraction,
            seed,
        })
    }

    pub fn minor_classes(&self) -> &BTreeSet<usize> {
        &self.minor_classes
    }

    pub fn is_minor(&self, class: usize) -> bool {
        self.minor_classes.contains(&class)
    }

    pub fn minor_keep_fraction(&self) -> f64 {
        self.minor_keep_fraction
    }

    pub fn major_keep_fraction(&self) -> f64 {
        self.major_keep_fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn check_against(&self, num_classes: usize) -> Result<()> {
        if let Some(&bad) = self.minor_classes.iter().find(|&&c| c >= num_classes) {
            return Err(Error::input(format!(
                "minor class {bad} out of range for {num_classes} classes"
            )));
        }
        if self.minor_classes.len() >= num_classes {
            return Err(Error::input(
                "minor classes must be a strict subset of all classes".to_string(),
            ));
        }
        Ok(())
    }
}

/// Result of carving: the labeled set, the pool, the spec that produced
/// them, and the source-index partition for auditability.
#[derive(Debug, Clone)]
pub struct CarvedSplit {
    pub labeled: LabeledDataset,
    pub pool: UnlabeledPool,
    pub spec: ImbalanceSpec,
    pub labeled_source_indices: Vec<usize>,
    pub pool_source_indices: Vec<usize>,
}

impl CarvedSplit {
    /// `max |C_i| / min |C_i|` over the labeled set.
    pub fn imbalance_ratio(&self) -> f64 {
        let counts = self.labeled.class_counts();
        let max = counts.iter().copied().max().unwrap_or(0);
        let min = counts.iter().copied().min().unwrap_or(0);
        max as f64 / min as f64
    }
}

/// Number of samples kept labeled for a class of `count` samples.
///
/// Ceiling rounding so no class is emptied; the epsilon guards against
/// `fraction * count` landing a hair above an exact integer.
pub fn kept_count(count: usize, fraction: f64) -> usize {
    ((fraction * count as f64) - 1e-9).ceil().max(1.0) as usize
}

pub fn carve_imbalance(source: &LabeledDataset, spec: &ImbalanceSpec) -> Result<CarvedSplit> {
    spec.check_against(source.num_classes())?;
    let mut rng = rng_from_seed(spec.seed());
    let mut labeled_idx = Vec::new();
    let mut pool_idx = Vec::new();
    for (class, mut group) in source.indices_by_class().into_iter().enumerate() {
        if group.is_empty() {
            return Err(Error::input(format!(
                "class {class} has no samples; keep fraction would label none"
            )));
        }
        let frac = if spec.is_minor(class) {
            spec.minor_keep_fraction()
        } else {
            spec.major_keep_fraction()
        };
        let keep = kept_count(group.len(), frac).min(group.len());
        group.shuffle(&mut rng);
        labeled_idx.extend_from_slice(&group[..keep]);
        pool_idx.extend_from_slice(&group[keep..]);
    }
    // Preserve source order within each side.
    labeled_idx.sort_unstable();
    pool_idx.sort_unstable();

    let labeled = source.subset(&labeled_idx)?;
    let pool = UnlabeledPool::new(
        source.features().select_rows(&pool_idx),
        pool_idx.iter().map(|&i| source.labels()[i]).collect(),
        source.num_classes(),
    )?;
    Ok(CarvedSplit {
        labeled,
        pool,
        spec: spec.clone(),
        labeled_source_indices: labeled_idx,
        pool_source_indices: pool_idx,
    })
}
