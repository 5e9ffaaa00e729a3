//! Labeled datasets and the unlabeled pool.

use crate::error::{Error, Result};
use crate::nn::Matrix;

/// Feature matrix plus dense integer class labels in `[0, num_classes)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabeledDataset {
    pub fn new(features: Matrix, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::input(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.rows()
            )));
        }
        if num_classes == 0 {
            return Err(Error::input("num_classes must be positive".to_string()));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::input(format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(LabeledDataset {
            features,
            labels,
            num_classes,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn features(&self) -> &Matrix {
        &self.features
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of samples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Sample indices grouped by class, each group in dataset order.
    pub fn indices_by_class(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_classes];
        for (i, &y) in self.labels.iter().enumerate() {
            groups[y].push(i);
        }
        groups
    }

    /// New dataset containing the listed rows, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::input(format!("index {bad} out of range")));
        }
        LabeledDataset::new(
            self.features.select_rows(indices),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.num_classes,
        )
    }
}

/// Unlabeled features plus ground-truth labels that are hidden from
/// training and exist only so evaluation can grade selections.
///
/// Training code must never read [`UnlabeledPool::hidden_labels`]; the
/// metrics module is its only intended consumer. The test suite verifies
/// the firewall behaviorally: permuting hidden labels must not change any
/// trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledPool {
    features: Matrix,
    hidden_labels: Vec<usize>,
    num_classes: usize,
}

impl UnlabeledPool {
    pub fn new(features: Matrix, hidden_labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if hidden_labels.len() != features.rows() {
            return Err(Error::input(format!(
                "{} hidden labels for {} feature rows",
                hidden_labels.len(),
                features.rows()
            )));
        }
        if let Some(&bad) = hidden_labels.iter().find(|&&y| y >= num_classes) {
            return Err(Error::input(format!(
                "hidden label {bad} out of range for {num_classes} classes"
            )));
        }
        Ok(UnlabeledPool {
            features,
            hidden_labels,
            num_classes,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.features.rows()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn features(&self) -> &Matrix {
        &self.features
    }

    /// Ground truth for evaluation only. Selection and training logic must
    /// not look at this.
    #[inline]
    pub fn hidden_labels(&self) -> &[usize] {
        &self.hidden_labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_labels() {
        let f = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(LabeledDataset::new(f, vec![0, 2], 2).is_err());
    }

    #[test]
    fn class_counts_and_groups_agree() {
        let f = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let ds = LabeledDataset::new(f, vec![1, 0, 1], 2).unwrap();
        assert_eq!(ds.class_counts(), vec![1, 2]);
        assert_eq!(ds.indices_by_class(), vec![vec![1], vec![0, 2]]);
    }
}
