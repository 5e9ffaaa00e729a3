//! Candidate construction for the selection network.
//!
//! A candidate is any sample — labeled or pool — whose current top-1
//! prediction is a minor class. Each carries the selector input
//! `z = (class probabilities, loss)`: the loss uses the sample's true
//! label when it is labeled and the pseudo-label when it comes from the
//! pool.

use std::collections::BTreeSet;

use crate::data::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::nn::{argmax, Matrix, MlpModel, PROB_FLOOR};
use crate::strategies::SampleSource;

/// Selector input: the classifier's output distribution plus the sample's
/// classification loss. Flattens to a vector of length `num_classes + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionFeature {
    pub class_probs: Vec<f64>,
    pub loss: f64,
}

impl SelectionFeature {
    pub fn new(class_probs: Vec<f64>, loss: f64) -> Result<Self> {
        let sum: f64 = class_probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::input(format!(
                "class probabilities sum to {sum}, expected 1"
            )));
        }
        if loss < 0.0 || loss.is_nan() {
            return Err(Error::input(format!("loss must be non-negative, got {loss}")));
        }
        Ok(SelectionFeature { class_probs, loss })
    }

    pub fn dim(&self) -> usize {
        self.class_probs.len() + 1
    }

    pub fn write_into(&self, row: &mut [f64]) {
        let (probs, loss) = row.split_at_mut(self.class_probs.len());
        probs.copy_from_slice(&self.class_probs);
        loss[0] = self.loss;
    }
}

/// A sample the selector may admit this round.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub source: SampleSource,
    pub index: usize,
    /// Top-1 prediction (a minor class by construction).
    pub predicted: usize,
    /// Label the sample would carry into training: true label for labeled
    /// candidates, the pseudo-label for pool candidates.
    pub assigned_label: usize,
    pub feature: SelectionFeature,
}

/// Builds the round's candidate set from both data sources, in canonical
/// order (labeled first, then pool, each by ascending index).
pub fn build_candidates(
    classifier: &MlpModel,
    labeled: &LabeledDataset,
    pool: &UnlabeledPool,
    minors: &BTreeSet<usize>,
) -> Result<Vec<Candidate>> {
    let mut candidates = Vec::new();
    if !labeled.is_empty() {
        let cache = classifier.forward(labeled.features())?;
        collect(
            cache.output(),
            minors,
            SampleSource::Labeled,
            Some(labeled.labels()),
            &mut candidates,
        )?;
    }
    if !pool.is_empty() {
        let cache = classifier.forward(pool.features())?;
        collect(cache.output(), minors, SampleSource::Unlabeled, None, &mut candidates)?;
    }
    Ok(candidates)
}

fn collect(
    probs: &Matrix,
    minors: &BTreeSet<usize>,
    source: SampleSource,
    true_labels: Option<&[usize]>,
    out: &mut Vec<Candidate>,
) -> Result<()> {
    for r in 0..probs.rows() {
        let row = probs.row(r);
        let predicted = argmax(row);
        if !minors.contains(&predicted) {
            continue;
        }
        // Loss against the label the sample will train with.
        let (assigned_label, loss_label) = match true_labels {
            Some(labels) => (labels[r], labels[r]),
            None => (predicted, predicted),
        };
        let loss = -(row[loss_label].max(PROB_FLOOR)).ln();
        out.push(Candidate {
            source,
            index: r,
            predicted,
            assigned_label,
            feature: SelectionFeature::new(row.to_vec(), loss)?,
        });
    }
    Ok(())
}

/// Stacks candidate features into an `n x (m + 1)` matrix.
pub fn feature_matrix(candidates: &[Candidate]) -> Result<Matrix> {
    let Some(first) = candidates.first() else {
        return Ok(Matrix::zeros(0, 0));
    };
    let dim = first.feature.dim();
    let mut x = Matrix::zeros(candidates.len(), dim);
    for (r, c) in candidates.iter().enumerate() {
        if c.feature.dim() != dim {
            return Err(Error::usage("candidates have inconsistent feature widths".to_string()));
        }
        c.feature.write_into(x.row_mut(r));
    }
    Ok(x)
}
