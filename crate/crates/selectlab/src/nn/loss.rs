//! Classification losses.

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Floor applied to probabilities inside the log so a confidently wrong
/// prediction (probability numerically zero) yields a large finite loss
/// instead of infinity.
pub const PROB_FLOOR: f64 = 1e-12;

/// Per-sample losses plus their mean.
#[derive(Debug, Clone)]
pub struct LossBatch {
    pub per_sample: Vec<f64>,
    pub mean: f64,
}

/// Cross-entropy `-ln p(true class)` against one-hot labels.
pub fn cross_entropy_loss(probs: &Matrix, labels_one_hot: &Matrix) -> Result<LossBatch> {
    if probs.rows() != labels_one_hot.rows() || probs.cols() != labels_one_hot.cols() {
        return Err(Error::input(format!(
            "probs are {}x{} but labels are {}x{}",
            probs.rows(),
            probs.cols(),
            labels_one_hot.rows(),
            labels_one_hot.cols()
        )));
    }
    let mut per_sample = Vec::with_capacity(probs.rows());
    for r in 0..probs.rows() {
        let true_class = one_hot_index(labels_one_hot.row(r))
            .ok_or_else(|| Error::input(format!("label row {r} is not one-hot")))?;
        per_sample.push(-(probs.get(r, true_class).max(PROB_FLOOR)).ln());
    }
    let mean = if per_sample.is_empty() {
        0.0
    } else {
        per_sample.iter().sum::<f64>() / per_sample.len() as f64
    };
    Ok(LossBatch { per_sample, mean })
}

/// Weighted mean over the *selected* samples: `sum(w_i * l_i)` divided by
/// the number of strictly positive weights (or 1 if none are positive, so
/// an empty selection contributes zero loss).
pub fn weighted_mean_loss(per_sample_losses: &[f64], weights: &[f64]) -> Result<f64> {
    if per_sample_losses.len() != weights.len() {
        return Err(Error::input(format!(
            "{} losses but {} weights",
            per_sample_losses.len(),
            weights.len()
        )));
    }
    if let Some(&w) = weights.iter().find(|&&w| w < 0.0) {
        return Err(Error::input(format!("negative weight {w}")));
    }
    let selected = weights.iter().filter(|&&w| w > 0.0).count();
    let sum: f64 = per_sample_losses.iter().zip(weights).map(|(l, w)| l * w).sum();
    Ok(sum / selected.max(1) as f64)
}

/// One-hot encodes integer labels into an `n x num_classes` matrix.
pub fn one_hot(labels: &[usize], num_classes: usize) -> Result<Matrix> {
    let mut m = Matrix::zeros(labels.len(), num_classes);
    for (r, &y) in labels.iter().enumerate() {
        if y >= num_classes {
            return Err(Error::input(format!(
                "label {y} out of range for {num_classes} classes"
            )));
        }
        m.set(r, y, 1.0);
    }
    Ok(m)
}

/// Index of the single 1.0 in a one-hot row; `None` if the row is not
/// exactly one-hot.
fn one_hot_index(row: &[f64]) -> Option<usize> {
    let mut hot = None;
    for (i, &v) in row.iter().enumerate() {
        if v == 1.0 {
            if hot.is_some() {
                return None;
            }
            hot = Some(i);
        } else if v != 0.0 {
            return None;
        }
    }
    hot
}
