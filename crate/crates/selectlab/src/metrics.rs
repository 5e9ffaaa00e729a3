//! Evaluation: confusion matrices, per-class precision/recall/F1, and
//! selection-count categories.
//!
//! This module is the only consumer of the pool's hidden ground truth. It
//! grades what training produced; it never feeds anything back into it.

use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::nn::MlpModel;
use crate::strategies::{SampleSource, SelectionDecision};

/// `counts[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    num_classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    #[inline]
    pub fn get(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.num_classes + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sum(&self, true_class: usize) -> u64 {
        (0..self.num_classes).map(|p| self.get(true_class, p)).sum()
    }

    pub fn col_sum(&self, predicted: usize) -> u64 {
        (0..self.num_classes).map(|t| self.get(t, predicted)).sum()
    }
}

pub fn confusion(
    true_labels: &[usize],
    predicted_labels: &[usize],
    num_classes: usize,
) -> Result<ConfusionMatrix> {
    if true_labels.len() != predicted_labels.len() {
        return Err(Error::input(format!(
            "{} true labels vs {} predictions",
            true_labels.len(),
            predicted_labels.len()
        )));
    }
    let mut counts = vec![0u64; num_classes * num_classes];
    for (&t, &p) in true_labels.iter().zip(predicted_labels) {
        if t >= num_classes || p >= num_classes {
            return Err(Error::input(format!(
                "label pair ({t}, {p}) out of range for {num_classes} classes"
            )));
        }
        counts[t * num_classes + p] += 1;
    }
    Ok(ConfusionMatrix {
        num_classes,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassMetrics {
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
}

impl PerClassMetrics {
    /// Mean recall over a set of classes (e.g. the minor classes).
    pub fn mean_recall(&self, classes: &[usize]) -> f64 {
        if classes.is_empty() {
            return 0.0;
        }
        classes.iter().map(|&c| self.classes[c].recall).sum::<f64>() / classes.len() as f64
    }
}

/// Precision, recall, and F1 per class. Zero denominators yield 0 rather
/// than NaN: a class nobody predicts has precision 0, a class with no
/// samples has recall 0.
pub fn per_class_metrics(cm: &ConfusionMatrix) -> PerClassMetrics {
    let m = cm.num_classes();
    let mut classes = Vec::with_capacity(m);
    let mut correct = 0u64;
    for c in 0..m {
        let tp = cm.get(c, c);
        correct += tp;
        let predicted = cm.col_sum(c);
        let actual = cm.row_sum(c);
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        classes.push(ClassMetrics {
            precision,
            recall,
            f1,
            support: actual,
        });
    }
    let total = cm.total();
    PerClassMetrics {
        classes,
        accuracy: ratio(correct, total),
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Predicts on a labeled evaluation set and summarizes.
pub fn evaluate(model: &MlpModel, eval_set: &LabeledDataset) -> Result<PerClassMetrics> {
    let predictions = model.predict(eval_set.features())?;
    let cm = confusion(eval_set.labels(), &predictions, eval_set.num_classes())?;
    Ok(per_class_metrics(&cm))
}

/// The four selection categories: labeled/unlabeled crossed with whether
/// the classifier's view of the sample matched ground truth.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionCounts {
    /// Labeled samples selected while wrongly predicted.
    pub labeled_confused: u64,
    /// Labeled samples correctly predicted as a minor class.
    pub labeled_minor: u64,
    /// Pool samples whose pseudo-label disagrees with hidden ground truth.
    pub unlabeled_confused: u64,
    /// Pool samples whose minor pseudo-label is correct.
    pub unlabeled_minor: u64,
}

impl SelectionCounts {
    pub fn total(&self) -> u64 {
        self.labeled_confused + self.labeled_minor + self.unlabeled_confused + self.unlabeled_minor
    }
}

/// Buckets each decision into exactly one of the four categories.
///
/// `predictions[k]` is the classifier's top-1 prediction for decision `k`
/// *at selection time*; the counts grade those predictions against the
/// labeled ground truth or the pool's hidden labels.
pub fn selection_counts(
    decisions: &[SelectionDecision],
    predictions: &[usize],
    labeled: &LabeledDataset,
    pool: &UnlabeledPool,
) -> Result<SelectionCounts> {
    if decisions.len() != predictions.len() {
        return Err(Error::usage(format!(
            "{} decisions but {} predictions",
            decisions.len(),
            predictions.len()
        )));
    }
    let mut counts = SelectionCounts::default();
    for (d, &pred) in decisions.iter().zip(predictions) {
        match d.source {
            SampleSource::Labeled => {
                let Some(&truth) = labeled.labels().get(d.index) else {
                    return Err(Error::usage(format!(
                        "labeled decision index {} cannot be resolved",
                        d.index
                    )));
                };
                if pred == truth {
                    counts.labeled_minor += 1;
                } else {
                    counts.labeled_confused += 1;
                }
            }
            SampleSource::Unlabeled => {
                let Some(&hidden) = pool.hidden_labels().get(d.index) else {
                    return Err(Error::usage(format!(
                        "pool decision index {} cannot be resolved",
                        d.index
                    )));
                };
                if pred == hidden {
                    counts.unlabeled_minor += 1;
                } else {
                    counts.unlabeled_confused += 1;
                }
            }
        }
    }
    Ok(counts)
}
