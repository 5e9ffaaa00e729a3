//! Round-based classifier training on a base set plus per-round additions.
//!
//! Two objectives are supported, chosen by [`Weighting`]:
//!
//! - `PlainUnion` — the augmented set is an ordinary dataset; the loss is
//!   the mean cross-entropy over base and additions together. This is how
//!   the rule-based strategies consume their selections.
//! - `TwoTerm` — the selection objective proper,
//!   `F(w) = (1/n_base) sum_base L_i + (1/n_add) sum_add L_j`,
//!   giving the additions their own normalizer.
//!
//! Minibatches are drawn uniformly from the union. Weighting each sample
//! by `(N / b) * alpha_i` — where `alpha_i` is its term's normalizer and
//! `b` the batch size — makes the batch gradient an unbiased estimator of
//! the chosen objective; with no additions both modes reduce to the
//! familiar batch mean.

use crate::data::{minibatches, CarvedSplit, LabeledDataset};
use crate::error::{Error, Result};
use crate::nn::{
    cross_entropy_loss, one_hot, weighted_mean_loss, Matrix, MlpModel, Sgd, SgdConfig,
};
use crate::seed::{mix_seed, tag};

use super::{AugmentedTrainSet, SampleSource, SelectionDecision};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weighting {
    PlainUnion,
    TwoTerm,
}

pub(crate) struct RoundTrainer<'a> {
    split: &'a CarvedSplit,
    weighting: Weighting,
    sgd: Sgd,
    shuffle_seed: u64,
    global_epoch: u64,
}

impl<'a> RoundTrainer<'a> {
    pub(crate) fn new(
        split: &'a CarvedSplit,
        weighting: Weighting,
        sgd_config: &SgdConfig,
    ) -> Result<Self> {
        Ok(RoundTrainer {
            split,
            weighting,
            sgd: Sgd::new(*sgd_config)?,
            shuffle_seed: mix_seed(sgd_config.seed, tag::SHUFFLE),
            global_epoch: 0,
        })
    }

    /// Trains for `epochs` epochs on the augmented set and returns the
    /// configured objective evaluated after the last step.
    pub(crate) fn train_round(
        &mut self,
        classifier: &mut MlpModel,
        train_set: &AugmentedTrainSet<'_>,
        epochs: usize,
    ) -> Result<f64> {
        let base = train_set.base;
        let (add_features, add_labels) = self.resolve_additions(&train_set.additions)?;
        let n_base = train_set.n_base();
        let n_add = train_set.n_add();
        let n_total = n_base + n_add;
        let m = base.num_classes();
        let batch_size = self.sgd.config().batch_size;

        // Per-sample objective weights before the batch correction.
        let (alpha_base, alpha_add) = match self.weighting {
            Weighting::PlainUnion => {
                let alpha = 1.0 / n_total as f64;
                (alpha, alpha)
            }
            Weighting::TwoTerm => (1.0 / n_base as f64, 1.0 / n_add.max(1) as f64),
        };

        for _ in 0..epochs {
            let batches = minibatches(n_total, batch_size, self.shuffle_seed, self.global_epoch);
            self.global_epoch += 1;
            for batch in batches {
                let b = batch.len();
                let scale = n_total as f64 / b as f64;
                let mut x = Matrix::zeros(b, base.dim());
                let mut labels = Vec::with_capacity(b);
                let mut weights = Vec::with_capacity(b);
                for (row, &idx) in batch.iter().enumerate() {
                    if idx < n_base {
                        x.row_mut(row).copy_from_slice(base.features().row(idx));
                        labels.push(base.labels()[idx]);
                        weights.push(scale * alpha_base);
                    } else {
                        let k = idx - n_base;
                        x.row_mut(row).copy_from_slice(add_features.row(k));
                        labels.push(add_labels[k]);
                        weights.push(scale * alpha_add);
                    }
                }
                let cache = classifier.forward(&x)?;
                let grads =
                    classifier.backward_cross_entropy(&cache, &one_hot(&labels, m)?, &weights)?;
                self.sgd.step(classifier, &grads)?;
            }
        }
        self.objective(classifier, base, &add_features, &add_labels)
    }

    /// The configured objective over the full base set and additions.
    fn objective(
        &self,
        classifier: &MlpModel,
        base: &LabeledDataset,
        add_features: &Matrix,
        add_labels: &[usize],
    ) -> Result<f64> {
        let base_cache = classifier.forward(base.features())?;
        let base_losses = cross_entropy_loss(
            base_cache.output(),
            &one_hot(base.labels(), base.num_classes())?,
        )?;
        let add_losses = if add_labels.is_empty() {
            Vec::new()
        } else {
            let add_cache = classifier.forward(add_features)?;
            classifier.losses_for_labels(add_cache.output(), add_labels)?
        };
        match self.weighting {
            Weighting::PlainUnion => {
                let total: f64 =
                    base_losses.per_sample.iter().chain(&add_losses).sum();
                Ok(total / (base_losses.per_sample.len() + add_losses.len()) as f64)
            }
            Weighting::TwoTerm => {
                let add_term = if add_losses.is_empty() {
                    0.0
                } else {
                    weighted_mean_loss(&add_losses, &vec![1.0; add_losses.len()])?
                };
                Ok(base_losses.mean + add_term)
            }
        }
    }

    /// Materializes addition features and their assigned labels.
    fn resolve_additions(
        &self,
        additions: &[SelectionDecision],
    ) -> Result<(Matrix, Vec<usize>)> {
        let mut features = Matrix::zeros(additions.len(), self.split.labeled.dim());
        let mut labels = Vec::with_capacity(additions.len());
        for (k, d) in additions.iter().enumerate() {
            let row = match d.source {
                SampleSource::Labeled => {
                    if d.index >= self.split.labeled.len() {
                        return Err(Error::usage(format!(
                            "labeled addition index {} out of range",
                            d.index
                        )));
                    }
                    self.split.labeled.features().row(d.index)
                }
                SampleSource::Unlabeled => {
                    if d.index >= self.split.pool.len() {
                        return Err(Error::usage(format!(
                            "pool addition index {} out of range",
                            d.index
                        )));
                    }
                    self.split.pool.features().row(d.index)
                }
            };
            features.row_mut(k).copy_from_slice(row);
            labels.push(d.assigned_label);
        }
        Ok((features, labels))
    }
}
