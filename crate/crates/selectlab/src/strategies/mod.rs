//! Baseline training strategies behind one round-based interface:
//! imbalanced training, oversampling, self-paced selection, and the
//! context-data method.

mod select;
mod trainer;

use serde::{Deserialize, Serialize};

pub use select::{context_data_select, self_paced_select};
pub(crate) use trainer::{RoundTrainer, Weighting};

use crate::data::{oversample_to_balance, CarvedSplit, LabeledDataset};
use crate::error::{Error, Result};
use crate::metrics;
use crate::nn::{MlpModel, SgdConfig};
use crate::report::{LoggedSelection, RoundReport};
use crate::seed::{mix_seed, tag};

/// Where a selected sample lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SampleSource {
    Labeled,
    Unlabeled,
}

/// One sample admitted into the augmented training set.
///
/// Label discipline: a `Labeled` decision always carries the sample's true
/// label; an `Unlabeled` decision always carries the classifier's top-1
/// prediction (its pseudo-label).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionDecision {
    pub source: SampleSource,
    pub index: usize,
    pub assigned_label: usize,
    pub weight: f64,
}

/// Shared round schedule and self-paced threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Loss threshold for the selection rules.
    pub lambda: f64,
    /// Classifier epochs between selection rebuilds.
    pub round_epochs: usize,
    /// Number of selection rounds; total epochs = `rounds * round_epochs`.
    pub rounds: usize,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            lambda: 0.6,
            round_epochs: 10,
            rounds: 20,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 || self.lambda.is_nan() {
            return Err(Error::config(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.round_epochs == 0 || self.rounds == 0 {
            return Err(Error::config("rounds and round_epochs must be positive".to_string()));
        }
        Ok(())
    }

    pub fn total_epochs(&self) -> usize {
        self.rounds * self.round_epochs
    }
}

/// The training set of one round: the base labeled data plus this round's
/// additions. Additions are rebuilt from scratch every round, never
/// accumulated.
#[derive(Debug, Clone)]
pub struct AugmentedTrainSet<'a> {
    pub base: &'a LabeledDataset,
    pub additions: Vec<SelectionDecision>,
}

impl AugmentedTrainSet<'_> {
    pub fn n_base(&self) -> usize {
        self.base.len()
    }

    pub fn n_add(&self) -> usize {
        self.additions.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Train on the labeled data exactly as it is.
    Imbalanced,
    /// Train on an oversampled, class-balanced copy of the labeled data.
    Oversample,
    /// Every round, pseudo-label pool samples confidently predicted as a
    /// minor class and add them.
    SelfPaced,
    /// Self-paced plus labeled samples predicted as a minor class, re-added
    /// with their true labels.
    Context,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Imbalanced => "imbalanced",
            BaselineKind::Oversample => "oversample",
            BaselineKind::SelfPaced => "self_paced",
            BaselineKind::Context => "context",
        }
    }
}

/// Runs one baseline strategy for `rounds * round_epochs` epochs, training
/// `classifier` in place and reporting per-round test metrics and
/// selection counts.
pub fn run_baseline(
    kind: BaselineKind,
    split: &CarvedSplit,
    test: &LabeledDataset,
    classifier: &mut MlpModel,
    sgd_config: &SgdConfig,
    config: &StrategyConfig,
) -> Result<Vec<RoundReport>> {
    config.validate()?;
    sgd_config.validate()?;
    let minors = split.spec.minor_classes();
    if classifier.output_dim() != split.labeled.num_classes() {
        return Err(Error::config(format!(
            "classifier has {} outputs but the data has {} classes",
            classifier.output_dim(),
            split.labeled.num_classes()
        )));
    }

    let oversampled;
    let base: &LabeledDataset = match kind {
        BaselineKind::Oversample => {
            oversampled =
                oversample_to_balance(&split.labeled, mix_seed(sgd_config.seed, tag::OVERSAMPLE))?;
            &oversampled
        }
        _ => &split.labeled,
    };

    // Rule-based strategies treat the augmented set as one plain dataset.
    let mut trainer = RoundTrainer::new(split, Weighting::PlainUnion, sgd_config)?;
    let mut reports = Vec::with_capacity(config.rounds);
    for round in 0..config.rounds {
        let selections: Vec<LoggedSelection> = match kind {
            BaselineKind::Imbalanced | BaselineKind::Oversample => Vec::new(),
            BaselineKind::SelfPaced => {
                let pool_preds = classifier.predict(split.pool.features())?;
                self_paced_select(classifier, &split.pool, minors, config.lambda)?
                    .into_iter()
                    .map(|decision| LoggedSelection {
                        predicted: pool_preds[decision.index],
                        decision,
                    })
                    .collect()
            }
            BaselineKind::Context => {
                let labeled_preds = classifier.predict(split.labeled.features())?;
                let pool_preds = classifier.predict(split.pool.features())?;
                let mut decisions =
                    context_data_select(classifier, &split.labeled, minors, config.lambda)?;
                decisions.extend(self_paced_select(
                    classifier,
                    &split.pool,
                    minors,
                    config.lambda,
                )?);
                decisions.sort_by_key(|d| (d.source, d.index));
                decisions
                    .into_iter()
                    .map(|decision| LoggedSelection {
                        predicted: match decision.source {
                            SampleSource::Labeled => labeled_preds[decision.index],
                            SampleSource::Unlabeled => pool_preds[decision.index],
                        },
                        decision,
                    })
                    .collect()
            }
        };

        let train_set = AugmentedTrainSet {
            base,
            additions: selections.iter().map(|s| s.decision).collect(),
        };
        let counts = count_selections(split, &selections)?;
        let objective = trainer.train_round(classifier, &train_set, config.round_epochs)?;
        reports.push(RoundReport {
            round,
            epochs_completed: (round + 1) * config.round_epochs,
            train_objective: objective,
            candidate_count: train_set.n_add(),
            selections,
            counts,
            test_metrics: metrics::evaluate(classifier, test)?,
            selector_objective: None,
        });
    }
    Ok(reports)
}

/// Grades a round's selections against ground truth via the metrics
/// module, using the predictions captured at selection time.
pub(crate) fn count_selections(
    split: &CarvedSplit,
    selections: &[LoggedSelection],
) -> Result<metrics::SelectionCounts> {
    let decisions: Vec<SelectionDecision> = selections.iter().map(|s| s.decision).collect();
    let predictions: Vec<usize> = selections.iter().map(|s| s.predicted).collect();
    metrics::selection_counts(&decisions, &predictions, &split.labeled, &split.pool)
}
