//! The SelectNet method: a learned selector decides, round by round, which
//! confidently-minor-predicted samples join the training set.
//!
//! One round of the alternating loop:
//!
//! 1. build the candidate set — every labeled and pool sample whose top-1
//!    prediction is a minor class, featurized as `(class probs, loss)`;
//! 2. train the selector on the candidates (scores of low-loss candidates
//!    rise, high-loss candidates fall);
//! 3. threshold the scores at `beta` to pick the round's additions;
//! 4. train the classifier on the labeled data plus the additions.
//!
//! The classifier warm-starts by training on an oversampled, balanced copy
//! of the labeled data before the first round.

mod candidates;
mod selector;

pub use candidates::{build_candidates, feature_matrix, Candidate, SelectionFeature};
pub use selector::{
    selector_objective, threshold_select, train_selector, SelectorNet, SelectorTrainReport,
};

use serde::{Deserialize, Serialize};

use crate::data::{oversample_to_balance, CarvedSplit, LabeledDataset};
use crate::error::{Error, Result};
use crate::metrics;
use crate::nn::{MlpModel, SgdConfig};
use crate::report::{LoggedSelection, RoundReport};
use crate::seed::{mix_seed, tag};
use crate::strategies::{
    count_selections, AugmentedTrainSet, RoundTrainer, SelectionDecision, Weighting,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectNetConfig {
    /// Loss pivot in the selector objective.
    pub lambda: f64,
    /// Score threshold for hard selection.
    pub beta: f64,
    /// Selector gradient steps per round.
    pub selector_steps: usize,
    pub selector_lr: f64,
    /// Classifier epochs between selection rebuilds.
    pub round_epochs: usize,
    pub rounds: usize,
    /// Warm-up epochs on the oversampled labeled data before round 0.
    pub init_epochs: usize,
    /// Re-initialize the selector each round instead of warm-starting it.
    pub reinit_selector: bool,
}

impl Default for SelectNetConfig {
    fn default() -> Self {
        SelectNetConfig {
            lambda: 0.6,
            beta: 0.6,
            // 400 full-batch steps at 0.1 reliably separate low-loss from
            // high-loss candidates across seeds; gentler schedules leave
            // the scores straddling beta after early rounds.
            selector_steps: 400,
            selector_lr: 0.1,
            round_epochs: 10,
            rounds: 20,
            init_epochs: 10,
            reinit_selector: false,
        }
    }
}

impl SelectNetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 || self.lambda.is_nan() {
            return Err(Error::config(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.beta <= 0.0 || self.beta >= 1.0 || self.beta.is_nan() {
            return Err(Error::config(format!("beta must be in (0, 1), got {}", self.beta)));
        }
        if self.selector_lr <= 0.0 || self.selector_lr.is_nan() {
            return Err(Error::config(format!(
                "selector learning rate must be positive, got {}",
                self.selector_lr
            )));
        }
        if self.round_epochs == 0 || self.rounds == 0 {
            return Err(Error::config("rounds and round_epochs must be positive".to_string()));
        }
        Ok(())
    }
}

/// Runs the full alternating loop, training `classifier` in place, and
/// returns one report per round.
pub fn run_selectnet(
    split: &CarvedSplit,
    test: &LabeledDataset,
    classifier: &mut MlpModel,
    sgd_config: &SgdConfig,
    config: &SelectNetConfig,
) -> Result<Vec<RoundReport>> {
    config.validate()?;
    sgd_config.validate()?;
    let num_classes = split.labeled.num_classes();
    if classifier.output_dim() != num_classes {
        return Err(Error::config(format!(
            "classifier has {} outputs but the data has {num_classes} classes",
            classifier.output_dim()
        )));
    }
    let minors = split.spec.minor_classes();

    // The alternating loop trains on the two-term objective: base mean
    // plus separately-normalized additions mean.
    let mut trainer = RoundTrainer::new(split, Weighting::TwoTerm, sgd_config)?;

    // Warm start on an oversampled, balanced copy of the labeled data.
    let oversampled =
        oversample_to_balance(&split.labeled, mix_seed(sgd_config.seed, tag::OVERSAMPLE))?;
    if config.init_epochs > 0 {
        let warmup = AugmentedTrainSet {
            base: &oversampled,
            additions: Vec::new(),
        };
        trainer.train_round(classifier, &warmup, config.init_epochs)?;
    }

    let selector_seed = mix_seed(sgd_config.seed, tag::SELECTOR_INIT);
    let mut selector = SelectorNet::new(num_classes, selector_seed)?;

    let mut reports = Vec::with_capacity(config.rounds);
    for round in 0..config.rounds {
        let candidates = build_candidates(classifier, &split.labeled, &split.pool, minors)?;
        let mut selector_objectives = None;
        let decisions: Vec<SelectionDecision> = if candidates.is_empty() {
            Vec::new()
        } else {
            if config.reinit_selector {
                selector = SelectorNet::new(num_classes, mix_seed(selector_seed, round as u64 + 1))?;
            }
            let trained = train_selector(
                &mut selector,
                &candidates,
                config.lambda,
                config.selector_steps,
                config.selector_lr,
            )?;
            selector_objectives = Some((trained.objective_start, trained.objective_end));
            threshold_select(&selector, &candidates, config.beta)?
        };

        // Candidates are in canonical (source, index) order and the
        // thresholded decisions preserve it, so one merge walk aligns
        // each decision with the candidate it came from.
        let mut cursor = candidates.iter();
        let selections: Vec<LoggedSelection> = decisions
            .iter()
            .map(|d| {
                let candidate = cursor
                    .by_ref()
                    .find(|c| c.source == d.source && c.index == d.index)
                    .expect("decisions are a subset of candidates");
                LoggedSelection {
                    decision: *d,
                    predicted: candidate.predicted,
                }
            })
            .collect();

        let counts = count_selections(split, &selections)?;
        let train_set = AugmentedTrainSet {
            base: &split.labeled,
            additions: decisions,
        };
        let objective = trainer.train_round(classifier, &train_set, config.round_epochs)?;
        reports.push(RoundReport {
            round,
            epochs_completed: (round + 1) * config.round_epochs,
            train_objective: objective,
            candidate_count: candidates.len(),
            selections,
            counts,
            test_metrics: metrics::evaluate(classifier, test)?,
            selector_objective: selector_objectives,
        });
    }
    Ok(reports)
}
