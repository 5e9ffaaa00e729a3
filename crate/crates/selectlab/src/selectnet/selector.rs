//! The selection network and its training objective.
//!
//! The selector scores each candidate in (0, 1). Training minimizes the
//! mean of `score(z_i) * (loss_i - lambda)` over the candidate set: a
//! candidate whose loss is below the pivot pulls its score up, one above
//! pushes it down. Hard selection afterwards keeps candidates whose score
//! strictly exceeds `beta`.

use crate::error::{Error, Result};
use crate::nn::{Activation, Matrix, MlpModel, Sgd, SgdConfig};
use crate::strategies::SelectionDecision;

use super::candidates::{feature_matrix, Candidate};

/// Width of the two hidden layers.
const HIDDEN: [usize; 2] = [8, 4];

/// A small sigmoid-output MLP over `(class probabilities, loss)` inputs.
#[derive(Debug, Clone)]
pub struct SelectorNet {
    net: MlpModel,
    num_classes: usize,
}

impl SelectorNet {
    pub fn new(num_classes: usize, seed: u64) -> Result<Self> {
        let net = MlpModel::new(
            num_classes + 1,
            &[
                (HIDDEN[0], Activation::Relu),
                (HIDDEN[1], Activation::Relu),
                (1, Activation::Sigmoid),
            ],
            seed,
        )?;
        Ok(SelectorNet { net, num_classes })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn net(&self) -> &MlpModel {
        &self.net
    }

    /// Scores in (0, 1), one per candidate, in candidate order.
    pub fn scores(&self, candidates: &[Candidate]) -> Result<Vec<f64>> {
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        let x = feature_matrix(candidates)?;
        self.check_width(x.cols())?;
        let cache = self.net.forward(&x)?;
        Ok(cache.output().data().to_vec())
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.num_classes + 1 {
            return Err(Error::config(format!(
                "candidate features have width {width}, selector expects {}",
                self.num_classes + 1
            )));
        }
        Ok(())
    }
}

/// Mean of `score(z_i) * (loss_i - lambda)` over the candidate set.
pub fn selector_objective(
    selector: &SelectorNet,
    candidates: &[Candidate],
    lambda: f64,
) -> Result<f64> {
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let scores = selector.scores(candidates)?;
    let n = candidates.len() as f64;
    Ok(scores
        .iter()
        .zip(candidates)
        .map(|(s, c)| s * (c.feature.loss - lambda))
        .sum::<f64>()
        / n)
}

/// Objective values measured before and after training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorTrainReport {
    pub objective_start: f64,
    pub objective_end: f64,
    pub steps: usize,
}

/// Runs `steps` full-batch gradient-descent steps on the selector
/// objective. A no-op on an empty candidate set.
pub fn train_selector(
    selector: &mut SelectorNet,
    candidates: &[Candidate],
    lambda: f64,
    steps: usize,
    learning_rate: f64,
) -> Result<SelectorTrainReport> {
    if candidates.is_empty() {
        return Ok(SelectorTrainReport {
            objective_start: 0.0,
            objective_end: 0.0,
            steps: 0,
        });
    }
    let x = feature_matrix(candidates)?;
    selector.check_width(x.cols())?;
    let n = candidates.len() as f64;
    // d(objective)/d(score_i) is constant: (loss_i - lambda) / n.
    let d_output = Matrix::from_vec(
        candidates.len(),
        1,
        candidates.iter().map(|c| (c.feature.loss - lambda) / n).collect(),
    )?;
    let objective_start = selector_objective(selector, candidates, lambda)?;
    let mut sgd = Sgd::new(SgdConfig {
        learning_rate,
        momentum: 0.0,
        batch_size: candidates.len(),
        seed: 0,
    })?;
    for _ in 0..steps {
        let cache = selector.net.forward(&x)?;
        let grads = selector.net.backward(&cache, &d_output)?;
        sgd.step(&mut selector.net, &grads)?;
    }
    Ok(SelectorTrainReport {
        objective_start,
        objective_end: selector_objective(selector, candidates, lambda)?,
        steps,
    })
}

/// Hard selection: keep candidates whose score strictly exceeds `beta`.
pub fn threshold_select(
    selector: &SelectorNet,
    candidates: &[Candidate],
    beta: f64,
) -> Result<Vec<SelectionDecision>> {
    let scores = selector.scores(candidates)?;
    Ok(candidates
        .iter()
        .zip(&scores)
        .filter(|(_, &s)| s > beta)
        .map(|(c, _)| SelectionDecision {
            source: c.source,
            index: c.index,
            assigned_label: c.assigned_label,
            weight: 1.0,
        })
        .collect())
}
