//! Per-round training records shared by all strategies.

use serde::{Deserialize, Serialize};

use crate::metrics::{PerClassMetrics, SelectionCounts};
use crate::strategies::SelectionDecision;

/// A selection decision together with the classifier's top-1 prediction
/// for that sample at selection time, kept for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoggedSelection {
    pub decision: SelectionDecision,
    pub predicted: usize,
}

/// What one round produced: the selections that went into its training
/// set, how they grade against ground truth, and test metrics afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    /// Cumulative classifier epochs at the end of this round (warm-up
    /// epochs excluded).
    pub epochs_completed: usize,
    /// Two-term training objective evaluated after the round.
    pub train_objective: f64,
    /// Size of the candidate set the round selected from (equals the
    /// selection count for the rule-based strategies).
    pub candidate_count: usize,
    pub selections: Vec<LoggedSelection>,
    pub counts: SelectionCounts,
    pub test_metrics: PerClassMetrics,
    /// Selector objective (start, end) for rounds that trained a selector.
    pub selector_objective: Option<(f64, f64)>,
}
