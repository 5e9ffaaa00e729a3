//! Cross-strategy aggregation: medians over seeds, minor-class flags, and
//! best-per-column markers.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

use super::experiment::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub strategy: String,
    pub seeds: usize,
    /// Median over seeds of final-round overall test accuracy.
    pub median_overall_accuracy: f64,
    /// Median over seeds of the mean recall across minor classes.
    pub median_minor_recall: f64,
    /// Median over seeds of final-round recall, per class.
    pub median_recall_per_class: Vec<f64>,
    /// True where the column's class is a minor class.
    pub minor_class_flags: Vec<bool>,
    /// Best-per-column markers across strategies.
    pub best_overall: bool,
    pub best_recall_per_class: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub num_classes: usize,
    pub minor_classes: Vec<usize>,
    pub rows: Vec<SummaryRow>,
}

/// Final-round numbers for one run; the unit the aggregation works on.
#[derive(Debug, Clone)]
struct FinalRow {
    strategy: String,
    accuracy: f64,
    recall: Vec<f64>,
}

/// Median with the even-count convention of averaging the middle pair.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN metrics"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn summarize_records(records: &[RunRecord], minor_classes: &[usize]) -> Result<Summary> {
    let rows: Vec<FinalRow> = records
        .iter()
        .map(|r| {
            let metrics = r.final_metrics();
            FinalRow {
                strategy: r.strategy.name().to_string(),
                accuracy: metrics.accuracy,
                recall: metrics.classes.iter().map(|c| c.recall).collect(),
            }
        })
        .collect();
    aggregate(&rows, minor_classes)
}

/// Rebuilds a summary from the files `run` wrote into `dir`, using
/// `experiment.txt` for the experiment shape and the final row of each
/// `metrics_*.csv` for the numbers.
pub fn summarize_dir(dir: impl AsRef<Path>) -> Result<Summary> {
    let dir = dir.as_ref();
    let config = super::config::parse_config_file(dir.join("experiment.txt"))?;
    let mut rows = Vec::new();
    for &strategy in &config.strategies {
        for &seed in &config.seeds {
            let path = dir.join(super::experiment::metrics_file_name(strategy, seed));
            let row = read_final_metrics_row(&path)?;
            rows.push(FinalRow {
                strategy: strategy.name().to_string(),
                accuracy: row.0,
                recall: row.1,
            });
        }
    }
    aggregate(&rows, &config.minor_classes)
}

fn read_final_metrics_row(path: &Path) -> Result<(f64, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(&display, 1, "empty metrics file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let (line_no, last) = lines
        .last()
        .ok_or_else(|| Error::parse(&display, 1, "metrics file has no data rows"))?;
    let fields: Vec<&str> = last.split(',').collect();
    if fields.len() != columns.len() {
        return Err(Error::parse(&display, line_no + 1, "row width differs from header"));
    }
    let value = |name: &str| -> Result<f64> {
        let at = columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::parse(&display, 1, format!("missing column {name}")))?;
        fields[at]
            .parse()
            .map_err(|_| Error::parse(&display, line_no + 1, format!("bad value in column {name}")))
    };
    let accuracy = value("overall_acc")?;
    let num_classes = columns.iter().filter(|c| c.starts_with("recall_")).count();
    let recall = (0..num_classes)
        .map(|c| value(&format!("recall_{c}")))
        .collect::<Result<Vec<f64>>>()?;
    Ok((accuracy, recall))
}

fn aggregate(rows: &[FinalRow], minor_classes: &[usize]) -> Result<Summary> {
    let Some(first) = rows.first() else {
        return Err(Error::input("no runs to summarize".to_string()));
    };
    let num_classes = first.recall.len();
    let minor_flags: Vec<bool> = (0..num_classes).map(|c| minor_classes.contains(&c)).collect();

    // Group by strategy, preserving first-seen order.
    let mut names: Vec<&str> = Vec::new();
    for row in rows {
        if !names.contains(&row.strategy.as_str()) {
            names.push(&row.strategy);
        }
    }

    let mut out = Vec::with_capacity(names.len());
    for name in &names {
        let group: Vec<&FinalRow> = rows.iter().filter(|r| r.strategy == *name).collect();
        let accs: Vec<f64> = group.iter().map(|r| r.accuracy).collect();
        let minor_means: Vec<f64> = group
            .iter()
            .map(|r| {
                minor_classes.iter().map(|&c| r.recall[c]).sum::<f64>()
                    / minor_classes.len().max(1) as f64
            })
            .collect();
        let recall_medians: Vec<f64> = (0..num_classes)
            .map(|c| median(&group.iter().map(|r| r.recall[c]).collect::<Vec<f64>>()))
            .collect();
        out.push(SummaryRow {
            strategy: name.to_string(),
            seeds: group.len(),
            median_overall_accuracy: median(&accs),
            median_minor_recall: median(&minor_means),
            median_recall_per_class: recall_medians,
            minor_class_flags: minor_flags.clone(),
            best_overall: false,
            best_recall_per_class: vec![false; num_classes],
        });
    }

    // Mark the best per column (ties mark every winner).
    let best_acc = out
        .iter()
        .map(|r| r.median_overall_accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    for row in &mut out {
        row.best_overall = row.median_overall_accuracy == best_acc;
    }
    for c in 0..num_classes {
        let best = out
            .iter()
            .map(|r| r.median_recall_per_class[c])
            .fold(f64::NEG_INFINITY, f64::max);
        for row in &mut out {
            row.best_recall_per_class[c] = row.median_recall_per_class[c] == best;
        }
    }

    Ok(Summary {
        num_classes,
        minor_classes: minor_classes.to_vec(),
        rows: out,
    })
}

pub fn write_summary(summary: &Summary, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(summary)
        .map_err(|e| Error::usage(format!("summary serialization failed: {e}")))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

/// Plain-text table for terminal output.
pub fn render_summary(summary: &Summary) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>8} {:>12} {:>13}",
        "strategy", "seeds", "overall_acc", "minor_recall"
    ));
    out.push('\n');
    for row in &summary.rows {
        let marker = if row.best_overall { "*" } else { " " };
        out.push_str(&format!(
            "{:<12} {:>8} {:>11.4}{} {:>13.4}",
            row.strategy, row.seeds, row.median_overall_accuracy, marker, row.median_minor_recall
        ));
        out.push('\n');
    }
    out
}
