//! Seeded multi-strategy experiment runs and their file outputs.
//!
//! For one experiment seed, every strategy sees the *same* generated data,
//! the same test split, the same carved labeled/pool pair, and the same
//! classifier initialization, so strategy comparisons isolate the training
//! strategy itself.
//!
//! Outputs per `(strategy, seed)` run, under the output directory:
//!
//! - `metrics_<strategy>_<seed>.csv` — one row per round: overall accuracy
//!   and per-class precision/recall/F1 on the held-out test set;
//! - `selections_<strategy>_<seed>.csv` — one row per round: the four
//!   selection-count categories and the total additions.
//!
//! Plus `experiment.txt` (the effective config) and `summary.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::{
    carve_imbalance, generate_gaussian_blobs, load_dataset, CarvedSplit, ImbalanceSpec,
    LabeledDataset,
};
use crate::error::{Error, Result};
use crate::metrics::PerClassMetrics;
use crate::nn::{MlpModel, SgdConfig};
use crate::report::RoundReport;
use crate::seed::{mix_seed, tag};
use crate::selectnet::run_selectnet;
use crate::strategies::run_baseline;

use super::config::{DatasetSpec, ExperimentConfig, StrategyKind};
use super::summary::{summarize_records, write_summary, Summary};
use super::held_out_test_split;

/// One `(strategy, seed)` run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub rounds: Vec<RoundReport>,
}

impl RunRecord {
    pub fn final_metrics(&self) -> &PerClassMetrics {
        &self.rounds.last().expect("at least one round").test_metrics
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Summary,
}

/// Runs every `(strategy, seed)` pair and writes all output files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    fs::write(config.out_dir.join("experiment.txt"), config.to_config_text())?;

    let mut records = Vec::with_capacity(config.seeds.len() * config.strategies.len());
    for &seed in &config.seeds {
        let (split, test) = prepare_data(config, seed)?;
        for &strategy in &config.strategies {
            let record = run_one(config, &split, &test, strategy, seed)?;
            write_metrics_csv(&record, &config.out_dir)?;
            write_selections_csv(&record, &config.out_dir)?;
            records.push(record);
        }
    }

    let summary = summarize_records(&records, &config.minor_classes)?;
    write_summary(&summary, &config.out_dir.join("summary.json"))?;
    Ok(ExperimentOutcome { records, summary })
}

/// Builds the shared data artifacts for one experiment seed.
pub fn prepare_data(
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(CarvedSplit, LabeledDataset)> {
    let source = match &config.dataset {
        DatasetSpec::Blobs {
            classes,
            per_class,
            dim,
            separation,
        } => generate_gaussian_blobs(
            *classes,
            *per_class,
            *dim,
            *separation,
            mix_seed(seed, tag::DATA),
        )?,
        DatasetSpec::File { path, format } => load_dataset(path, *format)?,
    };
    if let Some(&bad) = config.minor_classes.iter().find(|&&c| c >= source.num_classes()) {
        return Err(Error::config(format!(
            "minor class {bad} out of range for {} classes",
            source.num_classes()
        )));
    }
    let (carve_source, test) =
        held_out_test_split(&source, config.test_fraction, mix_seed(seed, tag::TEST_SPLIT))?;
    let spec = ImbalanceSpec::new(
        config.minor_classes.iter().copied(),
        config.minor_keep,
        config.major_keep,
        mix_seed(seed, tag::CARVE),
    )?;
    let split = carve_imbalance(&carve_source, &spec)?;
    Ok((split, test))
}

/// Runs a single strategy on prepared data.
pub fn run_one(
    config: &ExperimentConfig,
    split: &CarvedSplit,
    test: &LabeledDataset,
    strategy: StrategyKind,
    seed: u64,
) -> Result<RunRecord> {
    let mut classifier = MlpModel::classifier(
        split.labeled.dim(),
        &config.hidden,
        split.labeled.num_classes(),
        mix_seed(seed, tag::CLASSIFIER_INIT),
    )?;
    let sgd = SgdConfig {
        learning_rate: config.learning_rate,
        momentum: config.momentum,
        batch_size: config.batch_size,
        seed,
    };
    let rounds = match strategy.baseline() {
        Some(kind) => run_baseline(kind, split, test, &mut classifier, &sgd, &config.strategy)?,
        None => run_selectnet(split, test, &mut classifier, &sgd, &config.selectnet)?,
    };
    Ok(RunRecord {
        strategy,
        seed,
        rounds,
    })
}

pub(super) fn metrics_file_name(strategy: StrategyKind, seed: u64) -> String {
    format!("metrics_{}_{}.csv", strategy.name(), seed)
}

fn write_metrics_csv(record: &RunRecord, dir: &Path) -> Result<()> {
    let num_classes = record.final_metrics().classes.len();
    let mut out = String::from("round,epoch,overall_acc");
    for c in 0..num_classes {
        write!(out, ",precision_{c},recall_{c},f1_{c}").expect("write to string");
    }
    out.push('\n');
    for round in &record.rounds {
        write!(
            out,
            "{},{},{:.6}",
            round.round, round.epochs_completed, round.test_metrics.accuracy
        )
        .expect("write to string");
        for c in &round.test_metrics.classes {
            write!(out, ",{:.6},{:.6},{:.6}", c.precision, c.recall, c.f1)
                .expect("write to string");
        }
        out.push('\n');
    }
    fs::write(dir.join(metrics_file_name(record.strategy, record.seed)), out)?;
    Ok(())
}

fn write_selections_csv(record: &RunRecord, dir: &Path) -> Result<()> {
    let mut out = String::from(
        "round,labeled_confused,labeled_minor,unlabeled_confused,unlabeled_minor,total_added\n",
    );
    for round in &record.rounds {
        let c = &round.counts;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            round.round,
            c.labeled_confused,
            c.labeled_minor,
            c.unlabeled_confused,
            c.unlabeled_minor,
            c.total()
        )
        .expect("write to string");
    }
    let name = format!("selections_{}_{}.csv", record.strategy.name(), record.seed);
    fs::write(dir.join(name), out)?;
    Ok(())
}
