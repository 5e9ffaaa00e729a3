//! Experiment configuration: defaults, flat key-value config files, and
//! CLI overrides.
//!
//! The config format is one `key = value` pair per line; `#` starts a
//! comment. Unknown keys are errors so typos cannot silently fall back to
//! defaults. See the guide for the full key list.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::data::DatasetFormat;
use crate::error::{Error, Result};
use crate::selectnet::SelectNetConfig;
use crate::strategies::{BaselineKind, StrategyConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Blobs {
        classes: usize,
        per_class: usize,
        dim: usize,
        separation: f64,
    },
    File {
        path: PathBuf,
        format: DatasetFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Imbalanced,
    Oversample,
    SelfPaced,
    Context,
    SelectNet,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Imbalanced,
        StrategyKind::Oversample,
        StrategyKind::SelfPaced,
        StrategyKind::Context,
        StrategyKind::SelectNet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Imbalanced => "imbalanced",
            StrategyKind::Oversample => "oversample",
            StrategyKind::SelfPaced => "self_paced",
            StrategyKind::Context => "context",
            StrategyKind::SelectNet => "selectnet",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::config(format!("unknown strategy `{name}`")))
    }

    /// The baseline this strategy maps onto, or `None` for SelectNet.
    pub fn baseline(self) -> Option<BaselineKind> {
        match self {
            StrategyKind::Imbalanced => Some(BaselineKind::Imbalanced),
            StrategyKind::Oversample => Some(BaselineKind::Oversample),
            StrategyKind::SelfPaced => Some(BaselineKind::SelfPaced),
            StrategyKind::Context => Some(BaselineKind::Context),
            StrategyKind::SelectNet => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub minor_classes: Vec<usize>,
    pub minor_keep: f64,
    pub major_keep: f64,
    pub test_fraction: f64,
    /// Classifier hidden widths (all ReLU; the softmax head is implied).
    pub hidden: Vec<usize>,
    pub strategies: Vec<StrategyKind>,
    pub seeds: Vec<u64>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub strategy: StrategyConfig,
    pub selectnet: SelectNetConfig,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    /// The default desk-scale experiment: ten 16-dimensional blob classes,
    /// 1000 samples each, minors {0, 2, 6, 7} carved at 1% vs 90% (an
    /// imbalance ratio of 90 after the test split), five seeds.
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSpec::Blobs {
                classes: 10,
                per_class: 1000,
                dim: 16,
                separation: 2.5,
            },
            minor_classes: vec![0, 2, 6, 7],
            minor_keep: 0.01,
            major_keep: 0.90,
            test_fraction: 0.1,
            hidden: vec![32],
            strategies: StrategyKind::ALL.to_vec(),
            seeds: vec![1, 2, 3, 4, 5],
            learning_rate: 0.05,
            momentum: 0.9,
            batch_size: 32,
            strategy: StrategyConfig::default(),
            selectnet: SelectNetConfig::default(),
            out_dir: PathBuf::from("runs"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(Error::config("at least one strategy required".to_string()));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("at least one seed required".to_string()));
        }
        let unique: BTreeSet<u64> = self.seeds.iter().copied().collect();
        if unique.len() != self.seeds.len() {
            return Err(Error::config("duplicate seeds".to_string()));
        }
        if self.minor_classes.is_empty() {
            return Err(Error::config("at least one minor class required".to_string()));
        }
        if let DatasetSpec::Blobs { classes, dim, .. } = self.dataset {
            if let Some(&bad) = self.minor_classes.iter().find(|&&c| c >= classes) {
                return Err(Error::config(format!(
                    "minor class {bad} out of range for {classes} classes"
                )));
            }
            if self.minor_classes.len() >= classes {
                return Err(Error::config(
                    "minor classes must be a strict subset of all classes".to_string(),
                ));
            }
            if classes > 2 * dim {
                return Err(Error::config(format!(
                    "{classes} blob classes need dim >= {}",
                    classes.div_ceil(2)
                )));
            }
        }
        for (name, frac) in [("minor_keep", self.minor_keep), ("major_keep", self.major_keep)] {
            if frac <= 0.0 || frac > 1.0 || frac.is_nan() {
                return Err(Error::config(format!("{name} must be in (0, 1], got {frac}")));
            }
        }
        if self.test_fraction <= 0.0 || self.test_fraction > 0.5 || self.test_fraction.is_nan() {
            return Err(Error::config(format!(
                "test_fraction must be in (0, 0.5], got {}",
                self.test_fraction
            )));
        }
        if self.hidden.contains(&0) {
            return Err(Error::config("hidden widths must be positive".to_string()));
        }
        if self.learning_rate <= 0.0 || self.learning_rate.is_nan() {
            return Err(Error::config("learning_rate must be positive".to_string()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config("momentum must be in [0, 1)".to_string()));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be positive".to_string()));
        }
        self.strategy.validate()?;
        self.selectnet.validate()?;
        Ok(())
    }

    /// Serializes the effective configuration back into config-file syntax.
    /// `run` drops this next to its outputs so `summarize` (and readers)
    /// can reconstruct the experiment.
    pub fn to_config_text(&self) -> String {
        let mut lines = Vec::new();
        match &self.dataset {
            DatasetSpec::Blobs {
                classes,
                per_class,
                dim,
                separation,
            } => {
                lines.push("dataset = blobs".to_string());
                lines.push(format!("classes = {classes}"));
                lines.push(format!("per_class = {per_class}"));
                lines.push(format!("dim = {dim}"));
                lines.push(format!("separation = {separation}"));
            }
            DatasetSpec::File { path, format } => {
                lines.push("dataset = file".to_string());
                lines.push(format!("dataset_path = {}", path.display()));
                lines.push(format!(
                    "dataset_format = {}",
                    match format {
                        DatasetFormat::Csv => "csv",
                        DatasetFormat::Binary => "binary",
                    }
                ));
            }
        }
        lines.push(format!("minor_classes = {}", join(&self.minor_classes)));
        lines.push(format!("minor_keep = {}", self.minor_keep));
        lines.push(format!("major_keep = {}", self.major_keep));
        lines.push(format!("test_fraction = {}", self.test_fraction));
        lines.push(format!("hidden = {}", join(&self.hidden)));
        lines.push(format!(
            "strategies = {}",
            self.strategies.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
        ));
        lines.push(format!("seeds = {}", join(&self.seeds)));
        lines.push(format!("learning_rate = {}", self.learning_rate));
        lines.push(format!("momentum = {}", self.momentum));
        lines.push(format!("batch_size = {}", self.batch_size));
        lines.push(format!("lambda = {}", self.strategy.lambda));
        lines.push(format!("beta = {}", self.selectnet.beta));
        lines.push(format!("rounds = {}", self.strategy.rounds));
        lines.push(format!("round_epochs = {}", self.strategy.round_epochs));
        lines.push(format!("init_epochs = {}", self.selectnet.init_epochs));
        lines.push(format!("selector_steps = {}", self.selectnet.selector_steps));
        lines.push(format!("selector_lr = {}", self.selectnet.selector_lr));
        lines.push(format!("reinit_selector = {}", self.selectnet.reinit_selector));
        lines.push(format!("out = {}", self.out_dir.display()));
        lines.join("\n") + "\n"
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_config_file(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_config(&text, &path.display().to_string())
}

/// Parses config text over the defaults. Later keys win.
pub fn parse_config(text: &str, path: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    // `dataset = file` needs path/format keys that may come in any order.
    let mut dataset_kind: Option<String> = None;
    let mut dataset_path: Option<PathBuf> = None;
    let mut dataset_format = DatasetFormat::Csv;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |msg: String| Error::parse(path, line_no, msg);

        match key {
            "dataset" => dataset_kind = Some(value.to_string()),
            "dataset_path" => dataset_path = Some(PathBuf::from(value)),
            "dataset_format" => {
                dataset_format = DatasetFormat::from_name(value)
                    .map_err(|e| bad(e.to_string()))?;
            }
            "classes" => {
                if let DatasetSpec::Blobs { classes, .. } = &mut cfg.dataset {
                    *classes = parse_num(value, key, path, line_no)?;
                }
            }
            "per_class" => {
                if let DatasetSpec::Blobs { per_class, .. } = &mut cfg.dataset {
                    *per_class = parse_num(value, key, path, line_no)?;
                }
            }
            "dim" => {
                if let DatasetSpec::Blobs { dim, .. } = &mut cfg.dataset {
                    *dim = parse_num(value, key, path, line_no)?;
                }
            }
            "separation" => {
                if let DatasetSpec::Blobs { separation, .. } = &mut cfg.dataset {
                    *separation = parse_num(value, key, path, line_no)?;
                }
            }
            "minor_classes" => cfg.minor_classes = parse_list(value, key, path, line_no)?,
            "minor_keep" => cfg.minor_keep = parse_num(value, key, path, line_no)?,
            "major_keep" => cfg.major_keep = parse_num(value, key, path, line_no)?,
            "test_fraction" => cfg.test_fraction = parse_num(value, key, path, line_no)?,
            "hidden" => cfg.hidden = parse_list(value, key, path, line_no)?,
            "strategies" => {
                cfg.strategies = value
                    .split(',')
                    .map(|s| StrategyKind::from_name(s.trim()).map_err(|e| bad(e.to_string())))
                    .collect::<Result<_>>()?;
            }
            "seeds" => cfg.seeds = parse_list(value, key, path, line_no)?,
            "learning_rate" => cfg.learning_rate = parse_num(value, key, path, line_no)?,
            "momentum" => cfg.momentum = parse_num(value, key, path, line_no)?,
            "batch_size" => cfg.batch_size = parse_num(value, key, path, line_no)?,
            "lambda" => {
                let v: f64 = parse_num(value, key, path, line_no)?;
                cfg.strategy.lambda = v;
                cfg.selectnet.lambda = v;
            }
            "beta" => cfg.selectnet.beta = parse_num(value, key, path, line_no)?,
            "rounds" => {
                let v: usize = parse_num(value, key, path, line_no)?;
                cfg.strategy.rounds = v;
                cfg.selectnet.rounds = v;
            }
            "round_epochs" => {
                let v: usize = parse_num(value, key, path, line_no)?;
                cfg.strategy.round_epochs = v;
                cfg.selectnet.round_epochs = v;
            }
            "init_epochs" => cfg.selectnet.init_epochs = parse_num(value, key, path, line_no)?,
            "selector_steps" => cfg.selectnet.selector_steps = parse_num(value, key, path, line_no)?,
            "selector_lr" => cfg.selectnet.selector_lr = parse_num(value, key, path, line_no)?,
            "reinit_selector" => {
                cfg.selectnet.reinit_selector = value
                    .parse()
                    .map_err(|_| bad(format!("expected true/false, got `{value}`")))?;
            }
            "out" => cfg.out_dir = PathBuf::from(value),
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }

    match dataset_kind.as_deref() {
        None | Some("blobs") => {}
        Some("file") => {
            let path = dataset_path
                .ok_or_else(|| Error::config("dataset = file requires dataset_path".to_string()))?;
            cfg.dataset = DatasetSpec::File {
                path,
                format: dataset_format,
            };
        }
        Some(other) => {
            return Err(Error::config(format!("unknown dataset kind `{other}`")));
        }
    }
    Ok(cfg)
}

fn parse_num<T: std::str::FromStr>(value: &str, key: &str, path: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(path, line, format!("bad value `{value}` for {key}")))
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    key: &str,
    path: &str,
    line: usize,
) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|v| parse_num(v.trim(), key, path, line))
        .collect()
}
