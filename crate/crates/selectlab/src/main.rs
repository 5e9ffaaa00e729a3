//! Command-line experiment runner.
//!
//! ```text
//! selectlab run [--config <path>] [--strategy <name>]... [--seed <n>]... [--out <dir>]
//! selectlab summarize --in <dir>
//! selectlab selfcheck
//! ```
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use selectlab::harness::{
    parse_config_file, run_experiment, selfcheck, summarize_dir, ExperimentConfig, StrategyKind,
};

const USAGE: &str = "usage:
  selectlab run [--config <path>] [--strategy <name>]... [--seed <n>]... [--out <dir>]
  selectlab summarize --in <dir>
  selectlab selfcheck

run       executes every (strategy, seed) pair of the experiment and writes
          metrics_*.csv, selections_*.csv, experiment.txt and summary.json
          into the output directory. Without --config the built-in
          desk-scale experiment is used; flags override the config file.
summarize rebuilds and prints the comparison table from a run directory.
selfcheck runs the built-in property checks and exits non-zero on failure.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Config(String),
    Runtime(String),
}

fn dispatch(args: &[String]) -> Result<(), CliError> {
    match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("summarize") => cmd_summarize(&args[1..]),
        Some("selfcheck") => cmd_selfcheck(),
        Some("--help" | "-h" | "help") => {
            println!("{USAGE}");
            Ok(())
        }
        Some(other) => Err(CliError::Config(format!("unknown command `{other}`\n{USAGE}"))),
        None => Err(CliError::Config(USAGE.to_string())),
    }
}

fn cmd_run(args: &[String]) -> Result<(), CliError> {
    let mut config_path: Option<PathBuf> = None;
    let mut strategies: Vec<StrategyKind> = Vec::new();
    let mut seeds: Vec<u64> = Vec::new();
    let mut out: Option<PathBuf> = None;

    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next()
                .cloned()
                .ok_or_else(|| CliError::Config(format!("{name} needs a value")))
        };
        match flag.as_str() {
            "--config" => config_path = Some(PathBuf::from(value("--config")?)),
            "--strategy" => {
                let name = value("--strategy")?;
                strategies.push(
                    StrategyKind::from_name(&name).map_err(|e| CliError::Config(e.to_string()))?,
                );
            }
            "--seed" => {
                let raw = value("--seed")?;
                seeds.push(
                    raw.parse()
                        .map_err(|_| CliError::Config(format!("bad seed `{raw}`")))?,
                );
            }
            "--out" => out = Some(PathBuf::from(value("--out")?)),
            other => return Err(CliError::Config(format!("unknown flag `{other}`\n{USAGE}"))),
        }
    }

    let mut config = match config_path {
        Some(path) => parse_config_file(&path).map_err(|e| CliError::Config(e.to_string()))?,
        None => ExperimentConfig::default(),
    };
    if !strategies.is_empty() {
        config.strategies = strategies;
    }
    if !seeds.is_empty() {
        config.seeds = seeds;
    }
    if let Some(dir) = out {
        config.out_dir = dir;
    }
    config.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let outcome = run_experiment(&config).map_err(|e| {
        CliError::Runtime(format!(
            "{e} (outputs in {} may be partial)",
            config.out_dir.display()
        ))
    })?;
    println!(
        "{} runs complete; outputs in {}",
        outcome.records.len(),
        config.out_dir.display()
    );
    print!("{}", selectlab::harness::render_summary(&outcome.summary));
    Ok(())
}

fn cmd_summarize(args: &[String]) -> Result<(), CliError> {
    let dir = match args {
        [flag, dir] if flag == "--in" => PathBuf::from(dir),
        _ => return Err(CliError::Config(format!("summarize needs --in <dir>\n{USAGE}"))),
    };
    let summary = summarize_dir(&dir).map_err(|e| CliError::Runtime(e.to_string()))?;
    print!("{}", selectlab::harness::render_summary(&summary));
    Ok(())
}

fn cmd_selfcheck() -> Result<(), CliError> {
    let results = selfcheck();
    let mut all_ok = true;
    for r in &results {
        println!("{} {} — {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        all_ok &= r.passed;
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Runtime("selfcheck failed".to_string()))
    }
}
