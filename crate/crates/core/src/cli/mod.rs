//! The `pointwin` command: one subcommand per pipeline stage.
//!
//! ```text
//! pointwin [--config FILE] [--seed N] [--out DIR] [--serve 1|2] [--model FAMILY] <command>
//!
//!   ingest   [--data-dir DIR]     public files -> dataset.tsv, exclusions.tsv
//!   prepare  [--keep-double-faults]
//!                                 -> prepared-serve{1,2}.tsv, schema-serve{1,2}.tsv, split.tsv
//!   train    [--tuned]            -> cv-<model>-serve<N>.json, model-<model>-serve<N>.json
//!   tune     [--budget N]         -> trials-<model>-serve<N>.tsv, tuned-<model>-serve<N>.json
//!   evaluate [--model-file F] [--eval-split test|validation|train|development]
//!                                 -> <split>-<model>-serve<N>.json
//!   report                        -> report/ (heatmaps, tables, importance, index.md)
//! ```
//!
//! Settings come from built-in defaults, then `POINTWIN_DATA_DIR`, then the
//! `--config` file, then flags. Exit codes: 0 success, 1 internal error,
//! 2 usage or input error.

mod commands;
mod config;

pub use commands::{
    cmd_evaluate, cmd_ingest, cmd_prepare, cmd_report, cmd_train, cmd_tune, cv_report_file, eval_report_file,
    load_public_files, model_file, prepared_file, schema_file, trials_file, tuned_file, EvalSplit, TunedParams,
    DATASET_FILE, EXCLUSIONS_FILE, REPORT_DIR, SPLIT_FILE,
};
pub use config::{RunConfig, DATA_DIR_ENV};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::eval::EvalError;
use crate::models::Family;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Feature(_) | EvalError::InvalidSpace(_) => CliError::Input(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pointwin", version, about = "Point-winner prediction for Grand Slam tennis")]
pub struct Cli {
    /// key = value settings file; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory holding every artifact of the run.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Restrict to first (1) or second (2) serves; both when omitted.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub serve: Option<u8>,
    #[arg(long, global = true, value_parser = ["baseline", "logistic", "forest", "adaboost", "gbt"])]
    pub model: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and merge the public files into a dataset file.
    Ingest {
        #[arg(long, value_name = "DIR")]
        data_dir: Option<PathBuf>,
    },
    /// Build leak-free feature rows per serve number and plan the split.
    Prepare {
        /// Keep double faults as rows (they always count in the history).
        #[arg(long)]
        keep_double_faults: bool,
    },
    /// Cross-validate, then fit on train + validation and save the model.
    Train {
        /// Use the hyperparameters chosen by `tune`.
        #[arg(long)]
        tuned: bool,
    },
    /// Random search with cross-validation over train + validation.
    Tune {
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Score a saved model on held-out matches.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        model_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EvalSplit::Test)]
        eval_split: EvalSplit,
    },
    /// Placement heatmaps, win-rate table and importance chart.
    Report,
}

/// Resolves the effective configuration for `cli`.
pub fn resolve_config(cli: &Cli, env_data_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig {
        data_dir: env_data_dir,
        ..RunConfig::default()
    };
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(serve) = cli.serve {
        cfg.serve = Some(serve);
    }
    if let Some(model) = &cli.model {
        cfg.family = model.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Ingest { data_dir: Some(d) } => cfg.data_dir = Some(d.clone()),
        Command::Prepare { keep_double_faults: true } => cfg.keep_double_faults = true,
        Command::Tune { budget: Some(b) } => cfg.budget = *b,
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(cli: &Cli, cfg: &RunConfig) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest { .. } => cmd_ingest(cfg),
        Command::Prepare { .. } => cmd_prepare(cfg),
        Command::Train { tuned } => cmd_train(cfg, *tuned),
        Command::Tune { .. } => cmd_tune(cfg, cfg.budget),
        Command::Evaluate { model_file, eval_split } => cmd_evaluate(cfg, model_file.as_deref(), *eval_split),
        Command::Report => cmd_report(cfg),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let env_dir = std::env::var_os(DATA_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    match resolve_config(&cli, env_dir).and_then(|cfg| execute(&cli, &cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
