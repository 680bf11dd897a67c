//! `creditflow`: batch front end for encoding, training, evaluating and
//! tuning credit default models.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 data error,
//! 3 runtime failure.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use creditflow::optimizer::ModelKind;

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "creditflow", version, about = "Credit default prediction workflow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dataset CSV.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Target column.
    #[arg(long)]
    target: Option<String>,
    /// Target value marking a default.
    #[arg(long)]
    positive: Option<String>,
    /// Model family: lr, ct, rf, mlp or emlp.
    #[arg(long, value_parser = parse_kind)]
    model: Option<ModelKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit WoE binning on the training split and write the encoded data.
    Encode {
        #[command(flatten)]
        common: Common,
    },
    /// Train the configured model and score it on the test split.
    Train {
        #[command(flatten)]
        common: Common,
    },
    /// Score saved model files.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Model JSON written by `train` or `optimize`; repeatable.
        #[arg(long = "model-file", required = true)]
        model_files: Vec<PathBuf>,
        /// Encoded CSV to score; defaults to the test split rebuilt from the config.
        #[arg(long)]
        encoded: Option<PathBuf>,
    },
    /// NSGA-II search over (AUC, EMP) for one model family.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pop_size: Option<usize>,
        #[arg(long)]
        generations: Option<usize>,
    },
    /// Train every configured model family and tabulate test metrics.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    ModelKind::parse(s).ok_or_else(|| format!("unknown model `{s}`; expected lr, ct, rf, mlp or emlp"))
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        seed: c.seed,
        out: c.out.clone(),
        data: c.data.clone(),
        target: c.target.clone(),
        positive: c.positive.clone(),
        model: c.model,
        ..Default::default()
    }
}

fn resolve(c: &Common, extra: impl FnOnce(&mut Overrides)) -> Result<RunConfig, CliError> {
    let mut o = overrides(c);
    extra(&mut o);
    let cfg = RunConfig::resolve(c.config.as_deref(), &o)?;
    commands::echo_config(&cfg)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode { common } => commands::encode(&resolve(&common, |_| {})?),
        Command::Train { common } => commands::train(&resolve(&common, |_| {})?),
        Command::Evaluate {
            common,
            model_files,
            encoded,
        } => commands::evaluate(&resolve(&common, |_| {})?, &model_files, encoded.as_deref()),
        Command::Optimize {
            common,
            pop_size,
            generations,
        } => commands::optimize(&resolve(&common, |o| {
            o.pop_size = pop_size;
            o.generations = generations;
        })?),
        Command::Report { common } => commands::report(&resolve(&common, |_| {})?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
