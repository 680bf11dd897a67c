use std::process::ExitCode;

use thiserror::Error;

use creditflow::binning::BinningError;
use creditflow::dataset::DatasetError;
use creditflow::models::ModelError;
use creditflow::optimizer::OptimizerError;
use creditflow::pipeline::PipelineError;

/// Failure classes with stable exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        })
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::UnknownColumn(_) | DatasetError::InvalidSplit(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<BinningError> for CliError {
    fn from(e: BinningError) -> Self {
        match e {
            BinningError::InvalidConstraints(_) => CliError::Config(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParams(_) => CliError::Config(e.to_string()),
            ModelError::Arity { .. } | ModelError::Format(_) | ModelError::Data(_) => CliError::Data(e.to_string()),
            ModelError::Diverged { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::InvalidSpace(_) | OptimizerError::InvalidConfig(_) | OptimizerError::InvalidGenome(_) => {
                CliError::Config(e.to_string())
            }
            OptimizerError::Model(m) => m.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Dataset(d) => d.into(),
            PipelineError::Binning(b) => b.into(),
            PipelineError::Model(m) => m.into(),
            PipelineError::NoFeatures => CliError::Config("no features remain".into()),
            PipelineError::Metrics(_) | PipelineError::DatasetNotFound { .. } => CliError::Data(e.to_string()),
        }
    }
}
