//! End-to-end glue: split, WoE-encode on the training part only, train,
//! and score held-out data.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::binning::{BinningConfig, BinningError, WoeEncoder};
use crate::dataset::{self, DataTable, DatasetError, SplitSpec};
use crate::metrics::{self, EmpParams, MetricsError, MetricsRow};
use crate::models::{ModelError, ModelSpec, TrainedModel, TrainingData, DEFAULT_THRESHOLD};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Binning(#[from] BinningError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("no features remain after encoding")]
    NoFeatures,
    #[error("dataset {name} not found at {path}")]
    DatasetNotFound { name: String, path: PathBuf },
}

pub type Result<T> = std::result::Result<T, PipelineError>;

/// A public benchmark file and its published summary statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmark {
    pub name: &'static str,
    pub file: &'static str,
    pub target: &'static str,
    pub positive: &'static str,
    pub n_cases: usize,
    pub rate_def: f64,
}

pub const BENCHMARKS: [Benchmark; 4] = [
    Benchmark {
        name: "GER",
        file: "german_credit.csv",
        target: "creditability",
        positive: "bad",
        n_cases: 1000,
        rate_def: 0.3,
    },
    Benchmark {
        name: "HEL",
        file: "hmeq.csv",
        target: "BAD",
        positive: "1",
        n_cases: 5960,
        rate_def: 0.19,
    },
    Benchmark {
        name: "HECL",
        file: "heloc_dataset_v1.csv",
        target: "RiskPerformance",
        positive: "Bad",
        n_cases: 10460,
        rate_def: 0.52,
    },
    Benchmark {
        name: "PBD",
        file: "polish_bankruptcy.csv",
        target: "class",
        positive: "1",
        n_cases: 43405,
        rate_def: 0.04,
    },
];

pub fn benchmark(name: &str) -> Option<Benchmark> {
    BENCHMARKS.into_iter().find(|b| b.name.eq_ignore_ascii_case(name))
}

/// `$CREDITFLOW_DATA_DIR`, else the `data/` directory of the workspace.
pub fn data_dir() -> PathBuf {
    std::env::var_os("CREDITFLOW_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub fn load_benchmark(b: &Benchmark) -> Result<DataTable> {
    let path = data_dir().join(b.file);
    if !path.exists() {
        return Err(PipelineError::DatasetNotFound {
            name: b.name.to_string(),
            path,
        });
    }
    Ok(dataset::load_csv(&path, b.target, b.positive)?)
}

/// An encoder fitted on the training rows and the encoded partitions.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub encoder: WoeEncoder,
    pub features: Vec<String>,
    pub train: TrainingData,
    pub validation: Option<TrainingData>,
    pub test: TrainingData,
}

fn encode(encoder: &WoeEncoder, table: &DataTable) -> Result<TrainingData> {
    Ok(TrainingData::from_table(&encoder.transform(table)?)?)
}

/// Fits the WoE encoder on `train` and encodes every partition with it.
pub fn prepare_tables(
    train: &DataTable,
    validation: Option<&DataTable>,
    test: &DataTable,
    binning: &BinningConfig,
) -> Result<Prepared> {
    let encoder = WoeEncoder::fit(train, binning)?;
    let features: Vec<String> = encoder.output_features().iter().map(|s| s.to_string()).collect();
    if features.is_empty() {
        return Err(PipelineError::NoFeatures);
    }
    Ok(Prepared {
        train: encode(&encoder, train)?,
        validation: validation.map(|v| encode(&encoder, v)).transpose()?,
        test: encode(&encoder, test)?,
        features,
        encoder,
    })
}

/// Stratified train/test split followed by [`prepare_tables`].
pub fn prepare(table: &DataTable, split: &SplitSpec, binning: &BinningConfig) -> Result<Prepared> {
    let (train, test) = dataset::stratified_split(table, split)?;
    prepare_tables(&train, None, &test, binning)
}

/// Stratified train/validation/test split followed by [`prepare_tables`].
pub fn prepare_three_way(
    table: &DataTable,
    train_fraction: f64,
    validation_fraction: f64,
    seed: u64,
    binning: &BinningConfig,
) -> Result<Prepared> {
    let parts = dataset::three_way_split(table, train_fraction, validation_fraction, seed)?;
    prepare_tables(&parts.train, Some(&parts.validation), &parts.test, binning)
}

pub fn score(name: &str, model: &TrainedModel, data: &TrainingData, emp_params: &EmpParams) -> Result<MetricsRow> {
    let p = model.predict_matrix(&data.x)?;
    Ok(metrics::evaluate(
        name,
        &p,
        &data.labels(),
        DEFAULT_THRESHOLD,
        emp_params,
    )?)
}

/// Trains `spec` on the prepared training rows and scores the test rows.
pub fn train_and_score(
    spec: &ModelSpec,
    prepared: &Prepared,
    emp_params: &EmpParams,
    seed: u64,
) -> Result<(TrainedModel, MetricsRow)> {
    let model = spec.train(&prepared.train, prepared.validation.as_ref(), seed)?;
    let row = score(spec.name(), &model, &prepared.test, emp_params)?;
    Ok((model, row))
}
