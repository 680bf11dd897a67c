//! Learner families and their shared prediction contract.
//!
//! Every fitted model maps an encoded feature vector to the probability of
//! default; the hard label is `+1` iff that probability reaches the
//! decision threshold.

mod ensemble;
mod focal;
mod logistic;
mod mlp;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DataTable, FeatureMatrix, Label};

pub use ensemble::{train_emlp, train_forest, EmlpParams, EnsembleModel, ForestParams, MemberWeighting};
pub use focal::{focal_loss, focal_loss_grad_logit, FocalLossParams, Loss, PROB_EPS};
pub use logistic::{logistic_loss_and_grad, train_logistic, LogisticModel, LogisticParams};
pub use mlp::{mlp_loss_and_grad, train_mlp, Activation, MlpModel, MlpParams};
pub use tree::{candidate_splits, train_tree, weighted_gini, TreeModel, TreeNode, TreeParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("expected {expected} features, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },
    #[error("invalid hyperparameter: {0}")]
    InvalidParams(String),
    #[error("training data: {0}")]
    Data(String),
    #[error("model file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Deterministic per-member seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `+1` iff `p_default >= threshold`.
pub fn classify(p_default: f64, threshold: f64) -> Label {
    if p_default >= threshold {
        Label::Default
    } else {
        Label::NonDefault
    }
}

/// Features and 0/1 outcomes of an encoded table.
#[derive(Debug, Clone)]
pub struct TrainingData {
    pub x: FeatureMatrix,
    pub y: Vec<f64>,
}

impl TrainingData {
    pub fn from_table(table: &DataTable) -> Result<Self> {
        let x = table.to_feature_matrix().map_err(|e| ModelError::Data(e.to_string()))?;
        let y = table.target().iter().map(|l| l.outcome()).collect();
        Ok(TrainingData { x, y })
    }

    pub fn new(x: FeatureMatrix, y: Vec<f64>) -> Result<Self> {
        if x.n_rows != y.len() {
            return Err(ModelError::Data(format!("{} rows but {} labels", x.n_rows, y.len())));
        }
        if x.n_rows == 0 {
            return Err(ModelError::Data("no rows".into()));
        }
        Ok(TrainingData { x, y })
    }

    pub fn labels(&self) -> Vec<Label> {
        self.y
            .iter()
            .map(|&v| if v > 0.5 { Label::Default } else { Label::NonDefault })
            .collect()
    }

    pub fn subset(&self, rows: &[usize]) -> TrainingData {
        TrainingData {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// Any fitted learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Logistic(LogisticModel),
    Tree(TreeModel),
    Mlp(MlpModel),
    Forest(EnsembleModel),
    Emlp(EnsembleModel),
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Logistic(m) => m.alpha.len(),
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Mlp(m) => m.sizes[0],
            TrainedModel::Forest(e) | TrainedModel::Emlp(e) => e.n_features(),
        }
    }

    /// Probability of default for one encoded row.
    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        let expected = self.n_features();
        if row.len() != expected {
            return Err(ModelError::Arity {
                expected,
                found: row.len(),
            });
        }
        Ok(self.predict_unchecked(row))
    }

    pub(crate) fn predict_unchecked(&self, row: &[f64]) -> f64 {
        match self {
            TrainedModel::Logistic(m) => m.predict_proba(row),
            TrainedModel::Tree(m) => m.predict_proba(row),
            TrainedModel::Mlp(m) => m.predict_proba(row),
            TrainedModel::Forest(e) | TrainedModel::Emlp(e) => e.predict_proba(row),
        }
    }

    pub fn predict_matrix(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        if x.n_cols != self.n_features() {
            return Err(ModelError::Arity {
                expected: self.n_features(),
                found: x.n_cols,
            });
        }
        Ok((0..x.n_rows).map(|i| self.predict_unchecked(x.row(i))).collect())
    }

    pub fn predict_label(&self, row: &[f64], threshold: f64) -> Result<Label> {
        Ok(classify(self.predict(row)?, threshold))
    }
}

/// Hyperparameters of one learner family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Lr(LogisticParams),
    Ct(TreeParams),
    Rf(ForestParams),
    Mlp(MlpParams),
    Emlp(EmlpParams),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Lr(_) => "LR",
            ModelSpec::Ct(_) => "CT",
            ModelSpec::Rf(_) => "RF",
            ModelSpec::Mlp(_) => "MLP",
            ModelSpec::Emlp(_) => "EMLP",
        }
    }

    /// Trains on `train`. EMLP uses `validation` for AUC-proportional
    /// member weights when given.
    pub fn train(&self, train: &TrainingData, validation: Option<&TrainingData>, seed: u64) -> Result<TrainedModel> {
        Ok(match self {
            ModelSpec::Lr(p) => TrainedModel::Logistic(train_logistic(train, p, seed)?.0),
            ModelSpec::Ct(p) => TrainedModel::Tree(train_tree(train, p, seed)?),
            ModelSpec::Rf(p) => TrainedModel::Forest(train_forest(train, p, seed)?),
            ModelSpec::Mlp(p) => TrainedModel::Mlp(train_mlp(train, p, seed)?),
            ModelSpec::Emlp(p) => TrainedModel::Emlp(train_emlp(train, p, validation, seed)?),
        })
    }
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Versioned on-disk model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub spec: ModelSpec,
    pub seed: u64,
    pub features: Vec<String>,
    pub model: TrainedModel,
}

impl ModelDocument {
    pub fn new(spec: ModelSpec, seed: u64, features: Vec<String>, model: TrainedModel) -> Self {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            spec,
            seed,
            features,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| ModelError::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s).map_err(|e| ModelError::Format(e.to_string()))?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported format version {}",
                doc.format_version
            )));
        }
        Ok(doc)
    }
}
