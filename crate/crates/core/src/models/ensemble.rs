//! Weighted-vote ensembles: random forest and ensemble MLP.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mlp::{train_mlp, MlpParams};
use super::tree::{grow_tree, Codes, TreeParams};
use super::{derive_seed, ModelError, Result, TrainedModel, TrainingData};
use crate::dataset::Label;
use crate::metrics;

/// Members combined as `Σ a_i w_i / Σ w_i`, where `a_i` is member `i`'s
/// default probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub members: Vec<TrainedModel>,
    pub weights: Vec<f64>,
}

impl EnsembleModel {
    pub fn new(members: Vec<TrainedModel>, weights: Vec<f64>) -> Result<Self> {
        if members.is_empty() || members.len() != weights.len() {
            return Err(ModelError::InvalidParams(format!(
                "{} members with {} weights",
                members.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(ModelError::InvalidParams(
                "weights must be non-negative with a positive sum".into(),
            ));
        }
        let arity = members[0].n_features();
        if members.iter().any(|m| m.n_features() != arity) {
            return Err(ModelError::InvalidParams("members differ in arity".into()));
        }
        Ok(EnsembleModel { members, weights })
    }

    pub fn n_features(&self) -> usize {
        self.members[0].n_features()
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        let total: f64 = self.weights.iter().sum();
        let acc: f64 = self
            .members
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(m, w)| w * m.predict_unchecked(row))
            .sum();
        (acc / total).clamp(0.0, 1.0)
    }

    /// Arg-max over the weighted class-probability sums; a tie goes to the
    /// non-default class.
    pub fn vote(&self, row: &[f64]) -> Result<Label> {
        let expected = self.n_features();
        if row.len() != expected {
            return Err(ModelError::Arity {
                expected,
                found: row.len(),
            });
        }
        let (mut default, mut nondefault) = (0.0, 0.0);
        for (m, &w) in self.members.iter().zip(&self.weights) {
            let p = m.predict_unchecked(row);
            default += p * w;
            nondefault += (1.0 - p) * w;
        }
        Ok(if default > nondefault {
            Label::Default
        } else {
            Label::NonDefault
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub feature_fraction: f64,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 300,
            max_depth: 12,
            min_leaf: 5,
            feature_fraction: 0.25,
            bootstrap: true,
        }
    }
}

/// Bootstrap-aggregated trees with per-split feature subsampling and
/// uniform vote weights. Trees train in parallel, each from its own
/// derived seed.
pub fn train_forest(data: &TrainingData, params: &ForestParams, seed: u64) -> Result<EnsembleModel> {
    if params.n_trees == 0 {
        return Err(ModelError::InvalidParams("n_trees must be >= 1".into()));
    }
    if !(params.feature_fraction > 0.0 && params.feature_fraction <= 1.0) {
        return Err(ModelError::InvalidParams(format!(
            "feature_fraction {} not in (0, 1]",
            params.feature_fraction
        )));
    }
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
    };
    tree_params.validate()?;
    let n = data.x.n_rows;
    let n_candidates = ((params.feature_fraction * data.x.n_cols as f64).ceil() as usize).max(1);
    let codes = Codes::new(data);
    let trees: Result<Vec<TrainedModel>> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let tree_seed = derive_seed(seed, t as u64);
            let rows = if params.bootstrap {
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed ^ 0xb007_5eed);
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_tree(data, &codes, rows, &tree_params, n_candidates, tree_seed).map(TrainedModel::Tree)
        })
        .collect();
    let trees = trees?;
    let weights = vec![1.0; trees.len()];
    EnsembleModel::new(trees, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberWeighting {
    Uniform,
    /// Weight proportional to each member's AUC on the validation data.
    ValidationAuc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmlpParams {
    pub n_members: usize,
    pub mlp: MlpParams,
    pub weighting: MemberWeighting,
    /// Train every member from the same seed (identical members).
    pub shared_seed: bool,
}

impl Default for EmlpParams {
    fn default() -> Self {
        EmlpParams {
            n_members: 5,
            mlp: MlpParams::default(),
            weighting: MemberWeighting::Uniform,
            shared_seed: false,
        }
    }
}

/// Trains `n_members` MLPs from distinct derived seeds. With
/// [`MemberWeighting::ValidationAuc`] the members are weighted by their
/// AUC on `validation` (on the training data when none is given).
pub fn train_emlp(
    data: &TrainingData,
    params: &EmlpParams,
    validation: Option<&TrainingData>,
    seed: u64,
) -> Result<EnsembleModel> {
    if params.n_members < 2 {
        return Err(ModelError::InvalidParams("n_members must be >= 2".into()));
    }
    params.mlp.validate()?;
    let members: Result<Vec<TrainedModel>> = (0..params.n_members)
        .into_par_iter()
        .map(|m| {
            let s = if params.shared_seed {
                seed
            } else {
                derive_seed(seed, m as u64)
            };
            train_mlp(data, &params.mlp, s).map(TrainedModel::Mlp)
        })
        .collect();
    let members = members?;
    let weights = match params.weighting {
        MemberWeighting::Uniform => vec![1.0; members.len()],
        MemberWeighting::ValidationAuc => auc_weights(&members, validation.unwrap_or(data))?,
    };
    EnsembleModel::new(members, weights)
}

pub(crate) fn auc_weights(members: &[TrainedModel], validation: &TrainingData) -> Result<Vec<f64>> {
    let labels = validation.labels();
    members
        .iter()
        .map(|m| {
            let p = m.predict_matrix(&validation.x)?;
            let samples = metrics::scored(&p, &labels).map_err(|e| ModelError::Data(e.to_string()))?;
            metrics::roc_auc(&samples).map_err(|e| ModelError::Data(e.to_string()))
        })
        .collect()
}
