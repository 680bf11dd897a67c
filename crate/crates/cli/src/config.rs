use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use creditflow::binning::BinningConfig;
use creditflow::metrics::EmpParams;
use creditflow::models::ModelSpec;
use creditflow::optimizer::{default_space, ModelKind, NsgaConfig, SearchSpace};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub path: Option<PathBuf>,
    pub target: Option<String>,
    /// Target value that marks a default.
    pub positive: String,
    /// Feature columns removed before encoding.
    pub drop: Vec<String>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            path: None,
            target: None,
            positive: "1".into(),
            drop: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    /// Train share of the train/test split used by `encode`, `train`,
    /// `evaluate` and `report`.
    pub train_fraction: f64,
    pub stratified: bool,
    /// Train and validation shares of the three-way split used by `optimize`.
    pub search_train_fraction: f64,
    pub search_validation_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_fraction: 0.8,
            stratified: true,
            search_train_fraction: 0.6,
            search_validation_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Family to tune; `None` means the family of `model`.
    pub kind: Option<ModelKind>,
    /// Replaces the family's default space when given.
    pub space: Option<SearchSpace>,
    pub nsga: NsgaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataConfig,
    pub split: SplitConfig,
    pub binning: BinningConfig,
    /// Model trained by `train`.
    pub model: ModelSpec,
    /// Models compared by `report`.
    pub report_models: Vec<ModelSpec>,
    pub search: SearchConfig,
    pub emp: EmpParams,
    /// Drives every split, trainer and search seed.
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: DataConfig::default(),
            split: SplitConfig::default(),
            binning: BinningConfig::default(),
            model: ModelKind::Lr.default_spec(),
            report_models: ModelKind::ALL.iter().map(|k| k.default_spec()).collect(),
            search: SearchConfig::default(),
            emp: EmpParams::default(),
            seed: 42,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub positive: Option<String>,
    pub model: Option<ModelKind>,
    pub pop_size: Option<usize>,
    pub generations: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    /// Loads the file (if any), applies flag overrides and checks the result.
    pub fn resolve(file: Option<&Path>, o: &Overrides) -> Result<RunConfig, CliError> {
        let mut cfg = match file {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = o.seed {
            cfg.seed = s;
        }
        if let Some(out) = &o.out {
            cfg.out = out.clone();
        }
        if let Some(d) = &o.data {
            cfg.data.path = Some(d.clone());
        }
        if let Some(t) = &o.target {
            cfg.data.target = Some(t.clone());
        }
        if let Some(p) = &o.positive {
            cfg.data.positive = p.clone();
        }
        if let Some(k) = o.model {
            if ModelKind::of(&cfg.model) != k {
                cfg.model = k.default_spec();
            }
            cfg.search.kind = Some(k);
        }
        if let Some(n) = o.pop_size {
            cfg.search.nsga.pop_size = n;
        }
        if let Some(n) = o.generations {
            cfg.search.nsga.generations = n;
        }
        cfg.search.nsga.seed = cfg.seed;
        cfg.validate()?;
        // absolute, so the echoed config works from any directory
        if let Some(p) = &cfg.data.path {
            cfg.data.path = Some(fs::canonicalize(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?);
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let path = self
            .data
            .path
            .as_ref()
            .ok_or_else(|| CliError::Config("data.path is required (config or --data)".into()))?;
        if self.data.target.is_none() {
            return Err(CliError::Config("data.target is required (config or --target)".into()));
        }
        if !path.exists() {
            return Err(CliError::Data(format!("dataset {} does not exist", path.display())));
        }
        let s = &self.split;
        if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
            return Err(CliError::Config("split.train_fraction must lie in (0, 1)".into()));
        }
        if !(s.search_train_fraction > 0.0
            && s.search_validation_fraction > 0.0
            && s.search_train_fraction + s.search_validation_fraction < 1.0)
        {
            return Err(CliError::Config(
                "search fractions must be positive and sum to less than 1".into(),
            ));
        }
        self.binning
            .constraints
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.emp.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.search
            .nsga
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(space) = &self.search.space {
            space.validate().map_err(|e| CliError::Config(e.to_string()))?;
        }
        if self.report_models.is_empty() {
            return Err(CliError::Config("report_models is empty".into()));
        }
        Ok(())
    }

    pub fn data_path(&self) -> &Path {
        self.data.path.as_deref().expect("validated")
    }

    pub fn target(&self) -> &str {
        self.data.target.as_deref().expect("validated")
    }

    pub fn search_kind(&self) -> ModelKind {
        self.search.kind.unwrap_or_else(|| ModelKind::of(&self.model))
    }

    pub fn search_space(&self) -> SearchSpace {
        self.search
            .space
            .clone()
            .unwrap_or_else(|| default_space(self.search_kind()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
