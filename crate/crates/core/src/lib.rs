//! Credit default prediction workflow.
//!
//! The pipeline has three lanes:
//!
//! 1. [`dataset`] loads a CSV with a binary default target and [`binning`]
//!    turns every feature into its Weight-of-Evidence value using
//!    constrained optimal binning.
//! 2. [`models`] trains one of five learner families (logistic regression,
//!    classification tree, random forest, MLP, ensemble MLP), optionally
//!    tuned by the NSGA-II search in [`optimizer`] over (AUC, EMP).
//! 3. [`metrics`] scores predictions with AUC, F1, Brier score and the
//!    Expected Maximum Profit.
//!
//! Labels follow the credit convention: `+1` is a default, `-1` a repaid loan.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binning;
pub mod dataset;
pub mod metrics;
pub mod models;
pub mod optimizer;
pub mod pipeline;

pub use binning::{BinningConstraints, BinningSolution, WoeEncoder};
pub use dataset::{DataTable, DatasetDescriptor, Label, SplitSpec, Value};
pub use metrics::{EmpParams, EmpResult, MetricsRow, ScoredSample};
pub use models::{ModelSpec, TrainedModel};
pub use optimizer::{Individual, ParetoFront, SearchSpace};
