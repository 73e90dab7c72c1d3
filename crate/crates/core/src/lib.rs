//! Rough-set classification rules over continuous attributes.
//!
//! Continuous condition attributes are discretized with a [`CutSet`], either
//! by equal-frequency binning or by an ant-colony search over integer
//! percentile cut positions that minimizes the rough-set classifier's
//! validation error. Rules are induced from the indiscernibility classes of
//! the discretized training table and evaluated with a confusion matrix,
//! accuracy, ROC curve, and AUC.
//!
//! The [`synth`] module generates nine-gas dissolved-gas-analysis tables for
//! experiments, and [`cli`] wires the whole pipeline into the `rough-aco`
//! command.

pub mod aco;
pub mod cli;
pub mod data_model;
pub mod discretization;
pub mod error;
pub mod evaluation;
pub mod rough_set;
pub mod synth;

pub use aco::{AcoParams, AntSolution, EtaMode, Objective, OptimizeResult, PheromoneModel};
pub use data_model::{DecisionTable, Label, LoadedTable, Object, SplitSpec};
pub use discretization::{CutSet, DiscretizedRow, DiscretizedTable};
pub use error::{Error, Result};
pub use evaluation::{ConfusionMatrix, EvaluationReport, RocCurve};
pub use rough_set::{Approximation, Partition, Rule, RuleSet};
pub use synth::GasProfile;
