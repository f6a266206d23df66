//! Metrics and experiment harnesses.

pub mod experiment;
pub mod metrics;
pub mod prop1;
pub mod sparsity;

pub use experiment::{default_rates, experiment_on, resampling_experiment, ExperimentRow};
pub use metrics::{compute_metrics, f1_acc, f1_score, ConfusionCounts, MetricsReport};
pub use prop1::{prop1_check, prop1_violation_rate, Prop1Counts};
pub use sparsity::{sparsity_report, LogHistogram, SparsityBinRow, SparsityReport, UnitHistogram};
