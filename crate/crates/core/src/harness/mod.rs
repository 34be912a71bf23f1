//! Training loop, evaluation metrics and the multi-fold experiment runner.

pub mod experiment;
pub mod metrics;
pub mod report;
pub mod train;

pub use experiment::{
    run_experiment, Aggregate, ExperimentConfig, ExperimentOutput, ExperimentResult, FoldResult, MeanValue,
};
pub use metrics::{confusion, metrics_from_scores, roc_auc, MetricsReport, DEFAULT_THRESHOLD};
pub use report::{
    curves_csv, results_csv, write_curves_csv, write_results_csv, write_results_json, CURVES_HEADER, RESULTS_HEADER,
};
pub use train::{evaluate, score, train_model, EpochRecord, TrainOutcome};
