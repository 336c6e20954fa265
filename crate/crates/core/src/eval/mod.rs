//! Prequential evaluation: metrics, growing-window runs, ranks, learning
//! curves and report tables.

pub mod curves;
pub mod io;
pub mod metrics;
pub mod prequential;
pub mod rank;
pub mod summary;

pub use curves::{build_learning_curves, loess, trailing_mean, Curves, LearningCurve, TypeCurve};
pub use io::{read_results, write_curves, write_results, write_type_curves};
pub use metrics::{mase, mase_scale, smape};
pub use prequential::{
    prequential_run, run_experiment, task_seed, Experiment, OriginRecord, PreprocessMode,
    PrequentialConfig, TaskSummary,
};
pub use rank::{assign_ranks, rank_per_origin, rank_values};
pub use summary::{cc_ratio, cc_table, diagnostics, summarize_avg_rank, CostRow, ModelDiagnostics};
