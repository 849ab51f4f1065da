//! Benchmarking pipeline: preprocessing, suite execution with per-method
//! caps, z-score consensus, estimator correlation and characterization.

mod analysis;
mod consensus;
mod preprocess;
mod suite;

pub use analysis::{
    duplication_sensitivity, fit_runtime_model, group_cv, validity_rate, RuntimeModel,
};
pub use consensus::{
    consensus_id, estimator_correlation, pearson_matrix, profile_pca, zscore_consensus, Consensus,
    Correlation, ProfilePca,
};
pub use preprocess::{
    dedup_columns, dedup_rows, min_max_scale, preprocess, subsample_rows, Cap, PreprocessConfig,
};
pub use suite::{
    apply_cap, cell_seed, failed_row, method_cap, prepare_dataset, run_cell, run_suite,
    BenchmarkReport, Cell, Clock, NoClock, SuiteConfig,
};
