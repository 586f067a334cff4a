//! Benchmark protocol: repeated random splits, a hyperparameter grid,
//! validation-based selection and summary tables.

pub mod benchmark;
pub mod config;
pub mod datasets;

pub use benchmark::{
    reverify, run_benchmark, summary_tables, BenchmarkOutcome, RunRecord, Selection,
};
pub use config::{default_budget, BenchmarkConfig, DataSource, Grid};
