//! Synthetic ridesharing days and the experiment runner around the solvers.

pub mod bench;
pub mod compare;
pub mod config;
pub mod generate;
pub mod instance;
pub mod pipeline;
pub mod report;

pub use bench::{run_bench, BenchPlan};
pub use config::{GenConfig, Variant};
pub use instance::{generate_instance, Batch, Instance};
pub use pipeline::{run_batch, Algorithm, IntervalReport, RunOptions, TargetSpec};
pub use report::emit_report;
