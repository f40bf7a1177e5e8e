//! Configuration, orchestration, and reporting for shape-optimization runs.

pub mod config;
pub mod problems;
pub mod runner;

pub use config::{ConfigError, OptimizerKind, ProblemKind, RunConfig};
pub use problems::{AxisymProblem, Problem};
pub use runner::{
    cmd_compare, cmd_evaluate, cmd_run, cmd_sweep_nini, compare_runs, seed_dir, CompareTable,
    RunnerError, SeedSummary, SweepTable,
};
