//! Monte Carlo experiment engine: configuration, trajectory runner,
//! estimators, result files and the invariant suites.

pub mod config;
pub mod runner;
pub mod summary;
pub mod verify;

pub use config::{ArmSetSpec, ConfigOverrides, ExperimentConfig, NoiseSpec, PolicyConfig, PriorSpec};
pub use runner::{estimate_bayes_risk, estimate_regret, run_trajectory, worker_count, Experiment, WORKERS_ENV};
pub use summary::{parse_key_values, CheckpointSummary, CurveSet, SummaryStats, CSV_HEADER};
pub use verify::{verify, Check, Suite, VerifyReport, DEFAULT_SEED};
