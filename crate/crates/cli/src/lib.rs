//! Configuration, orchestration and persistence for the kdvlab experiments.

pub mod config;
pub mod experiments;
pub mod fields;
pub mod summary;
pub mod sweep;

pub use config::{config_hash, validate, ConfigError, Experiment, RunConfig};
pub use experiments::run;
pub use summary::{report, Check, ReportIndex, RunSummary};
