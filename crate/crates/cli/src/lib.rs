//! Experiment runner behind the `nctorus` binary: config parsing and
//! validation, dispatch to `nctorus-core`, and deterministic result files.

pub mod config;
pub mod manifest;
pub mod runner;
pub mod sections;

pub use config::{parse_config, Diagnostic, ExperimentConfig, Kind, Parsed, Severity};
pub use manifest::{Check, RunManifest};
pub use runner::{run, write_outputs, RunOutput};
