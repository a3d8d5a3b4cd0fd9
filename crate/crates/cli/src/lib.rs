//! Pipeline driver behind the `silsamp` binary: run configuration, the
//! ingest/sample/run/eval/report stages, manifests and report rendering.

pub mod config;
pub mod error;
pub mod manifest;
pub mod pipeline;
pub mod report;

pub use config::{Overrides, RunConfig, StratifyConfig, WaveConfig};
pub use error::CliError;
pub use manifest::{RunManifest, StageRecord};
pub use pipeline::{cmd_all, cmd_eval, cmd_ingest, cmd_report, cmd_run, cmd_sample, EstimateRow, SkipNotice};
