//! Divergence metrics, bootstrap uncertainty, condition deltas and stratification.

mod bootstrap;
mod delta;
mod divergence;
mod stratify;

pub use bootstrap::{bootstrap_jsd, bootstrap_options, percentile, BootstrapConfig, DivergenceEstimate};
pub use delta::{delta, DeltaReport};
pub use divergence::{js_divergence, js_divergence_slices, kl_divergence, kl_divergence_slices};
pub use stratify::{stratify, ConditionCell, StratumDelta, StratumReport, AGGREGATED};

use thiserror::Error;

use crate::prompt::ConditionId;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("support sizes differ: {left} vs {right}")]
    SupportMismatch { left: usize, right: usize },
    #[error("reference has zero mass at option {option} where the first argument is positive")]
    SupportViolation { option: usize },
    #[error("no parsed responses for `{0}`")]
    NoParsedResponses(String),
    #[error("cannot compare `{candidate}` against `{baseline}`")]
    QuestionMismatch { candidate: String, baseline: String },
    #[error("records mix conditions {0} and {1}")]
    MixedConditions(ConditionId, ConditionId),
    #[error("`{0}` cannot be used as a stratification axis")]
    InvalidAxis(String),
    #[error("stratum `{level}` of `{axis}` is empty: {reason}")]
    EmptyStratum { axis: String, level: String, reason: String },
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Response(#[from] crate::response::ResponseError),
    #[error("{0}")]
    Data(String),
}
