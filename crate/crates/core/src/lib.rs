//! Silicon survey sampling and social-desirability evaluation.
//!
//! Pipeline: [`codebook`] ingests the survey schema and human answers,
//! [`sampler`] draws synthetic respondents from the empirical marginals,
//! [`prompt`] renders each respondent/question/condition, [`backend`] queries a
//! model (or a deterministic mock), [`response`] parses and aggregates answers,
//! and [`stats`] compares silicon and human distributions.

pub mod backend;
pub mod codebook;
pub mod distribution;
pub mod prompt;
pub mod response;
pub mod sampler;
pub mod seed;
pub mod stats;

pub use backend::{
    build_backend, generate, run_survey, Backend, BackendConfig, BackendError, BackendKind, CheckpointStore,
    GenerationResult, RunError, SurveyOptions, TransportStatus,
};
pub use codebook::{
    empirical_marginals, human_distribution, load_codebook, load_human_responses, CategoryLevel, Codebook,
    CodebookError, DemographicVariable, HumanDataset, Marginal, MarginalSet, Person, Question,
};
pub use distribution::{total_variation, Distribution, FailureTally};
pub use prompt::{
    remap_reverse_coded, render_bundle, render_system_prompt, render_user_prompt, ConditionId, PromptBundle,
    PromptError,
};
pub use response::{aggregate, finalize_record, parse_answer, AnswerParser, ParseOutcome, ResponseRecord, ResponseStatus};
pub use sampler::{sample_population, RespondentProfile, SampleSpec, SamplerError};
pub use seed::derive_sub_seed;
pub use stats::{
    bootstrap_jsd, delta, js_divergence, kl_divergence, stratify, BootstrapConfig, DeltaReport, DivergenceEstimate,
    StatsError, StratumReport,
};
