//! Response backends and survey orchestration.
//!
//! Every request is a fresh, stateless exchange: a system message carrying the
//! respondent profile and a user message carrying the question. No history is
//! ever reused between respondents.
//!
//! Classification-style decoding (picking the option whose token has the
//! highest next-token probability) needs logit access that chat-completion
//! endpoints do not expose; it is modelled by the mock backends, and a logit
//! backend can be added by implementing [`Backend`].

mod checkpoint;
mod http;
mod mock;
mod runner;

pub use checkpoint::{CheckpointEntry, CheckpointStore};
pub use http::HttpChatBackend;
pub use mock::{CategoricalCell, MockCategoricalBackend, MockTableBackend, TableEntry};
pub use runner::{run_survey, RunError, SurveyOptions};

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codebook::Codebook;
use crate::prompt::PromptBundle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("backend configuration error: {0}")]
    Config(String),
    #[error("gave up after {attempts} attempts (last: {last:?}): {message}")]
    Exhausted {
        attempts: u32,
        last: TransportStatus,
        message: String,
    },
    #[error("request rejected with HTTP {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("unusable response: {0}")]
    BadResponse(String),
}

impl BackendError {
    pub fn attempts(&self) -> u32 {
        match self {
            BackendError::Exhausted { attempts, .. } => *attempts,
            BackendError::Config(_) => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportStatus {
    Ok,
    Timeout,
    RateLimited,
    ServerError,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationResult {
    pub raw_text: String,
    pub latency: Duration,
    pub attempt_count: u32,
    pub transport_status: TransportStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    HttpChat,
    MockTable,
    MockCategorical,
}

impl std::str::FromStr for BackendKind {
    type Err = BackendError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "http-chat" | "http" => Ok(BackendKind::HttpChat),
            "mock-table" | "table" => Ok(BackendKind::MockTable),
            "mock-categorical" | "categorical" => Ok(BackendKind::MockCategorical),
            other => Err(BackendError::Config(format!("unknown backend `{other}`"))),
        }
    }
}

fn default_max_tokens() -> u32 {
    2
}
fn default_max_in_flight() -> usize {
    8
}
fn default_retry_limit() -> u32 {
    4
}
fn default_backoff_ms() -> u64 {
    500
}
fn default_timeout_ms() -> u64 {
    30_000
}
fn default_api_key_env() -> String {
    "OPENAI_API_KEY".into()
}
fn default_auth_header() -> String {
    "Authorization".into()
}
fn default_auth_scheme() -> String {
    "Bearer".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model_name: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_retry_limit")]
    pub retry_limit: u32,
    #[serde(default = "default_backoff_ms")]
    pub retry_backoff_base_ms: u64,
    #[serde(default = "default_timeout_ms")]
    pub request_timeout_ms: u64,
    /// Environment variable holding the API key; empty disables the auth header.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_auth_header")]
    pub auth_header: String,
    /// Prefix placed before the key in the auth header; may be empty.
    #[serde(default = "default_auth_scheme")]
    pub auth_scheme: String,
    /// MockTable fixture (JSON lines).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
    /// MockCategorical seed.
    #[serde(default)]
    pub seed: u64,
    /// MockCategorical per-cell distributions; unlisted cells answer uniformly.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categorical: Vec<CategoricalCell>,
}

impl BackendConfig {
    /// A mock-categorical configuration with library defaults.
    pub fn mock_categorical(seed: u64) -> Self {
        Self {
            kind: BackendKind::MockCategorical,
            endpoint: None,
            model_name: "mock-categorical".into(),
            temperature: 0.0,
            max_tokens: default_max_tokens(),
            max_in_flight: default_max_in_flight(),
            retry_limit: default_retry_limit(),
            retry_backoff_base_ms: default_backoff_ms(),
            request_timeout_ms: default_timeout_ms(),
            api_key_env: default_api_key_env(),
            auth_header: default_auth_header(),
            auth_scheme: default_auth_scheme(),
            fixture: None,
            seed,
            categorical: Vec::new(),
        }
    }

    pub fn retry_backoff_base(&self) -> Duration {
        Duration::from_millis(self.retry_backoff_base_ms)
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_millis(self.request_timeout_ms)
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(BackendError::Config(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        if self.max_in_flight == 0 {
            return Err(BackendError::Config("max_in_flight must be at least 1".into()));
        }
        match self.kind {
            BackendKind::HttpChat if self.endpoint.as_deref().unwrap_or("").is_empty() => {
                Err(BackendError::Config("http-chat backend needs an endpoint".into()))
            }
            BackendKind::MockTable if self.fixture.is_none() => {
                Err(BackendError::Config("mock-table backend needs a fixture".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A source of raw answers. Implementations must be safe to call concurrently
/// and must not carry state from one call to the next.
pub trait Backend: Send + Sync {
    fn generate(&self, bundle: &PromptBundle) -> Result<GenerationResult, BackendError>;
}

/// Construct the backend described by `config`. The codebook supplies option
/// counts for the categorical mock.
pub fn build_backend(config: &BackendConfig, codebook: &Codebook) -> Result<Box<dyn Backend>, BackendError> {
    config.validate()?;
    Ok(match config.kind {
        BackendKind::HttpChat => Box::new(HttpChatBackend::new(config)?),
        BackendKind::MockTable => {
            let path = config.fixture.as_ref().expect("validated");
            Box::new(MockTableBackend::load(path)?)
        }
        BackendKind::MockCategorical => Box::new(MockCategoricalBackend::new(codebook, config.seed, &config.categorical)?),
    })
}

/// One-shot convenience: build the backend and answer a single bundle.
pub fn generate(bundle: &PromptBundle, config: &BackendConfig, codebook: &Codebook) -> Result<GenerationResult, BackendError> {
    build_backend(config, codebook)?.generate(bundle)
}
