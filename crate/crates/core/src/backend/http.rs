use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

use super::{Backend, BackendConfig, BackendError, GenerationResult, TransportStatus};
use crate::prompt::PromptBundle;

const MAX_BACKOFF: Duration = Duration::from_secs(60);

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 2],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Chat-completion client. Each call is a single two-message request.
pub struct HttpChatBackend {
    client: Client,
    endpoint: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    retry_limit: u32,
    backoff_base: Duration,
    auth: Option<(String, String)>,
}

enum Attempt {
    Done(String),
    Retry(TransportStatus, String, Option<Duration>),
    Fatal(BackendError),
}

impl HttpChatBackend {
    pub fn new(config: &BackendConfig) -> Result<Self, BackendError> {
        let endpoint = config
            .endpoint
            .clone()
            .filter(|e| !e.is_empty())
            .ok_or_else(|| BackendError::Config("http-chat backend needs an endpoint".into()))?;
        let auth = if config.api_key_env.is_empty() {
            None
        } else {
            let key = std::env::var(&config.api_key_env).map_err(|_| {
                BackendError::Config(format!("environment variable `{}` is not set", config.api_key_env))
            })?;
            let value = if config.auth_scheme.is_empty() {
                key
            } else {
                format!("{} {}", config.auth_scheme, key)
            };
            Some((config.auth_header.clone(), value))
        };
        let client = Client::builder()
            .timeout(config.request_timeout())
            .build()
            .map_err(|e| BackendError::Config(format!("http client: {e}")))?;
        Ok(Self {
            client,
            endpoint,
            model: config.model_name.clone(),
            temperature: config.temperature,
            max_tokens: config.max_tokens,
            retry_limit: config.retry_limit,
            backoff_base: config.retry_backoff_base(),
            auth,
        })
    }

    fn attempt(&self, bundle: &PromptBundle) -> Attempt {
        let body = ChatRequest {
            model: &self.model,
            messages: [
                ChatMessage { role: "system", content: &bundle.system_text },
                ChatMessage { role: "user", content: &bundle.user_text },
            ],
            temperature: self.temperature,
            max_tokens: self.max_tokens,
        };
        let mut request = self.client.post(&self.endpoint).json(&body);
        if let Some((name, value)) = &self.auth {
            request = request.header(name.as_str(), value.as_str());
        }
        let response = match request.send() {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retry(TransportStatus::Timeout, e.to_string(), None),
            Err(e) => return Attempt::Retry(TransportStatus::ServerError, e.to_string(), None),
        };
        let status = response.status();
        let retry_after = response
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let text = match response.text() {
            Ok(t) => t,
            Err(e) if e.is_timeout() => return Attempt::Retry(TransportStatus::Timeout, e.to_string(), None),
            Err(e) => return Attempt::Retry(TransportStatus::ServerError, e.to_string(), None),
        };
        if status == StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry(TransportStatus::RateLimited, text, retry_after);
        }
        if status.is_server_error() || status == StatusCode::REQUEST_TIMEOUT {
            return Attempt::Retry(TransportStatus::ServerError, format!("HTTP {}: {text}", status.as_u16()), retry_after);
        }
        if !status.is_success() {
            return Attempt::Fatal(BackendError::Rejected { status: status.as_u16(), body: text });
        }
        match serde_json::from_str::<ChatResponse>(&text) {
            Ok(parsed) => match parsed.choices.into_iter().next() {
                Some(choice) => Attempt::Done(choice.message.content.unwrap_or_default()),
                None => Attempt::Fatal(BackendError::BadResponse("response has no choices".into())),
            },
            Err(e) => Attempt::Fatal(BackendError::BadResponse(e.to_string())),
        }
    }
}

impl Backend for HttpChatBackend {
    fn generate(&self, bundle: &PromptBundle) -> Result<GenerationResult, BackendError> {
        let start = Instant::now();
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(bundle) {
                Attempt::Done(raw_text) => {
                    return Ok(GenerationResult {
                        raw_text,
                        latency: start.elapsed(),
                        attempt_count: attempts,
                        transport_status: TransportStatus::Ok,
                    })
                }
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(status, message, retry_after) => {
                    if attempts > self.retry_limit {
                        warn!(
                            "respondent {} `{}`: giving up after {attempts} attempts",
                            bundle.respondent_index, bundle.question_id
                        );
                        return Err(BackendError::Exhausted { attempts, last: status, message });
                    }
                    let backoff = self.backoff_base.saturating_mul(1 << (attempts - 1).min(16));
                    let wait = retry_after.map_or(backoff, |r| r.max(backoff)).min(MAX_BACKOFF);
                    debug!("{status:?} on attempt {attempts}; retrying in {wait:?}");
                    thread::sleep(wait);
                }
            }
        }
    }
}
