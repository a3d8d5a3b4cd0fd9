//! Answer parsing, reverse-code finalisation and aggregation.
//!
//! Answer grammar, applied after trimming whitespace: a single digit optionally
//! followed by `.` or `)`. A digit inside `1..=n` parses; any other single digit
//! is `OutOfRange`. Text starting with a configured refusal prefix
//! (case-insensitive) is `Refusal`; everything else is `Malformed`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codebook::Question;
use crate::distribution::{Distribution, FailureTally};
use crate::prompt::{remap_reverse_coded, ConditionId};

/// Refusal phrase recognised when no list is configured.
pub const DEFAULT_REFUSAL_PREFIX: &str = "I don't have enough information";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResponseError {
    #[error("no parsed responses for `{0}`")]
    NoParsedResponses(String),
    #[error("record for `{found}` aggregated under `{expected}`")]
    QuestionMismatch { expected: String, found: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseStatus {
    Parsed,
    Refusal,
    OutOfRange,
    Malformed,
    TransportFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub respondent_index: usize,
    pub question_id: String,
    pub condition: ConditionId,
    pub raw_text: String,
    pub status: ResponseStatus,
    /// 1-based option after any reverse-code remap; present iff `status == Parsed`.
    pub option_index: Option<usize>,
    #[serde(default)]
    pub attempts: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResponseRecord {
    pub fn is_parsed(&self) -> bool {
        self.status == ResponseStatus::Parsed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseOutcome {
    Option(usize),
    Failed(ResponseStatus),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerParser {
    pub refusal_prefixes: Vec<String>,
}

impl Default for AnswerParser {
    fn default() -> Self {
        Self {
            refusal_prefixes: vec![DEFAULT_REFUSAL_PREFIX.to_string()],
        }
    }
}

fn normalise(text: &str) -> String {
    text.replace(['\u{2019}', '\u{2018}'], "'").to_lowercase()
}

impl AnswerParser {
    pub fn new(refusal_prefixes: Vec<String>) -> Self {
        Self { refusal_prefixes }
    }

    pub fn parse(&self, raw_text: &str, n_options: usize) -> ParseOutcome {
        let text = raw_text.trim();
        let mut chars = text.chars();
        if let Some(first) = chars.next() {
            if let Some(d) = first.to_digit(10) {
                let rest = chars.as_str();
                if rest.is_empty() || rest == "." || rest == ")" {
                    let d = d as usize;
                    return if (1..=n_options).contains(&d) {
                        ParseOutcome::Option(d)
                    } else {
                        ParseOutcome::Failed(ResponseStatus::OutOfRange)
                    };
                }
            }
        }
        let lowered = normalise(text);
        if self
            .refusal_prefixes
            .iter()
            .any(|p| !p.is_empty() && lowered.starts_with(&normalise(p)))
        {
            return ParseOutcome::Failed(ResponseStatus::Refusal);
        }
        ParseOutcome::Failed(ResponseStatus::Malformed)
    }

    /// Build a record (pre-remap) from raw backend text.
    pub fn record(
        &self,
        respondent_index: usize,
        question: &Question,
        condition: ConditionId,
        raw_text: impl Into<String>,
    ) -> ResponseRecord {
        let raw_text = raw_text.into();
        let (status, option_index) = match self.parse(&raw_text, question.n_options()) {
            ParseOutcome::Option(k) => (ResponseStatus::Parsed, Some(k)),
            ParseOutcome::Failed(s) => (s, None),
        };
        ResponseRecord {
            respondent_index,
            question_id: question.id.clone(),
            condition,
            raw_text,
            status,
            option_index,
            attempts: 1,
            error: None,
        }
    }
}

/// Parse with the default refusal list.
pub fn parse_answer(raw_text: &str, n_options: usize) -> ParseOutcome {
    AnswerParser::default().parse(raw_text, n_options)
}

/// Apply the reverse-code remap to a parsed condition-2 record; identity otherwise.
pub fn finalize_record(mut record: ResponseRecord, question: &Question) -> ResponseRecord {
    if record.condition == ConditionId::ReverseCoded && record.is_parsed() {
        if let Some(k) = record.option_index {
            // parsed indices are always in range for this question
            record.option_index = remap_reverse_coded(k, question.n_options()).ok();
        }
    }
    record
}

/// Count parsed options (index 0 = option 1) and tally failures.
pub fn tally(records: &[ResponseRecord], question: &Question) -> Result<(Vec<u64>, FailureTally), ResponseError> {
    let mut counts = vec![0u64; question.n_options()];
    let mut failures = FailureTally::default();
    for r in records {
        if r.question_id != question.id {
            return Err(ResponseError::QuestionMismatch {
                expected: question.id.clone(),
                found: r.question_id.clone(),
            });
        }
        match (r.status, r.option_index) {
            (ResponseStatus::Parsed, Some(k)) if (1..=counts.len()).contains(&k) => counts[k - 1] += 1,
            (ResponseStatus::Parsed, _) | (ResponseStatus::Malformed, _) => failures.malformed += 1,
            (ResponseStatus::Refusal, _) => failures.refusal += 1,
            (ResponseStatus::OutOfRange, _) => failures.out_of_range += 1,
            (ResponseStatus::TransportFailed, _) => failures.transport_failed += 1,
        }
    }
    Ok((counts, failures))
}

/// Silicon distribution over the question's full option list.
pub fn aggregate(records: &[ResponseRecord], question: &Question) -> Result<Distribution, ResponseError> {
    let (counts, failures) = tally(records, question)?;
    let mut dist = Distribution::from_counts(&question.id, &counts)
        .ok_or_else(|| ResponseError::NoParsedResponses(question.id.clone()))?;
    dist.failure_tally = failures;
    Ok(dist)
}
