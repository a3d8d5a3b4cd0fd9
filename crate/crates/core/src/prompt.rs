//! Prompt rendering for the five experimental conditions.
//!
//! The system prompt carries the survey date and one sentence per demographic
//! variable (codebook order). The user prompt carries the question variant, the
//! numbered answer choices and the single-number instruction.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codebook::{Codebook, Person, Question};
use crate::sampler::RespondentProfile;

/// Instruction appended after the answer choices in every user prompt.
pub const SINGLE_NUMBER_INSTRUCTION: &str = "When answering, respond ONLY with a single number that corresponds to the option you choose. Do not include any additional text, punctuation or explanation.";

/// Final cue of every user prompt.
pub const ANSWER_CUE: &str = "My answer is";

/// Separator between a condition paragraph and the prompt it extends.
pub const PARAGRAPH_BREAK: &str = "\n\n";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("profile {index} has no assignment for `{code}`")]
    MissingAssignment { index: usize, code: String },
    #[error("profile {index}: `{value}` is not a valid value for `{code}`")]
    InvalidAssignment { index: usize, code: String, value: i64 },
    #[error("question `{0}` has no reverse-coded variant")]
    ReverseNotApplicable(String),
    #[error("option {option} outside 1..={n_options}")]
    OutOfRange { option: usize, n_options: usize },
    #[error("unknown condition `{0}`")]
    UnknownCondition(String),
}

/// Prompt condition; the integer value is the on-disk representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ConditionId {
    Replicate = 0,
    Reformulated = 1,
    ReverseCoded = 2,
    Priming = 3,
    Preamble = 4,
}

impl ConditionId {
    pub const ALL: [ConditionId; 5] = [
        ConditionId::Replicate,
        ConditionId::Reformulated,
        ConditionId::ReverseCoded,
        ConditionId::Priming,
        ConditionId::Preamble,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::Replicate => "replicate",
            ConditionId::Reformulated => "reformulated",
            ConditionId::ReverseCoded => "reverse_coded",
            ConditionId::Priming => "priming",
            ConditionId::Preamble => "preamble",
        }
    }

    /// Framing of the demographic block: third person only for Reformulated.
    pub fn person(self) -> Person {
        match self {
            ConditionId::Reformulated => Person::Third,
            _ => Person::First,
        }
    }

    pub fn is_applicable(self, question: &Question) -> bool {
        self != ConditionId::ReverseCoded || question.reverse_applicable
    }
}

impl From<ConditionId> for u8 {
    fn from(c: ConditionId) -> u8 {
        c as u8
    }
}

impl TryFrom<u8> for ConditionId {
    type Error = PromptError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        ConditionId::ALL
            .get(v as usize)
            .copied()
            .ok_or_else(|| PromptError::UnknownCondition(v.to_string()))
    }
}

impl std::str::FromStr for ConditionId {
    type Err = PromptError;

    /// Accepts the integer (`"2"`) or the name (`"reverse_coded"`, `"reverse-coded"`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Ok(v) = s.parse::<u8>() {
            return ConditionId::try_from(v);
        }
        let norm = s.to_ascii_lowercase().replace('-', "_");
        ConditionId::ALL
            .into_iter()
            .find(|c| c.name() == norm)
            .ok_or_else(|| PromptError::UnknownCondition(s.to_string()))
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully rendered prompts for one `(respondent, question, condition)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub respondent_index: usize,
    pub question_id: String,
    pub condition: ConditionId,
    pub system_text: String,
    pub user_text: String,
}

pub fn format_survey_date(date: NaiveDate) -> String {
    format!("Today is {}.", date.format("%B %-d, %Y"))
}

pub fn render_system_prompt(
    profile: &RespondentProfile,
    codebook: &Codebook,
    condition: ConditionId,
    survey_date: NaiveDate,
) -> Result<String, PromptError> {
    let person = condition.person();
    let mut sentences = Vec::with_capacity(codebook.variables.len() + 1);
    sentences.push(format_survey_date(survey_date));
    for var in &codebook.variables {
        let value = profile.get(&var.code).ok_or_else(|| PromptError::MissingAssignment {
            index: profile.index,
            code: var.code.clone(),
        })?;
        let sentence = var.render(value, person).ok_or_else(|| PromptError::InvalidAssignment {
            index: profile.index,
            code: var.code.clone(),
            value,
        })?;
        sentences.push(sentence);
    }
    let mut text = sentences.join(" ");
    if condition == ConditionId::Priming {
        text.push_str(PARAGRAPH_BREAK);
        text.push_str(&codebook.priming_text);
    }
    Ok(text)
}

pub fn render_user_prompt(question: &Question, codebook: &Codebook, condition: ConditionId) -> Result<String, PromptError> {
    let (text, options) = match condition {
        ConditionId::Replicate | ConditionId::Priming | ConditionId::Preamble => {
            (question.text_replicate.as_str(), &question.options)
        }
        ConditionId::Reformulated => (
            question.text_reformulated.as_str(),
            question.options_reformulated.as_ref().unwrap_or(&question.options),
        ),
        ConditionId::ReverseCoded => {
            let text = question
                .text_reverse_coded
                .as_deref()
                .filter(|_| question.reverse_applicable)
                .ok_or_else(|| PromptError::ReverseNotApplicable(question.id.clone()))?;
            (text, question.options_reverse_coded.as_ref().unwrap_or(&question.options))
        }
    };
    let choices: Vec<String> = options
        .iter()
        .enumerate()
        .map(|(i, label)| format!("{}. {}", i + 1, label))
        .collect();
    let body = format!(
        "Question: {text} Answer choices: {} {SINGLE_NUMBER_INSTRUCTION} {ANSWER_CUE}",
        choices.join(" ")
    );
    if condition == ConditionId::Preamble {
        Ok(format!("{}{PARAGRAPH_BREAK}{body}", codebook.preamble_text))
    } else {
        Ok(body)
    }
}

pub fn render_bundle(
    profile: &RespondentProfile,
    question: &Question,
    codebook: &Codebook,
    condition: ConditionId,
    survey_date: NaiveDate,
) -> Result<PromptBundle, PromptError> {
    Ok(PromptBundle {
        respondent_index: profile.index,
        question_id: question.id.clone(),
        condition,
        system_text: render_system_prompt(profile, codebook, condition, survey_date)?,
        user_text: render_user_prompt(question, codebook, condition)?,
    })
}

/// Reverse an ordered answer scale: `k ↦ n + 1 − k`.
pub fn remap_reverse_coded(option_index: usize, n_options: usize) -> Result<usize, PromptError> {
    if option_index == 0 || option_index > n_options {
        return Err(PromptError::OutOfRange {
            option: option_index,
            n_options,
        });
    }
    Ok(n_options + 1 - option_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn remap_examples() {
        assert_eq!(remap_reverse_coded(1, 5), Ok(5));
        assert_eq!(remap_reverse_coded(3, 5), Ok(3));
        for k in 1..=5 {
            assert_eq!(remap_reverse_coded(remap_reverse_coded(k, 5).unwrap(), 5), Ok(k));
        }
        assert!(matches!(remap_reverse_coded(0, 5), Err(PromptError::OutOfRange { .. })));
        assert!(matches!(remap_reverse_coded(6, 5), Err(PromptError::OutOfRange { .. })));
    }

    #[test]
    fn condition_parsing() {
        assert_eq!("2".parse::<ConditionId>(), Ok(ConditionId::ReverseCoded));
        assert_eq!("reverse-coded".parse::<ConditionId>(), Ok(ConditionId::ReverseCoded));
        assert_eq!("Priming".parse::<ConditionId>(), Ok(ConditionId::Priming));
        assert!("5".parse::<ConditionId>().is_err());
        assert_eq!(serde_json::to_string(&ConditionId::Preamble).unwrap(), "4");
        assert_eq!(serde_json::from_str::<ConditionId>("1").unwrap(), ConditionId::Reformulated);
        assert!(serde_json::from_str::<ConditionId>("9").is_err());
    }

    #[test]
    fn date_sentence() {
        let d = NaiveDate::from_ymd_opt(2020, 11, 3).unwrap();
        assert_eq!(format_survey_date(d), "Today is November 3, 2020.");
    }
}
