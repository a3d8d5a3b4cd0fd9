use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Backend, BackendError, GenerationResult, TransportStatus};
use crate::codebook::Codebook;
use crate::prompt::{ConditionId, PromptBundle};
use crate::sampler::draw_categorical;
use crate::seed::{derive_sub_seed, unit_uniform};

fn ok(raw_text: String) -> GenerationResult {
    GenerationResult {
        raw_text,
        latency: Duration::ZERO,
        attempt_count: 1,
        transport_status: TransportStatus::Ok,
    }
}

/// One line of a MockTable fixture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub question_id: String,
    pub condition: ConditionId,
    pub respondent_index: usize,
    pub text: String,
}

/// Replays fixed texts keyed by `(question_id, condition, respondent_index)`.
#[derive(Debug, Clone, Default)]
pub struct MockTableBackend {
    table: HashMap<(String, ConditionId, usize), String>,
}

impl MockTableBackend {
    pub fn from_entries(entries: impl IntoIterator<Item = TableEntry>) -> Self {
        Self {
            table: entries
                .into_iter()
                .map(|e| ((e.question_id, e.condition, e.respondent_index), e.text))
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: TableEntry = serde_json::from_str(line)
                .map_err(|e| BackendError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
            entries.push(entry);
        }
        Ok(Self::from_entries(entries))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Backend for MockTableBackend {
    fn generate(&self, bundle: &PromptBundle) -> Result<GenerationResult, BackendError> {
        let key = (bundle.question_id.clone(), bundle.condition, bundle.respondent_index);
        self.table.get(&key).cloned().map(ok).ok_or_else(|| {
            BackendError::Config(format!(
                "no fixture entry for question `{}`, condition {}, respondent {}",
                bundle.question_id,
                bundle.condition.index(),
                bundle.respondent_index
            ))
        })
    }
}

/// Answer distribution for one `(question, condition)` cell of the categorical mock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalCell {
    pub question_id: String,
    /// `None` applies the distribution to every condition of the question.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionId>,
    pub probabilities: Vec<f64>,
}

/// Draws an option per call from a per-cell distribution.
///
/// The uniform variate for a call is
/// `unit_uniform(derive_sub_seed(seed, respondent_index, "{question_id}/{condition}"))`
/// with the condition as its integer, mapped through the inverse CDF over options `1..=n`.
#[derive(Debug, Clone)]
pub struct MockCategoricalBackend {
    seed: u64,
    exact: HashMap<(String, ConditionId), Vec<f64>>,
    per_question: HashMap<String, Vec<f64>>,
}

impl MockCategoricalBackend {
    pub fn new(codebook: &Codebook, seed: u64, cells: &[CategoricalCell]) -> Result<Self, BackendError> {
        let mut per_question: HashMap<String, Vec<f64>> = codebook
            .questions
            .iter()
            .map(|q| (q.id.clone(), vec![1.0 / q.n_options() as f64; q.n_options()]))
            .collect();
        let mut exact = HashMap::new();
        for cell in cells {
            let q = codebook
                .question(&cell.question_id)
                .ok_or_else(|| BackendError::Config(format!("categorical cell for unknown question `{}`", cell.question_id)))?;
            let valid = cell.probabilities.len() == q.n_options()
                && cell.probabilities.iter().all(|p| p.is_finite() && *p >= 0.0)
                && cell.probabilities.iter().sum::<f64>() > 0.0;
            if !valid {
                return Err(BackendError::Config(format!(
                    "categorical cell for `{}` needs {} non-negative weights",
                    q.id,
                    q.n_options()
                )));
            }
            let total: f64 = cell.probabilities.iter().sum();
            let probs: Vec<f64> = cell.probabilities.iter().map(|p| p / total).collect();
            match cell.condition {
                Some(c) => {
                    exact.insert((q.id.clone(), c), probs);
                }
                None => {
                    per_question.insert(q.id.clone(), probs);
                }
            }
        }
        Ok(Self { seed, exact, per_question })
    }

    pub fn distribution(&self, question_id: &str, condition: ConditionId) -> Option<&[f64]> {
        self.exact
            .get(&(question_id.to_string(), condition))
            .or_else(|| self.per_question.get(question_id))
            .map(Vec::as_slice)
    }
}

impl Backend for MockCategoricalBackend {
    fn generate(&self, bundle: &PromptBundle) -> Result<GenerationResult, BackendError> {
        let probs = self
            .distribution(&bundle.question_id, bundle.condition)
            .ok_or_else(|| BackendError::Config(format!("unknown question `{}`", bundle.question_id)))?;
        let key = format!("{}/{}", bundle.question_id, bundle.condition.index());
        let u = unit_uniform(derive_sub_seed(self.seed, bundle.respondent_index as u64, &key));
        let options: Vec<i64> = (1..=probs.len() as i64).collect();
        let choice = draw_categorical(&options, probs, u).expect("validated distribution");
        Ok(ok(choice.to_string()))
    }
}
