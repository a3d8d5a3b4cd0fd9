use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use chrono::NaiveDate;
use log::info;
use thiserror::Error;

use super::{Backend, CheckpointStore};
use crate::codebook::{Codebook, Question};
use crate::prompt::{render_bundle, render_user_prompt, ConditionId, PromptBundle};
use crate::response::{finalize_record, AnswerParser, ResponseRecord, ResponseStatus};
use crate::sampler::RespondentProfile;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("survey configuration error: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(#[from] std::io::Error),
    #[error("interrupted after {completed} of {total} respondents")]
    Interrupted { completed: usize, total: usize },
}

pub struct SurveyOptions<'a> {
    pub survey_date: NaiveDate,
    pub max_in_flight: usize,
    pub parser: &'a AnswerParser,
    /// Key for checkpoint entries; only entries with this id are reused.
    pub run_id: &'a str,
    pub checkpoint: Option<&'a CheckpointStore>,
    /// Checked before each request; set it to stop the run early.
    pub cancel: Option<&'a AtomicBool>,
}

fn failed_record(bundle: &PromptBundle, error: &super::BackendError) -> ResponseRecord {
    ResponseRecord {
        respondent_index: bundle.respondent_index,
        question_id: bundle.question_id.clone(),
        condition: bundle.condition,
        raw_text: String::new(),
        status: ResponseStatus::TransportFailed,
        option_index: None,
        attempts: error.attempts(),
        error: Some(error.to_string()),
    }
}

/// Ask every respondent one question under one condition.
///
/// Returns one record per profile, in profile order. Per-respondent backend
/// failures become `TransportFailed` records; only configuration problems are
/// errors. With a checkpoint, finished records (any status other than
/// `TransportFailed`) are reused and new ones are appended as they complete.
pub fn run_survey(
    population: &[RespondentProfile],
    question: &Question,
    condition: ConditionId,
    codebook: &Codebook,
    backend: &dyn Backend,
    options: &SurveyOptions<'_>,
) -> Result<Vec<ResponseRecord>, RunError> {
    if population.is_empty() {
        return Err(RunError::Config("population is empty".into()));
    }
    if options.max_in_flight == 0 {
        return Err(RunError::Config("max_in_flight must be at least 1".into()));
    }
    render_user_prompt(question, codebook, condition).map_err(|e| RunError::Config(e.to_string()))?;
    let bundles = population
        .iter()
        .map(|p| render_bundle(p, question, codebook, condition, options.survey_date))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| RunError::Config(e.to_string()))?;

    let mut done: HashMap<usize, ResponseRecord> = match options.checkpoint {
        Some(store) => store
            .load(options.run_id, &question.id, condition)?
            .into_iter()
            .filter(|(_, r)| r.status != ResponseStatus::TransportFailed)
            .collect(),
        None => HashMap::new(),
    };
    let pending: Vec<&PromptBundle> = bundles
        .iter()
        .filter(|b| !done.contains_key(&b.respondent_index))
        .collect();
    if !done.is_empty() {
        info!(
            "`{}` {condition}: resuming with {} of {} respondents already answered",
            question.id,
            done.len(),
            bundles.len()
        );
    }

    let cursor = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(pending.len()));
    let checkpoint_error = Mutex::new(None);
    let workers = options.max_in_flight.min(pending.len());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if options.cancel.is_some_and(|c| c.load(Ordering::SeqCst)) {
                    break;
                }
                let slot = cursor.fetch_add(1, Ordering::SeqCst);
                let Some(bundle) = pending.get(slot) else { break };
                let record = match backend.generate(bundle) {
                    Ok(result) => {
                        let mut r = options.parser.record(bundle.respondent_index, question, condition, result.raw_text);
                        r.attempts = result.attempt_count;
                        finalize_record(r, question)
                    }
                    Err(e) => failed_record(bundle, &e),
                };
                if let Some(store) = options.checkpoint {
                    if let Err(e) = store.append(options.run_id, &record) {
                        *checkpoint_error.lock().unwrap() = Some(e);
                        if let Some(c) = options.cancel {
                            c.store(true, Ordering::SeqCst);
                        }
                        break;
                    }
                }
                results.lock().unwrap().push(record);
            });
        }
    });
    if let Some(e) = checkpoint_error.into_inner().unwrap() {
        return Err(RunError::Checkpoint(e));
    }
    for record in results.into_inner().unwrap() {
        done.insert(record.respondent_index, record);
    }
    if done.len() < bundles.len() {
        return Err(RunError::Interrupted {
            completed: done.len(),
            total: bundles.len(),
        });
    }
    Ok(population
        .iter()
        .map(|p| done.remove(&p.index).expect("every respondent answered"))
        .collect())
}
