//! Silicon population generation by independent draws from empirical marginals.
//!
//! Each `(respondent, variable)` draw uses its own sub-seed
//! (`derive_sub_seed(master_seed, index, variable_code)`) and inverse-CDF lookup
//! over the marginal's ascending values, so the population is identical however
//! the work is scheduled and adding a variable leaves existing draws untouched.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codebook::{Codebook, Marginal, MarginalSet};
use crate::seed::{derive_sub_seed, unit_uniform};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SamplerError {
    #[error("marginal for `{0}` has no positive mass")]
    EmptyMarginal(String),
    #[error("no marginal for variable `{0}`")]
    MissingMarginal(String),
    #[error("population size must be at least 1")]
    EmptyPopulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub population_size: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RespondentProfile {
    pub index: usize,
    /// Variable code → level code (or integer value for numeric variables).
    pub assignments: BTreeMap<String, i64>,
}

impl RespondentProfile {
    pub fn get(&self, code: &str) -> Option<i64> {
        self.assignments.get(code).copied()
    }
}

/// Inverse-CDF categorical draw: the first value whose cumulative mass exceeds `u`.
pub fn draw_categorical(values: &[i64], probabilities: &[f64], u: f64) -> Option<i64> {
    let mut cumulative = 0.0;
    let mut last_positive = None;
    for (&v, &p) in values.iter().zip(probabilities) {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last_positive = Some(v);
        if u < cumulative {
            return Some(v);
        }
    }
    // rounding can leave the final cumulative a hair below 1
    last_positive
}

fn draw(marginal: &Marginal, master_seed: u64, index: usize) -> Result<i64, SamplerError> {
    let u = unit_uniform(derive_sub_seed(master_seed, index as u64, &marginal.code));
    draw_categorical(&marginal.values, &marginal.probabilities, u)
        .ok_or_else(|| SamplerError::EmptyMarginal(marginal.code.clone()))
}

/// Sample a population over the variables present in `marginals`.
pub fn sample_population(marginals: &MarginalSet, spec: SampleSpec) -> Result<Vec<RespondentProfile>, SamplerError> {
    if spec.population_size == 0 {
        return Err(SamplerError::EmptyPopulation);
    }
    for m in &marginals.marginals {
        if !m.probabilities.iter().any(|&p| p > 0.0) {
            return Err(SamplerError::EmptyMarginal(m.code.clone()));
        }
    }
    (0..spec.population_size)
        .into_par_iter()
        .map(|index| {
            let assignments = marginals
                .marginals
                .iter()
                .map(|m| Ok((m.code.clone(), draw(m, spec.master_seed, index)?)))
                .collect::<Result<_, SamplerError>>()?;
            Ok(RespondentProfile { index, assignments })
        })
        .collect()
}

/// Like [`sample_population`], but first checks that every codebook variable has a marginal.
pub fn sample_for_codebook(
    codebook: &Codebook,
    marginals: &MarginalSet,
    spec: SampleSpec,
) -> Result<Vec<RespondentProfile>, SamplerError> {
    for var in &codebook.variables {
        if marginals.get(&var.code).is_none() {
            return Err(SamplerError::MissingMarginal(var.code.clone()));
        }
    }
    sample_population(marginals, spec)
}
