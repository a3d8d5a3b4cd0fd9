//! Per-subgroup divergence along one categorical demographic axis.
//!
//! For each level of the axis, silicon records are filtered through the
//! respondents' profiles and human rows through their raw axis values; every
//! condition present gets its own estimate and non-Replicate conditions get a
//! delta against the level's Replicate estimate. A final `aggregated` row
//! averages the level deltas both unweighted and weighted by the number of
//! valid human answers in each level.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{bootstrap_jsd, delta, BootstrapConfig, DivergenceEstimate, StatsError};
use crate::codebook::{tally_answers, DemographicVariable, HumanDataset, Question};
use crate::distribution::Distribution;
use crate::prompt::ConditionId;
use crate::response::{aggregate, ResponseRecord};
use crate::sampler::RespondentProfile;
use crate::seed::derive_sub_seed;

/// Stratum label of the summary row.
pub const AGGREGATED: &str = "aggregated";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCell {
    pub condition: ConditionId,
    pub silicon: Distribution,
    pub estimate: DivergenceEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumDelta {
    pub condition: ConditionId,
    /// Level delta, or the unweighted mean of level deltas on the aggregated row.
    pub delta: f64,
    /// Interval-overlap significance (levels only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub significant: Option<bool>,
    /// Human-frequency-weighted mean of level deltas (aggregated row only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumReport {
    pub axis: String,
    pub question_id: String,
    pub stratum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_code: Option<i64>,
    /// Valid human answers in this level (all levels on the aggregated row).
    pub human_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human: Option<Distribution>,
    pub cells: Vec<ConditionCell>,
    pub deltas: Vec<StratumDelta>,
    /// `EmptyStratum` diagnostics for this level; they never abort the analysis.
    pub issues: Vec<String>,
}

fn empty(axis: &str, level: &str, reason: impl Into<String>) -> String {
    StatsError::EmptyStratum {
        axis: axis.to_string(),
        level: level.to_string(),
        reason: reason.into(),
    }
    .to_string()
}

pub fn stratify(
    records: &[ResponseRecord],
    profiles: &[RespondentProfile],
    human: &HumanDataset,
    axis: &DemographicVariable,
    question: &Question,
    config: &BootstrapConfig,
) -> Result<Vec<StratumReport>, StatsError> {
    config.validate()?;
    if axis.is_numeric() {
        return Err(StatsError::InvalidAxis(axis.code.clone()));
    }
    let axis_column = human
        .column(&axis.code)
        .ok_or_else(|| StatsError::Data(format!("human data has no column `{}`", axis.code)))?;
    let level_of: HashMap<usize, i64> = profiles
        .iter()
        .filter_map(|p| p.get(&axis.code).map(|v| (p.index, v)))
        .collect();

    let mut by_condition: BTreeMap<ConditionId, Vec<&ResponseRecord>> = BTreeMap::new();
    for r in records {
        if r.question_id != question.id {
            return Err(StatsError::QuestionMismatch {
                candidate: r.question_id.clone(),
                baseline: question.id.clone(),
            });
        }
        by_condition.entry(r.condition).or_default().push(r);
    }

    let mut reports = Vec::with_capacity(axis.levels.len() + 1);
    for level in &axis.levels {
        let mut issues = Vec::new();
        let counts = tally_answers(human, question, |row| axis_column[row] == Some(level.code))
            .map_err(|e| StatsError::Data(e.to_string()))?;
        let human_count: u64 = counts.iter().sum();
        let human_dist = Distribution::from_counts(&question.id, &counts);
        if human_dist.is_none() {
            issues.push(empty(&axis.code, &level.label, "no valid human answers"));
        }

        let mut cells = Vec::new();
        for (&condition, recs) in &by_condition {
            let subset: Vec<ResponseRecord> = recs
                .iter()
                .filter(|r| level_of.get(&r.respondent_index) == Some(&level.code))
                .map(|r| (*r).clone())
                .collect();
            let silicon = match aggregate(&subset, question) {
                Ok(d) => d,
                Err(_) => {
                    issues.push(empty(&axis.code, &level.label, format!("no parsed silicon responses under {condition}")));
                    continue;
                }
            };
            let Some(human_dist) = human_dist.as_ref() else { continue };
            let seed = derive_sub_seed(
                config.seed,
                level.code as u64,
                &format!("stratum/{}/{}/{}", axis.code, question.id, condition.index()),
            );
            let estimate = bootstrap_jsd(human_dist, &subset, question, &config.with_seed(seed))?;
            cells.push(ConditionCell { condition, silicon, estimate });
        }

        let baseline = cells.iter().find(|c| c.condition == ConditionId::Replicate);
        let mut deltas = Vec::new();
        if let Some(base) = baseline {
            for cell in cells.iter().filter(|c| c.condition != ConditionId::Replicate) {
                let d = delta(&cell.estimate, &base.estimate)?;
                deltas.push(StratumDelta {
                    condition: cell.condition,
                    delta: d.delta,
                    significant: Some(d.significant),
                    weighted_delta: None,
                });
            }
        }
        reports.push(StratumReport {
            axis: axis.code.clone(),
            question_id: question.id.clone(),
            stratum: level.label.clone(),
            level_code: Some(level.code),
            human_count,
            human: human_dist,
            cells,
            deltas,
            issues,
        });
    }

    let mut aggregated = Vec::new();
    for &condition in by_condition.keys().filter(|&&c| c != ConditionId::Replicate) {
        let pairs: Vec<(f64, f64)> = reports
            .iter()
            .filter_map(|r| {
                r.deltas
                    .iter()
                    .find(|d| d.condition == condition)
                    .map(|d| (d.delta, r.human_count as f64))
            })
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let unweighted = pairs.iter().map(|(d, _)| d).sum::<f64>() / pairs.len() as f64;
        let weight: f64 = pairs.iter().map(|(_, w)| w).sum();
        let weighted = pairs.iter().map(|(d, w)| d * w).sum::<f64>() / weight;
        aggregated.push(StratumDelta {
            condition,
            delta: unweighted,
            significant: None,
            weighted_delta: Some(weighted),
        });
    }
    let total_human = reports.iter().map(|r| r.human_count).sum();
    reports.push(StratumReport {
        axis: axis.code.clone(),
        question_id: question.id.clone(),
        stratum: AGGREGATED.to_string(),
        level_code: None,
        human_count: total_human,
        human: None,
        cells: Vec::new(),
        deltas: aggregated,
        issues: Vec::new(),
    });
    Ok(reports)
}
