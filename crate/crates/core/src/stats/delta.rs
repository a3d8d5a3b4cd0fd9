use serde::{Deserialize, Serialize};

use super::{DivergenceEstimate, StatsError};
use crate::prompt::ConditionId;

/// Change in divergence of a condition against a baseline; negative means closer to the humans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub question_id: String,
    pub condition: ConditionId,
    pub baseline_condition: ConditionId,
    pub delta: f64,
    /// The two percentile intervals are disjoint.
    pub significant: bool,
}

pub fn delta(candidate: &DivergenceEstimate, baseline: &DivergenceEstimate) -> Result<DeltaReport, StatsError> {
    if candidate.question_id != baseline.question_id {
        return Err(StatsError::QuestionMismatch {
            candidate: candidate.question_id.clone(),
            baseline: baseline.question_id.clone(),
        });
    }
    let significant = candidate.ci_high < baseline.ci_low || baseline.ci_high < candidate.ci_low;
    Ok(DeltaReport {
        question_id: candidate.question_id.clone(),
        condition: candidate.condition,
        baseline_condition: baseline.condition,
        delta: candidate.point - baseline.point,
        significant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(condition: ConditionId, point: f64, lo: f64, hi: f64) -> DivergenceEstimate {
        DivergenceEstimate {
            question_id: "q".into(),
            condition,
            point,
            ci_low: lo,
            ci_high: hi,
            replicate_count: 2000,
            sample_count: 0,
        }
    }

    #[test]
    fn self_comparison() {
        let a = est(ConditionId::Replicate, 0.2, 0.1, 0.3);
        let d = delta(&a, &a).unwrap();
        assert_eq!(d.delta, 0.0);
        assert!(!d.significant);
    }

    #[test]
    fn overlapping_not_significant() {
        let base = est(ConditionId::Replicate, 0.15, 0.10, 0.20);
        let cand = est(ConditionId::Priming, 0.22, 0.19, 0.25);
        assert!(!delta(&cand, &base).unwrap().significant);
    }

    #[test]
    fn touching_intervals_overlap() {
        let base = est(ConditionId::Replicate, 0.15, 0.10, 0.20);
        let cand = est(ConditionId::Priming, 0.22, 0.20, 0.25);
        assert!(!delta(&cand, &base).unwrap().significant);
    }

    #[test]
    fn question_mismatch() {
        let a = est(ConditionId::Replicate, 0.2, 0.1, 0.3);
        let mut b = a.clone();
        b.question_id = "other".into();
        assert!(matches!(delta(&a, &b), Err(StatsError::QuestionMismatch { .. })));
    }
}
