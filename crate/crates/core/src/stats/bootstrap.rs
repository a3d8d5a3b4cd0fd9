//! Percentile bootstrap over silicon responses.
//!
//! The human distribution is held fixed. Each replicate resamples the parsed
//! option indices with replacement to the original count, re-aggregates and
//! recomputes the divergence. Replicate `r` draws from a ChaCha8 stream seeded
//! with `derive_sub_seed(seed, r, "bootstrap")`, so replicates are independent
//! of scheduling. Interval endpoints are linearly interpolated empirical
//! quantiles (`h = (n - 1)·q`) of the sorted replicate values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::divergence::js_divergence_slices;
use super::StatsError;
use crate::codebook::Question;
use crate::distribution::Distribution;
use crate::prompt::ConditionId;
use crate::response::{tally, ResponseRecord};
use crate::seed::derive_sub_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub confidence_level: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 2000,
            confidence_level: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.replicates == 0 {
            return Err(StatsError::InvalidConfig("replicates must be at least 1".into()));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(StatsError::InvalidConfig(format!(
                "confidence_level {} outside (0, 1)",
                self.confidence_level
            )));
        }
        Ok(())
    }

    /// Same settings with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEstimate {
    pub question_id: String,
    pub condition: ConditionId,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replicate_count: usize,
    /// Parsed silicon records behind the estimate.
    pub sample_count: u64,
}

/// Linearly interpolated quantile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bootstrap the JSD between `human` and the empirical distribution of `options`
/// (0-based option indices). Returns `(point, ci_low, ci_high)`.
pub fn bootstrap_options(
    human: &[f64],
    options: &[usize],
    config: &BootstrapConfig,
) -> Result<(f64, f64, f64), StatsError> {
    config.validate()?;
    let n_options = human.len();
    let m = options.len();
    if m == 0 {
        return Err(StatsError::Data("no observations to resample".into()));
    }
    let empirical = |counts: &[u64]| -> Vec<f64> { counts.iter().map(|&c| c as f64 / m as f64).collect() };

    let mut counts = vec![0u64; n_options];
    for &o in options {
        counts[o] += 1;
    }
    let point = js_divergence_slices(human, &empirical(&counts))?;

    let mut replicates: Vec<f64> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_sub_seed(config.seed, r as u64, "bootstrap"));
            let mut counts = vec![0u64; n_options];
            for _ in 0..m {
                counts[options[rng.gen_range(0..m)]] += 1;
            }
            js_divergence_slices(human, &empirical(&counts)).expect("equal supports")
        })
        .collect();
    replicates.sort_by(f64::total_cmp);
    let alpha = 1.0 - config.confidence_level;
    Ok((
        point,
        percentile(&replicates, alpha / 2.0),
        percentile(&replicates, 1.0 - alpha / 2.0),
    ))
}

/// Point JSD and percentile interval for one question/condition cell.
pub fn bootstrap_jsd(
    human: &Distribution,
    silicon_records: &[ResponseRecord],
    question: &Question,
    config: &BootstrapConfig,
) -> Result<DivergenceEstimate, StatsError> {
    if human.support_size() != question.n_options() {
        return Err(StatsError::SupportMismatch {
            left: human.support_size(),
            right: question.n_options(),
        });
    }
    let condition = match silicon_records.first() {
        Some(first) => first.condition,
        None => return Err(StatsError::NoParsedResponses(question.id.clone())),
    };
    if let Some(other) = silicon_records.iter().find(|r| r.condition != condition) {
        return Err(StatsError::MixedConditions(condition, other.condition));
    }
    // validates question ids and option ranges
    tally(silicon_records, question)?;
    let options: Vec<usize> = silicon_records
        .iter()
        .filter(|r| r.is_parsed())
        .filter_map(|r| r.option_index)
        .map(|k| k - 1)
        .collect();
    if options.is_empty() {
        return Err(StatsError::NoParsedResponses(question.id.clone()));
    }
    let (point, ci_low, ci_high) = bootstrap_options(&human.probabilities, &options, config)?;
    Ok(DivergenceEstimate {
        question_id: question.id.clone(),
        condition,
        point,
        ci_low,
        ci_high,
        replicate_count: config.replicates,
        sample_count: options.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_interpolates() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&xs, 0.0), 0.0);
        assert_eq!(percentile(&xs, 1.0), 4.0);
        assert_eq!(percentile(&xs, 0.5), 2.0);
        assert!((percentile(&xs, 0.125) - 0.5).abs() < 1e-15);
        assert_eq!(percentile(&[7.0], 0.3), 7.0);
    }

    #[test]
    fn zero_variance() {
        let cfg = BootstrapConfig { replicates: 50, ..Default::default() };
        assert_eq!(bootstrap_options(&[1.0, 0.0, 0.0], &[0; 20], &cfg).unwrap(), (0.0, 0.0, 0.0));
        assert_eq!(bootstrap_options(&[0.0, 1.0, 0.0], &[0; 20], &cfg).unwrap(), (1.0, 1.0, 1.0));
    }

    #[test]
    fn invalid_configs() {
        let bad = BootstrapConfig { replicates: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = BootstrapConfig { confidence_level: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
