use serde::{Deserialize, Serialize};

/// Counts of silicon records that did not contribute to a distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureTally {
    pub refusal: u64,
    pub out_of_range: u64,
    pub malformed: u64,
    pub transport_failed: u64,
}

impl FailureTally {
    pub fn total(&self) -> u64 {
        self.refusal + self.out_of_range + self.malformed + self.transport_failed
    }
}

/// Categorical distribution over a question's options `1..=n` (index 0 holds option 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub question_id: String,
    pub probabilities: Vec<f64>,
    pub sample_count: u64,
    #[serde(default)]
    pub failure_tally: FailureTally,
}

impl Distribution {
    /// Normalise integer counts. Returns `None` when every count is zero.
    pub fn from_counts(question_id: impl Into<String>, counts: &[u64]) -> Option<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return None;
        }
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Some(Self {
            question_id: question_id.into(),
            probabilities,
            sample_count: total,
            failure_tally: FailureTally::default(),
        })
    }

    /// Build from raw probabilities, e.g. published or synthetic reference vectors.
    pub fn from_probabilities(question_id: impl Into<String>, probabilities: Vec<f64>) -> Self {
        Self {
            question_id: question_id.into(),
            probabilities,
            sample_count: 0,
            failure_tally: FailureTally::default(),
        }
    }

    pub fn support_size(&self) -> usize {
        self.probabilities.len()
    }

    /// Probability of 1-based option `k`.
    pub fn prob(&self, option: usize) -> f64 {
        self.probabilities[option - 1]
    }

    /// Reverse the option order (the vector image of the reverse-code remap).
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.probabilities.reverse();
        out
    }
}

/// Total-variation distance between two probability vectors of equal length.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "support mismatch");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_normalise() {
        let d = Distribution::from_counts("q", &[1, 1, 2]).unwrap();
        assert_eq!(d.probabilities, vec![0.25, 0.25, 0.5]);
        assert_eq!(d.sample_count, 4);
        assert!(Distribution::from_counts("q", &[0, 0]).is_none());
    }

    #[test]
    fn tv_distance() {
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert_eq!(total_variation(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
    }
}
