//! Benchmark fixtures shared by the criterion targets.

use silsamp_core::codebook::{Marginal, MarginalSet};

/// Deterministic pseudo-random probability vector of length `n`.
pub fn probabilities(n: usize, salt: u64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|i| {
            let u = silsamp_core::seed::unit_uniform(silsamp_core::derive_sub_seed(salt, i as u64, "bench"));
            u + 0.01
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Eight marginals shaped like the bundled codebook (one wide numeric one).
pub fn marginals() -> MarginalSet {
    let sizes = [6usize, 2, 7, 7, 2, 63, 2, 4];
    MarginalSet {
        marginals: sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| Marginal {
                code: format!("V{i}"),
                values: (1..=n as i64).collect(),
                probabilities: probabilities(n, i as u64),
                valid_count: 5441,
            })
            .collect(),
    }
}

/// `n` zero-based option indices drawn from `probs`.
pub fn options(probs: &[f64], n: usize, salt: u64) -> Vec<usize> {
    let values: Vec<i64> = (0..probs.len() as i64).collect();
    (0..n)
        .map(|i| {
            let u = silsamp_core::seed::unit_uniform(silsamp_core::derive_sub_seed(salt, i as u64, "draw"));
            silsamp_core::sampler::draw_categorical(&values, probs, u).expect("positive mass") as usize
        })
        .collect()
}
