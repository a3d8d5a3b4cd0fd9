use super::StatsError;
use crate::distribution::Distribution;

/// `Σ p·log2(p/m)` with `0·log(0/·) = 0`.
pub fn kl_divergence_slices(p: &[f64], m: &[f64]) -> Result<f64, StatsError> {
    if p.len() != m.len() {
        return Err(StatsError::SupportMismatch { left: p.len(), right: m.len() });
    }
    let mut total = 0.0;
    for (i, (&a, &b)) in p.iter().zip(m).enumerate() {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            return Err(StatsError::SupportViolation { option: i + 1 });
        }
        total += a * (a / b).log2();
    }
    Ok(total.max(0.0))
}

/// Base-2 Jensen–Shannon divergence; lies in `[0, 1]`.
pub fn js_divergence_slices(p: &[f64], q: &[f64]) -> Result<f64, StatsError> {
    if p.len() != q.len() {
        return Err(StatsError::SupportMismatch { left: p.len(), right: q.len() });
    }
    let mut left = 0.0;
    let mut right = 0.0;
    let mut overlap = false;
    for (&a, &b) in p.iter().zip(q) {
        let m = (a + b) / 2.0;
        if a > 0.0 {
            left += a * (a / m).log2();
        }
        if b > 0.0 {
            right += b * (b / m).log2();
        }
        overlap |= a > 0.0 && b > 0.0;
    }
    if !overlap && p.iter().any(|&a| a > 0.0) && q.iter().any(|&b| b > 0.0) {
        // disjoint supports: exactly 1, independent of rounding in the input sums
        return Ok(1.0);
    }
    Ok((0.5 * left + 0.5 * right).clamp(0.0, 1.0))
}

pub fn kl_divergence(p: &Distribution, m: &Distribution) -> Result<f64, StatsError> {
    kl_divergence_slices(&p.probabilities, &m.probabilities)
}

pub fn js_divergence(p: &Distribution, q: &Distribution) -> Result<f64, StatsError> {
    js_divergence_slices(&p.probabilities, &q.probabilities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence_slices(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(kl_divergence_slices(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(
            kl_divergence_slices(&[0.5, 0.5], &[1.0, 0.0]),
            Err(StatsError::SupportViolation { option: 2 })
        );
        assert!(matches!(
            kl_divergence_slices(&[1.0], &[0.5, 0.5]),
            Err(StatsError::SupportMismatch { .. })
        ));
    }

    #[test]
    fn jsd_examples() {
        assert_eq!(js_divergence_slices(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(js_divergence_slices(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(js_divergence_slices(&[1.0, 0.0, 0.0], &[0.0, 0.5, 0.5]).unwrap(), 1.0);
    }
}
