//! The normalized rank score and the harmonic-mean aggregate.

use crate::{MetricError, Result};

/// Normalized rank score: r/k for ranks inside the top k, saturating at 1
/// once the token has left the candidate window.
///
/// Ranks are 1-based; `r >= 1` and `k >= 1` are caller contracts.
pub fn score_at_k(r: usize, k: usize) -> f64 {
    assert!(r >= 1, "ranks are 1-based");
    assert!(k >= 1, "candidate cap must be positive");
    if r >= k {
        1.0
    } else {
        r as f64 / k as f64
    }
}

/// Harmonic mean of fractions, with the limit convention that any zero
/// component pulls the mean to zero.
///
/// The empty list is a domain error, and every value must be a fraction in
/// [0, 1]: this aggregate is only ever applied to scores.
pub fn harmonic_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(MetricError::EmptyAggregate);
    }
    for &v in values {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(MetricError::InvalidScore { what: "harmonic-mean input".into(), value: v });
        }
    }
    if values.iter().any(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let denom: f64 = values.iter().map(|v| 1.0 / v).sum();
    Ok(values.len() as f64 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_examples_match_the_normalized_rank_formula() {
        assert_eq!(score_at_k(1, 100), 0.01);
        assert_eq!(score_at_k(150, 100), 1.0);
        assert_eq!(score_at_k(50, 100), 0.5);
        assert_eq!(score_at_k(100, 100), 1.0);
        assert_eq!(score_at_k(19, 20), 0.95);
    }

    #[test]
    fn score_saturates_exactly_at_the_cap() {
        for r in 1..50 {
            let s = score_at_k(r, 20);
            if r >= 20 {
                assert_eq!(s, 1.0);
            } else {
                assert!(s < 1.0);
            }
        }
    }

    #[test]
    fn harmonic_mean_is_idempotent_on_equal_inputs() {
        for x in [0.25, 0.5, 1.0] {
            let hm = harmonic_mean(&[x, x, x]).unwrap();
            assert!((hm - x).abs() < 1e-12);
        }
    }

    #[test]
    fn any_zero_component_annihilates_the_mean() {
        assert_eq!(harmonic_mean(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(harmonic_mean(&[0.0, 0.9, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn three_component_mean_matches_direct_formula() {
        let hm = harmonic_mean(&[0.9888, 0.8967, 0.8217]).unwrap();
        assert!((hm - 0.8973).abs() < 5e-5, "got {hm}");
        let direct = 3.0 / (1.0 / 0.9888 + 1.0 / 0.8967 + 1.0 / 0.8217);
        assert_eq!(hm, direct);
    }

    #[test]
    fn empty_list_is_a_domain_error() {
        assert!(matches!(harmonic_mean(&[]), Err(MetricError::EmptyAggregate)));
    }

    #[test]
    fn out_of_range_inputs_are_rejected() {
        assert!(harmonic_mean(&[0.5, 1.5]).is_err());
        assert!(harmonic_mean(&[-0.1]).is_err());
        assert!(harmonic_mean(&[f64::NAN]).is_err());
    }
}
