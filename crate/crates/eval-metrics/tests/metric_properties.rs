//! Property tests for the score kernels and aggregates.

use eval_metrics::{aggregate_splits, harmonic_mean, score_at_k};
use proptest::prelude::*;

proptest! {
    #[test]
    fn score_is_monotone_in_rank_and_saturates_at_the_cap(
        k in 1usize..500,
        r1 in 1usize..3000,
        r2 in 1usize..3000,
    ) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(score_at_k(lo, k) <= score_at_k(hi, k));
        prop_assert_eq!(score_at_k(lo, k) == 1.0, lo >= k);
    }

    #[test]
    fn harmonic_mean_never_exceeds_arithmetic_mean(
        values in prop::collection::vec(0.01f64..=1.0, 1..8),
    ) {
        let hm = harmonic_mean(&values).unwrap();
        let am = values.iter().sum::<f64>() / values.len() as f64;
        prop_assert!(hm <= am + 1e-12, "hm {} > am {}", hm, am);
    }

    #[test]
    fn harmonic_mean_sits_between_min_and_max(
        values in prop::collection::vec(0.01f64..=1.0, 1..8),
    ) {
        let hm = harmonic_mean(&values).unwrap();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!(hm >= min - 1e-12 && hm <= max + 1e-12);
    }

    #[test]
    fn split_aggregation_is_bounded_by_extremes(
        values in prop::collection::vec(0.0f64..=1.0, 1..10),
    ) {
        let s = aggregate_splits(&values).unwrap();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(0.0f64, f64::max);
        prop_assert!(s.mean >= min - 1e-12 && s.mean <= max + 1e-12);
        prop_assert!(s.std >= 0.0);
        prop_assert_eq!(s.per_split.len(), values.len());
    }
}
