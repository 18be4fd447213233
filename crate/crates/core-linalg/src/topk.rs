//! Index selection consistent with the rank kernels: a token is in the top-k
//! selection exactly when `rank_of_token <= k`, and in the bottom-k selection
//! exactly when `rank_from_bottom <= k`. That equivalence is what lets the
//! attack candidate sets compose with rank-based scores.

use crate::{LinalgError, Result};

fn check(values: &[f64], k: usize, context: &'static str) -> Result<()> {
    if k > values.len() {
        return Err(LinalgError::KTooLarge { k, len: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite { context });
    }
    Ok(())
}

/// Indices of the `k` largest entries, ordered descending by value with ties
/// broken by ascending index.
pub fn top_k_indices(values: &[f64], k: usize) -> Result<Vec<usize>> {
    check(values, k, "top_k_indices")?;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finiteness checked above")
            .then_with(|| a.cmp(&b))
    });
    idx.truncate(k);
    Ok(idx)
}

/// Indices of the `k` smallest entries, ordered ascending by value with ties
/// broken by descending index (the mirror rule of `rank_from_bottom`).
pub fn bottom_k_indices(values: &[f64], k: usize) -> Result<Vec<usize>> {
    check(values, k, "bottom_k_indices")?;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finiteness checked above")
            .then_with(|| b.cmp(&a))
    });
    idx.truncate(k);
    Ok(idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_largest_two() {
        assert_eq!(top_k_indices(&[5.0, 1.0, 9.0], 2).unwrap(), vec![2, 0]);
    }

    #[test]
    fn tie_break_by_index() {
        assert_eq!(top_k_indices(&[2.0, 2.0, 2.0], 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn k_over_len_rejected() {
        assert!(matches!(
            top_k_indices(&[1.0], 2),
            Err(LinalgError::KTooLarge { k: 2, len: 1 })
        ));
    }

    #[test]
    fn bottom_mirrors_top() {
        assert_eq!(bottom_k_indices(&[5.0, 1.0, 9.0], 2).unwrap(), vec![1, 0]);
        // Ties resolved toward the larger index on the bottom side.
        assert_eq!(bottom_k_indices(&[2.0, 2.0, 2.0], 2).unwrap(), vec![2, 1]);
    }
}
