//! Token-rank extraction. Rank 1 means "most probable". Both kernels are a
//! single O(len) counting pass; no sort is performed, which keeps them cheap
//! inside the editing loop where they run once per candidate neuron.

use crate::{LinalgError, Rank, Result};

fn check(logits: &[f64], token: usize, context: &'static str) -> Result<f64> {
    if token >= logits.len() {
        return Err(LinalgError::TokenOutOfRange { token, len: logits.len() });
    }
    if logits.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite { context });
    }
    Ok(logits[token])
}

/// 1-based position of `token` when `logits` is sorted descending, ties
/// broken by ascending token id.
pub fn rank_of_token(logits: &[f64], token: usize) -> Result<Rank> {
    let vt = check(logits, token, "rank_of_token")?;
    let mut rank = 1;
    for (j, &v) in logits.iter().enumerate() {
        if v > vt || (v == vt && j < token) {
            rank += 1;
        }
    }
    Ok(rank)
}

/// 1-based position of `token` when `logits` is sorted ascending, ties broken
/// by descending token id — the mirror of [`rank_of_token`], so that
/// `rank_of_token(v, t) + rank_from_bottom(v, t) == v.len() + 1` for every
/// token of every finite vector, ties included.
pub fn rank_from_bottom(logits: &[f64], token: usize) -> Result<Rank> {
    let vt = check(logits, token, "rank_from_bottom")?;
    let mut rank = 1;
    for (j, &v) in logits.iter().enumerate() {
        if v < vt || (v == vt && j > token) {
            rank += 1;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_logit_is_rank_one() {
        assert_eq!(rank_of_token(&[0.5, 2.0, 1.0], 1).unwrap(), 1);
    }

    #[test]
    fn tie_broken_by_ascending_id() {
        // Token 0 wins rank 1 on the tie, pushing token 1 to rank 2.
        assert_eq!(rank_of_token(&[3.0, 3.0, 1.0], 1).unwrap(), 2);
        assert_eq!(rank_of_token(&[3.0, 3.0, 1.0], 0).unwrap(), 1);
    }

    #[test]
    fn smallest_logit_is_bottom_rank_one() {
        assert_eq!(rank_from_bottom(&[0.5, 2.0, 1.0], 0).unwrap(), 1);
    }

    #[test]
    fn out_of_range_token_rejected() {
        assert!(matches!(
            rank_of_token(&[1.0, 2.0], 2),
            Err(LinalgError::TokenOutOfRange { token: 2, len: 2 })
        ));
        assert!(rank_from_bottom(&[1.0, 2.0], 5).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            rank_of_token(&[1.0, f64::NAN], 0),
            Err(LinalgError::NonFinite { .. })
        ));
    }

    #[test]
    fn top_and_bottom_ranks_are_complementary_under_ties() {
        let v = [1.0, 3.0, 3.0, -2.0, 3.0, 1.0];
        let n = v.len();
        for t in 0..n {
            let top = rank_of_token(&v, t).unwrap();
            let bottom = rank_from_bottom(&v, t).unwrap();
            assert_eq!(top + bottom, n + 1, "token {t}");
        }
    }
}
