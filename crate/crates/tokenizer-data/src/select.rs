//! Unlearn-token selection over a secret sequence. Rarity equals token id by
//! the vocabulary invariant, so "rarest" is simply "highest id". Duplicate
//! ids keep their first (lowest) position in the secret; that ascending-
//! position rule is the only tie-break among equal-rarity candidates.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::TokenPos;
use crate::{DataError, Result};

/// How to pick which secret tokens get unlearned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenStrategy {
    /// Highest-id (rarest) tokens; the method's default.
    Rarest,
    /// Lowest-id (most frequent) tokens.
    MostFrequent,
    /// First tokens in sequence order.
    First,
    /// Seeded uniform choice.
    Random,
}

/// Picks `count` distinct tokens of `secret` to unlearn, excluding
/// `exclusions`, and returns them with their positions in ascending position
/// order.
///
/// # Errors
/// `Selection` if fewer than `count` distinct eligible tokens remain;
/// `target` in the error names the secret by its token ids.
pub fn select_unlearn_tokens(
    secret: &[usize],
    strategy: TokenStrategy,
    count: usize,
    exclusions: &BTreeSet<usize>,
    seed: u64,
) -> Result<Vec<TokenPos>> {
    let mut seen = BTreeSet::new();
    let mut eligible: Vec<TokenPos> = Vec::new();
    for (pos, &id) in secret.iter().enumerate() {
        if exclusions.contains(&id) || !seen.insert(id) {
            continue;
        }
        eligible.push(TokenPos { id, pos });
    }
    if eligible.len() < count {
        return Err(DataError::Selection {
            target: format!("secret {secret:?}"),
            reason: format!(
                "{} eligible tokens after exclusions, {count} requested",
                eligible.len()
            ),
        });
    }

    let mut chosen = match strategy {
        TokenStrategy::Rarest => {
            let mut e = eligible;
            e.sort_by(|a, b| b.id.cmp(&a.id));
            e.truncate(count);
            e
        }
        TokenStrategy::MostFrequent => {
            let mut e = eligible;
            e.sort_by(|a, b| a.id.cmp(&b.id));
            e.truncate(count);
            e
        }
        TokenStrategy::First => {
            let mut e = eligible;
            e.truncate(count);
            e
        }
        TokenStrategy::Random => {
            let mut e = eligible;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            e.shuffle(&mut rng);
            e.truncate(count);
            e
        }
    };
    chosen.sort_by_key(|t| t.pos);
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(pairs: &[(usize, usize)]) -> Vec<TokenPos> {
        pairs.iter().map(|&(id, pos)| TokenPos { id, pos }).collect()
    }

    #[test]
    fn rarest_picks_highest_ids_outside_exclusions() {
        // wis(49143) and avid(15567) are the rarest after dropping the
        // email-suffix tokens.
        let secret = [273, 49143, 962, 15567, 72876, 916];
        let excl: BTreeSet<usize> = [72876, 916].into_iter().collect();
        let got = select_unlearn_tokens(&secret, TokenStrategy::Rarest, 2, &excl, 0).unwrap();
        assert_eq!(got, ids(&[(49143, 1), (15567, 3)]));
    }

    #[test]
    fn first_takes_sequence_order() {
        let secret = [273, 49143, 962, 15567];
        let excl: BTreeSet<usize> = [273].into_iter().collect();
        let got = select_unlearn_tokens(&secret, TokenStrategy::First, 2, &excl, 0).unwrap();
        assert_eq!(got, ids(&[(49143, 1), (962, 2)]));
    }

    #[test]
    fn most_frequent_takes_lowest_ids() {
        let secret = [273, 49143, 962, 15567];
        let got =
            select_unlearn_tokens(&secret, TokenStrategy::MostFrequent, 2, &BTreeSet::new(), 0)
                .unwrap();
        assert_eq!(got, ids(&[(273, 0), (962, 2)]));
    }

    #[test]
    fn duplicates_keep_first_position() {
        let secret = [9, 9, 5];
        let got =
            select_unlearn_tokens(&secret, TokenStrategy::Rarest, 2, &BTreeSet::new(), 0).unwrap();
        assert_eq!(got, ids(&[(9, 0), (5, 2)]));
    }

    #[test]
    fn random_is_reproducible_and_seed_sensitive() {
        let secret: Vec<usize> = (10..30).collect();
        let a = select_unlearn_tokens(&secret, TokenStrategy::Random, 5, &BTreeSet::new(), 7)
            .unwrap();
        let b = select_unlearn_tokens(&secret, TokenStrategy::Random, 5, &BTreeSet::new(), 7)
            .unwrap();
        assert_eq!(a, b);
        let c = select_unlearn_tokens(&secret, TokenStrategy::Random, 5, &BTreeSet::new(), 8)
            .unwrap();
        assert_ne!(a, c, "distinct seeds should differ on a 20-token secret");
    }

    #[test]
    fn too_few_eligible_tokens_is_an_error() {
        let secret = [4, 4, 4];
        let err = select_unlearn_tokens(&secret, TokenStrategy::Rarest, 2, &BTreeSet::new(), 0);
        assert!(matches!(err, Err(DataError::Selection { .. })));
    }
}
