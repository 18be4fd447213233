//! Character-level prompt perturbation: seeded insertions into the
//! detokenized prompt text, which then gets re-tokenized for probing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

fn default_insert_char() -> String {
    " ".to_string()
}
fn default_n_insertions() -> usize {
    10
}
fn default_after_prompt() -> bool {
    true
}

/// What to insert, how many times, and where the randomness comes from.
///
/// The `n_insertions` random insertion points are distinct character
/// boundaries of the original text; `insert_after_prompt` additionally
/// appends the string once at the very end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationSpec {
    pub insert_char: String,
    pub n_insertions: usize,
    pub insert_after_prompt: bool,
    pub seed: u64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            insert_char: default_insert_char(),
            n_insertions: default_n_insertions(),
            insert_after_prompt: default_after_prompt(),
            seed: 0,
        }
    }
}

impl PerturbationSpec {
    /// Returns the perturbed text. Insertion points are sampled without
    /// replacement from the character boundaries `0..=chars`, capped at the
    /// number of boundaries, and applied from the back so earlier offsets
    /// stay valid.
    pub fn apply(&self, text: &str) -> String {
        let mut boundaries: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        boundaries.push(text.len());

        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        let n = self.n_insertions.min(boundaries.len());
        let mut chosen: Vec<usize> =
            boundaries.choose_multiple(&mut rng, n).copied().collect();
        chosen.sort_unstable();

        let mut out = text.to_string();
        if self.insert_after_prompt {
            out.push_str(&self.insert_char);
        }
        for &offset in chosen.iter().rev() {
            out.insert_str(offset, &self.insert_char);
        }
        out
    }

    /// True when [`PerturbationSpec::apply`] is the identity on every input.
    pub fn is_identity(&self) -> bool {
        self.insert_char.is_empty() || (self.n_insertions == 0 && !self.insert_after_prompt)
    }
}
