//! Model hyperparameters.

use serde::{Deserialize, Serialize};

use crate::{ModelError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub d_model: usize,
    pub d_ff: usize,
    pub n_layers: usize,
    pub n_heads: usize,
    pub context_len: usize,
}

impl ModelConfig {
    /// Desk-scale defaults; `vocab_size` comes from the corpus.
    pub fn desk_default(vocab_size: usize) -> Self {
        Self {
            vocab_size,
            d_model: 64,
            d_ff: 256,
            n_layers: 4,
            n_heads: 2,
            context_len: 64,
        }
    }

    pub fn head_dim(&self) -> usize {
        self.d_model / self.n_heads
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(ModelError::Config(msg));
        if self.vocab_size < 4 {
            return err(format!("vocab_size {} is too small", self.vocab_size));
        }
        if self.d_model == 0 || self.d_ff == 0 || self.n_layers == 0 || self.context_len == 0 {
            return err("all dimensions must be positive".into());
        }
        if self.n_heads == 0 || self.d_model % self.n_heads != 0 {
            return err(format!(
                "n_heads {} must divide d_model {}",
                self.n_heads, self.d_model
            ));
        }
        // The unembedding pseudoinverse needs more rows than columns.
        if self.vocab_size <= self.d_model {
            return err(format!(
                "vocab_size {} must exceed d_model {}",
                self.vocab_size, self.d_model
            ));
        }
        Ok(())
    }
}
