//! A small decoder-only transformer with hand-derived backpropagation.
//!
//! The model is deliberately plain: pre-norm blocks, learned absolute
//! positional embeddings, multi-head causal attention without biases, a
//! non-gated GELU MLP, and an untied unembedding. All arithmetic is f64 in
//! memory; checkpoints store f32. Everything is single-threaded and seeded,
//! so a given `(config, data, seed)` triple always produces the same bytes.

#![forbid(unsafe_code)]

mod adam;
mod backward;
mod checkpoint;
mod config;
mod crc;
mod decode;
mod forward;
mod math;
mod params;
mod train;

pub use adam::AdamState;
pub use backward::{activation_gradients_last, backward, loss_and_dlogits, nll_dlogits};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_FORMAT};
pub use config::ModelConfig;
pub use crc::crc32c;
pub use decode::{greedy_decode, reproduces};
pub use forward::{forward, ForwardCache, Logits, LogitsMode};
pub use params::{BlockParams, LayerNormParams, Parameters, TensorView};
pub use train::{train, TrainConfig, TrainLog};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    Config(String),
    #[error("sequence error: {0}")]
    Sequence(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("linear algebra error: {0}")]
    Linalg(#[from] core_linalg::LinalgError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ModelError>;
