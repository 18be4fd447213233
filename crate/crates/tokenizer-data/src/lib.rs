//! Deterministic word-level tokenizer with frequency-ranked token ids, plus
//! the synthetic sensitive-data generator that produces the train, forget,
//! retain, and generalization splits.
//!
//! The vocabulary assigns ids by descending corpus frequency (ties broken
//! lexicographically), so a higher id means a rarer token. That makes the
//! "rarity is approximated by token id" rule exact by construction, which the
//! unlearn-token selection relies on.

#![forbid(unsafe_code)]

pub mod canon;
mod dataset;
mod generate;
mod select;
mod templates;
mod vocab;

pub use dataset::{Split, SyntheticDataset, TargetSpec, TokenPos};
pub use generate::{generate_ssn_dataset, DatasetConfig};
pub use select::{select_unlearn_tokens, TokenStrategy};
pub use templates::{domains, templates_in_domain, TEMPLATE_COUNT};
pub use vocab::{build_vocabulary, Vocabulary, BOS, PAD, UNK};

/// Errors from vocabulary construction, dataset generation, and dataset I/O.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    /// A dataset configuration that cannot be satisfied.
    #[error("dataset config: {0}")]
    Config(String),
    /// Vocabulary construction over an empty corpus.
    #[error("corpus is empty")]
    EmptyCorpus,
    /// Unlearn-token selection could not satisfy the requested count.
    #[error("token selection for {target}: {reason}")]
    Selection { target: String, reason: String },
    /// A dataset file that violates its own schema or invariants.
    #[error("invalid dataset: {0}")]
    Invalid(String),
    /// Serialization failure.
    #[error("dataset json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, DataError>;
