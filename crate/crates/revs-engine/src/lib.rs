//! Rank editing in the vocabulary space: surgical unlearning of memorized
//! token sequences by demoting their rank in selected MLP output neurons.
//!
//! The pipeline is: pick the transformer layers where the target token still
//! ranks high in the hidden state's vocabulary projection, order that layer's
//! FF2 columns by how strongly they promote the token, and then iteratively
//! rewrite each column through the unembedding pseudoinverse until the token
//! sits near a desired deep rank inside the neuron. Only FF2 columns are
//! touched; every edit is recorded for audit.

#![forbid(unsafe_code)]

mod config;
mod edit;
mod records;
mod select;
mod unlearn;

pub use config::{NeuronStrategy, RevsConfig};
pub use edit::{edit_neuron, EditIteration, NeuronEditLog};
pub use records::{EditRecord, LayerEditRecord, NeuronEditRecord, NeuronRef};
pub use select::{layer_ranks, select_layers, select_neurons};
pub use unlearn::{unlearn_target, unlearn_token};

/// Errors surfaced by the editing engine.
#[derive(Debug, thiserror::Error)]
pub enum RevsError {
    /// Configuration violates an invariant or does not fit the model shape.
    #[error("config error: {0}")]
    Config(String),
    /// An edit produced non-finite numbers.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Forward or decode failure from the model.
    #[error(transparent)]
    Model(#[from] model::ModelError),
    /// Linear-algebra failure (pseudoinverse, rank kernels).
    #[error(transparent)]
    Linalg(#[from] core_linalg::LinalgError),
}

pub type Result<T> = std::result::Result<T, RevsError>;
