//! Dense numeric kernels shared by every other crate: matrix-vector algebra,
//! token-rank extraction with deterministic tie-breaking, top-k/bottom-k index
//! selection, and the Moore-Penrose pseudoinverse of tall full-column-rank
//! matrices.
//!
//! All arithmetic is 64-bit. Checkpoints store 32-bit floats and promote on
//! load; doing the algebra in f64 keeps the pseudoinverse round-trips (the
//! heart of the editing method) far away from tolerance cliffs.
//!
//! Tie-breaking is ascending-token-id everywhere. Rank-from-bottom uses the
//! mirrored rule (descending id) so that for every token
//! `rank_of_token + rank_from_bottom = len + 1` holds exactly, ties included.

#![forbid(unsafe_code)]

mod matrix;
mod pinv;
mod rank;
mod topk;

pub use matrix::Matrix;
pub use pinv::pseudoinverse;
pub use rank::{rank_from_bottom, rank_of_token};
pub use topk::{bottom_k_indices, top_k_indices};

/// 1-based position of a token in a sorted logit ordering.
///
/// Invariant: `1 <= rank <= vocabulary size`. Every function returning a
/// `Rank` guarantees the range; callers may subtract 1 for indexing.
pub type Rank = usize;

/// A dense vector of finite 64-bit floats.
///
/// Kernels take `&[f64]` so slices of matrix rows compose without copies;
/// the alias names the concept in signatures. Finiteness is validated at the
/// decision-point kernels (rank, top-k, pseudoinverse), not per arithmetic op.
pub type Vector = Vec<f64>;

/// Errors from the numeric kernels.
#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    /// A token id addressed past the end of a logit vector.
    #[error("token id {token} out of range for vector of length {len}")]
    TokenOutOfRange { token: usize, len: usize },
    /// A selection count larger than the vector it selects from.
    #[error("k = {k} exceeds vector length {len}")]
    KTooLarge { k: usize, len: usize },
    /// NaN or infinity reached a kernel that must order values.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    /// Construction with inconsistent dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// The unembedding's Gram matrix is numerically singular.
    #[error("degenerate unembedding: {0}")]
    DegenerateUnembedding(String),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
