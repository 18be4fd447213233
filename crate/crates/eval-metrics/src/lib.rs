//! Unlearning-effectiveness and integrity metrics: Score@k, Efficacy@k,
//! Generalization@k, Specificity, and the harmonic-mean aggregates, plus the
//! evaluation report they roll up into.
//!
//! Every score is stored as a fraction in [0, 1]; rendering as a percentage
//! happens only at display time. Aggregation runs per split and is then
//! summarized as mean and standard deviation across split seeds.

#![forbid(unsafe_code)]

mod config;
mod measures;
mod report;
mod score;

pub use config::MetricConfig;
pub use measures::{
    efficacy_at_k, generalization_at_k, specificity, token_output_rank, unlearning_score,
};
pub use report::{aggregate_splits, EvalReport, SplitSummary, TargetRow};
pub use score::{harmonic_mean, score_at_k};

/// Errors surfaced by metric evaluation and report assembly.
#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    /// A harmonic mean or split aggregate over zero values.
    #[error("cannot aggregate an empty list of scores")]
    EmptyAggregate,
    /// A score left the [0, 1] range or went non-finite.
    #[error("{what} = {value} is not a fraction in [0, 1]")]
    InvalidScore { what: String, value: f64 },
    /// Efficacy of a target whose unlearn-token subset is empty.
    #[error("target {target_id} has an empty unlearn-token subset")]
    EmptyTokenSubset { target_id: String },
    /// Specificity over an empty retain set is undefined.
    #[error("specificity needs at least one retain target")]
    EmptyRetainSet,
    /// A retain target the pre-edit model never memorized is a dataset
    /// error: specificity would conflate training failure with edit damage.
    #[error("retain target {target_id} was not memorized by the baseline model")]
    RetainNotMemorized { target_id: String },
    /// A report with no per-target rows has no defined aggregates.
    #[error("report needs at least one per-target row")]
    EmptyReport,
    /// Stored aggregate disagrees with recomputation from components.
    #[error("stored {what} = {stored} but recomputation gives {recomputed}")]
    AggregateMismatch { what: String, stored: f64, recomputed: f64 },
    /// Forward or decode failure from the model.
    #[error(transparent)]
    Model(#[from] model::ModelError),
    /// Rank-kernel failure.
    #[error(transparent)]
    Linalg(#[from] core_linalg::LinalgError),
    /// Report (de)serialization failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MetricError>;
