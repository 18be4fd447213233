//! White-box extraction attacks against an edited checkpoint and the
//! resistance scores that summarize them.
//!
//! Three attacks probe how recoverable a demoted token still is. The
//! logit-lens attack projects every residual state of the prompt's last
//! position to vocabulary logits and pools the top-k and bottom-k tokens of
//! each layer. The delta attack pools the top-k movers between consecutive
//! projections, embedding state included. The perturbation attack re-runs
//! the logit-lens probe on a character-perturbed, re-tokenized rendering of
//! the prompt. Each attack scores a target by the minimum over layers of its
//! efficacy term, so one leaky layer is enough for the attacker, and the
//! three per-attack resistances combine by harmonic mean.

mod candidates;
mod perturb;
mod resistance;

pub use candidates::{
    delta_candidates, logit_lens_candidates, perturbation_candidates, AttackKind, CandidateSet,
};
pub use perturb::PerturbationSpec;
pub use resistance::{
    attack_resistance_at_k, delta_resistance, logit_lens_resistance, perturbation_resistance,
    resistance_score, AttackOutcome, TokenProbe,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack config: {0}")]
    Config(String),
    #[error("attack contract violation: {0}")]
    Contract(String),
    #[error("model error: {0}")]
    Model(#[from] model::ModelError),
    #[error("linear algebra error: {0}")]
    Linalg(#[from] core_linalg::LinalgError),
    #[error("metric error: {0}")]
    Metric(#[from] eval_metrics::MetricError),
}

pub type Result<T> = std::result::Result<T, AttackError>;
