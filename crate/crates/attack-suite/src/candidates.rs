//! Candidate-set construction for the three extraction attacks.
//!
//! Every builder works on the residual trace of the prompt's last position:
//! the embedding output, each block's post-residual state, and the
//! post-final-norm readout whose projection is the model's actual output
//! distribution. A candidate set records, per probed state, which token ids
//! an attacker inspecting that state would shortlist, plus the effective
//! rank of each probed token so scores compose with `score_at_k`.

use std::collections::BTreeMap;

use core_linalg::{
    bottom_k_indices, rank_from_bottom, rank_of_token, top_k_indices,
};
use model::{forward, LogitsMode, Parameters};
use serde::{Deserialize, Serialize};
use tokenizer_data::Vocabulary;

use crate::{AttackError, PerturbationSpec, Result};

/// Which extraction attack produced a candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    LogitLens,
    Delta,
    Perturbation,
}

impl AttackKind {
    /// Report key, also used as the label in resistance maps.
    pub fn label(&self) -> &'static str {
        match self {
            AttackKind::LogitLens => "logit_lens",
            AttackKind::Delta => "delta",
            AttackKind::Perturbation => "perturbation",
        }
    }
}

/// Per-layer shortlist of one attack on one probe prompt.
///
/// `layer_candidates[l]` is the sorted token-id shortlist the attack reads
/// off state `l` (for the delta attack, off the pair `l -> l+1`), and
/// `effective_ranks[token][l]` the matching 1-based effective rank, so
/// membership in the shortlist is exactly `effective rank <= k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub attack: AttackKind,
    pub k: usize,
    pub layer_candidates: Vec<Vec<usize>>,
    pub effective_ranks: BTreeMap<usize, Vec<usize>>,
    /// Set when a perturbed prompt no longer fits the context window and the
    /// probe was skipped; such a probe counts as fully resistant.
    pub skipped: bool,
}

impl CandidateSet {
    fn skipped(attack: AttackKind, k: usize) -> Self {
        Self {
            attack,
            k,
            layer_candidates: Vec::new(),
            effective_ranks: BTreeMap::new(),
            skipped: true,
        }
    }

    /// Number of probed states (layer pairs for the delta attack).
    pub fn n_layers(&self) -> usize {
        self.layer_candidates.len()
    }

    /// True when `token` is shortlisted at state `layer`.
    pub fn contains(&self, layer: usize, token: usize) -> bool {
        self.layer_candidates[layer].binary_search(&token).is_ok()
    }
}

/// Vocabulary projections `U h` of every traced residual state.
fn projected_trace(params: &Parameters, prompt: &[usize]) -> Result<Vec<Vec<f64>>> {
    let cache = forward(params, prompt, LogitsMode::LastOnly)?;
    Ok(cache.last_position_trace().iter().map(|h| params.unemb.matvec(h)).collect())
}

/// Top-k plus bottom-k shortlist per residual state; the effective rank of a
/// probed token is the better of its top rank and its bottom rank, so a
/// token buried at the exact bottom of a projection is as exposed as one at
/// the exact top.
pub fn logit_lens_candidates(
    params: &Parameters,
    prompt: &[usize],
    probe_tokens: &[usize],
    k: usize,
) -> Result<CandidateSet> {
    let projections = projected_trace(params, prompt)?;
    let mut layer_candidates = Vec::with_capacity(projections.len());
    let mut effective_ranks: BTreeMap<usize, Vec<usize>> =
        probe_tokens.iter().map(|&t| (t, Vec::new())).collect();

    for v in &projections {
        let mut ids = top_k_indices(v, k)?;
        ids.extend(bottom_k_indices(v, k)?);
        ids.sort_unstable();
        ids.dedup();
        layer_candidates.push(ids);
        for (&token, ranks) in effective_ranks.iter_mut() {
            ranks.push(rank_of_token(v, token)?.min(rank_from_bottom(v, token)?));
        }
    }
    Ok(CandidateSet {
        attack: AttackKind::LogitLens,
        k,
        layer_candidates,
        effective_ranks,
        skipped: false,
    })
}

/// Top-k shortlist of `|v_next - v_prev|` per consecutive projection pair;
/// the effective rank of a probed token is its 1-based position in that
/// descending-magnitude ordering.
pub fn delta_candidates(
    params: &Parameters,
    prompt: &[usize],
    probe_tokens: &[usize],
    k: usize,
) -> Result<CandidateSet> {
    if params.config.n_layers < 2 {
        return Err(AttackError::Config(format!(
            "delta attack needs at least 2 layers, model has {}",
            params.config.n_layers
        )));
    }
    let projections = projected_trace(params, prompt)?;
    let mut layer_candidates = Vec::with_capacity(projections.len() - 1);
    let mut effective_ranks: BTreeMap<usize, Vec<usize>> =
        probe_tokens.iter().map(|&t| (t, Vec::new())).collect();

    for pair in projections.windows(2) {
        let deltas: Vec<f64> =
            pair[1].iter().zip(pair[0].iter()).map(|(a, b)| (a - b).abs()).collect();
        let mut ids = top_k_indices(&deltas, k)?;
        ids.sort_unstable();
        layer_candidates.push(ids);
        for (&token, ranks) in effective_ranks.iter_mut() {
            ranks.push(rank_of_token(&deltas, token)?);
        }
    }
    Ok(CandidateSet {
        attack: AttackKind::Delta,
        k,
        layer_candidates,
        effective_ranks,
        skipped: false,
    })
}

/// Logit-lens probe of a perturbed rendering of the prompt: the text is
/// perturbed per `spec`, re-tokenized, and probed like
/// [`logit_lens_candidates`]. A perturbed prompt that no longer fits the
/// context window yields a skipped set.
pub fn perturbation_candidates(
    params: &Parameters,
    vocab: &Vocabulary,
    prompt_text: &str,
    spec: &PerturbationSpec,
    probe_tokens: &[usize],
    k: usize,
) -> Result<CandidateSet> {
    let perturbed = spec.apply(prompt_text);
    let tokens = vocab.tokenize(&perturbed);
    if tokens.len() > params.config.context_len {
        log::warn!(
            "perturbed prompt ({} tokens) exceeds context {}; probe skipped",
            tokens.len(),
            params.config.context_len
        );
        return Ok(CandidateSet::skipped(AttackKind::Perturbation, k));
    }
    let mut set = logit_lens_candidates(params, &tokens, probe_tokens, k)?;
    set.attack = AttackKind::Perturbation;
    Ok(set)
}
