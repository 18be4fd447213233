//! Efficacy, generalization, and specificity over a frozen model state.

use core_linalg::rank_of_token;
use model::{forward, reproduces, LogitsMode, Parameters};
use tokenizer_data::TargetSpec;

use crate::score::{harmonic_mean, score_at_k};
use crate::{MetricError, Result};

/// Rank of `token` in the model's output distribution after `prompt`,
/// 1-based with deterministic index tie-breaking.
pub fn token_output_rank(params: &Parameters, prompt: &[usize], token: usize) -> Result<usize> {
    let cache = forward(params, prompt, LogitsMode::LastOnly)?;
    Ok(rank_of_token(&cache.logits.last(), token)?)
}

/// Efficacy@k of one target: the maximum Score@k across its unlearn-token
/// subset, each token probed with the prompt extended by the secret prefix
/// before its position.
///
/// The max semantics mean one fully demoted token certifies the whole
/// sequence as broken, since greedy reconstruction stops at the first miss.
pub fn efficacy_at_k(params: &Parameters, target: &TargetSpec, k: usize) -> Result<f64> {
    efficacy_with_prompt(params, target, &target.prompt, k)
}

/// Efficacy@k with `prompt` substituted for the target's own prompt; the
/// secret-prefix extension per token is unchanged.
fn efficacy_with_prompt(
    params: &Parameters,
    target: &TargetSpec,
    prompt: &[usize],
    k: usize,
) -> Result<f64> {
    if target.unlearn_tokens.is_empty() {
        return Err(MetricError::EmptyTokenSubset { target_id: target.target_id.clone() });
    }
    let mut best = 0.0f64;
    for tp in &target.unlearn_tokens {
        let mut probe = prompt.to_vec();
        probe.extend_from_slice(&target.secret[..tp.pos]);
        let rank = token_output_rank(params, &probe, tp.id)?;
        best = best.max(score_at_k(rank, k));
    }
    Ok(best)
}

/// Generalization@k: mean efficacy over the target's unseen prompts, or
/// `None` for targets that have no generalization prompts.
pub fn generalization_at_k(
    params: &Parameters,
    target: &TargetSpec,
    k: usize,
) -> Result<Option<f64>> {
    if target.generalization_prompts.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for g in &target.generalization_prompts {
        sum += efficacy_with_prompt(params, target, g, k)?;
    }
    Ok(Some(sum / target.generalization_prompts.len() as f64))
}

/// Specificity: the fraction of retain targets whose full secret the model
/// still reproduces under greedy decoding.
///
/// `baseline` is the pre-edit checkpoint; a retain target it never memorized
/// is a dataset error, because the metric would otherwise blame the edit for
/// a training failure.
pub fn specificity(
    params: &Parameters,
    baseline: &Parameters,
    retain_targets: &[&TargetSpec],
) -> Result<f64> {
    if retain_targets.is_empty() {
        return Err(MetricError::EmptyRetainSet);
    }
    let mut kept = 0usize;
    for t in retain_targets {
        if !reproduces(baseline, &t.prompt, &t.secret)? {
            return Err(MetricError::RetainNotMemorized { target_id: t.target_id.clone() });
        }
        if reproduces(params, &t.prompt, &t.secret)? {
            kept += 1;
        }
    }
    Ok(kept as f64 / retain_targets.len() as f64)
}

/// The unlearning score: harmonic mean of efficacy, specificity, and
/// generalization when the latter applies, else of the first two.
pub fn unlearning_score(
    efficacy: f64,
    specificity: f64,
    generalization: Option<f64>,
) -> Result<f64> {
    match generalization {
        Some(g) => harmonic_mean(&[efficacy, specificity, g]),
        None => harmonic_mean(&[efficacy, specificity]),
    }
}
