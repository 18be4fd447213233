//! Orchestration: demote a token across all layers that still promote it,
//! and walk whole targets token by token.

use std::collections::BTreeSet;

use core_linalg::{pseudoinverse, rank_of_token, Matrix};
use model::{forward, LogitsMode, Parameters};
use tokenizer_data::TargetSpec;

use crate::select::ranks_from_cache;
use crate::{
    edit_neuron, select_neurons, EditRecord, LayerEditRecord, NeuronEditRecord, NeuronStrategy,
    Result, RevsConfig, RevsError,
};

/// Demotes `token` (conditioned on `prompt`) in every layer whose
/// hidden-state rank is below the threshold, mutating `params` in place.
///
/// Per selected layer, neurons are edited one at a time — strongest candidate
/// first, re-ranked after every edit from a fresh forward pass — until the
/// layer's hidden-state rank clears the threshold or the layer budget is
/// spent. The returned record lists every layer (selected or not) with its
/// rank before and after the whole call, plus per-neuron edit outcomes.
pub fn unlearn_token(
    params: &mut Parameters,
    prompt: &[usize],
    token: usize,
    cfg: &RevsConfig,
) -> Result<EditRecord> {
    let mcfg = &params.config;
    if token >= mcfg.vocab_size {
        return Err(RevsError::Config(format!(
            "token {token} out of range for vocabulary of {}",
            mcfg.vocab_size
        )));
    }

    let opening = forward(params, prompt, LogitsMode::LastOnly)?;
    let initial_ranks = ranks_from_cache(params, &opening, token)?;
    let mut layers: Vec<LayerEditRecord> = initial_ranks
        .iter()
        .enumerate()
        .map(|(layer, &rank)| LayerEditRecord {
            layer,
            selected: rank < cfg.r_d,
            initial_rank: rank,
            final_rank: rank,
            neurons: Vec::new(),
            budget_exhausted: false,
        })
        .collect();

    let needs_pinv = layers.iter().any(|l| l.selected)
        && cfg.neuron_strategy != NeuronStrategy::Zero;
    let u_pinv: Option<Matrix> =
        if needs_pinv { Some(pseudoinverse(&params.unemb)?) } else { None };

    for l in 0..layers.len() {
        if !layers[l].selected {
            continue;
        }
        let mut edited: BTreeSet<usize> = BTreeSet::new();
        loop {
            let cache = forward(params, prompt, LogitsMode::LastOnly)?;
            let r_t = ranks_from_cache(params, &cache, token)?[l];
            if r_t >= cfg.r_d {
                break;
            }
            if edited.len() >= cfg.n_max {
                layers[l].budget_exhausted = true;
                break;
            }
            let order = select_neurons(params, &cache, l, token, cfg)?;
            let Some(pick) = order.into_iter().find(|n| !edited.contains(&n.column)) else {
                // Every candidate the strategy can offer is already edited.
                layers[l].budget_exhausted = true;
                break;
            };

            let column = params.blocks[l].ff2.col(pick.column);
            let outcome = if cfg.neuron_strategy == NeuronStrategy::Zero {
                let zeroed = vec![0.0; column.len()];
                let rank = rank_of_token(&params.unemb.matvec(&zeroed), token)?;
                (
                    zeroed,
                    NeuronEditRecord {
                        neuron: pick,
                        iterations: 0,
                        final_rank: rank,
                        final_logit: 0.0,
                        converged: true,
                    },
                )
            } else {
                let (edited_col, log) = edit_neuron(
                    &column,
                    token,
                    cfg,
                    &params.unemb,
                    u_pinv.as_ref().expect("pseudoinverse prepared for editing strategies"),
                )
                .map_err(|e| match e {
                    RevsError::Numeric(msg) => RevsError::Numeric(format!(
                        "layer {l} column {}: {msg}",
                        pick.column
                    )),
                    other => other,
                })?;
                (
                    edited_col,
                    NeuronEditRecord {
                        neuron: pick,
                        iterations: log.iterations.len(),
                        final_rank: log.final_rank,
                        final_logit: log.final_logit,
                        converged: log.converged,
                    },
                )
            };

            params.blocks[l].ff2.set_col(pick.column, &outcome.0);
            edited.insert(pick.column);
            layers[l].neurons.push(outcome.1);
        }
    }

    let closing = forward(params, prompt, LogitsMode::LastOnly)?;
    let final_ranks = ranks_from_cache(params, &closing, token)?;
    for (rec, &rank) in layers.iter_mut().zip(final_ranks.iter()) {
        rec.final_rank = rank;
    }

    let budget_exhausted = layers.iter().any(|l| l.budget_exhausted);
    Ok(EditRecord { target_id: String::new(), token, secret_pos: None, layers, budget_exhausted })
}

/// Unlearns every selected token of a target, conditioning each on the
/// prompt extended with the secret prefix before that token's position.
/// Edits accumulate in `params`; one record is returned per token.
pub fn unlearn_target(
    params: &mut Parameters,
    target: &TargetSpec,
    cfg: &RevsConfig,
) -> Result<Vec<EditRecord>> {
    if target.unlearn_tokens.is_empty() {
        return Err(RevsError::Config(format!(
            "target {} has no tokens selected for unlearning",
            target.target_id
        )));
    }
    let mut records = Vec::with_capacity(target.unlearn_tokens.len());
    for tp in &target.unlearn_tokens {
        if tp.pos >= target.secret.len() {
            return Err(RevsError::Config(format!(
                "target {}: token position {} outside its {}-token secret",
                target.target_id,
                tp.pos,
                target.secret.len()
            )));
        }
        let prompt = target.prompt_with_secret_prefix(tp.pos);
        let mut record = unlearn_token(params, &prompt, tp.id, cfg)?;
        record.target_id = target.target_id.clone();
        record.secret_pos = Some(tp.pos);
        records.push(record);
    }
    Ok(records)
}
