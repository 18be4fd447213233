//! Layer and neuron selection: where to edit, and in what order.

use core_linalg::rank_of_token;
use model::{activation_gradients_last, forward, nll_dlogits, ForwardCache, LogitsMode, Parameters};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::{NeuronRef, NeuronStrategy, Result, RevsConfig, RevsError};

/// Token rank in each layer's last-position hidden state projected to the
/// vocabulary. Entry `l` is the rank after block `l`; the last entry reads
/// the final-norm output, so it reflects the model's actual output ranking.
pub fn layer_ranks(params: &Parameters, prompt: &[usize], token: usize) -> Result<Vec<usize>> {
    let cache = forward(params, prompt, LogitsMode::LastOnly)?;
    ranks_from_cache(params, &cache, token)
}

pub(crate) fn ranks_from_cache(
    params: &Parameters,
    cache: &ForwardCache,
    token: usize,
) -> Result<Vec<usize>> {
    let trace = cache.last_position_trace();
    let mut ranks = Vec::with_capacity(params.config.n_layers);
    for l in 0..params.config.n_layers {
        let v = params.unemb.matvec(&trace[l + 1]);
        ranks.push(rank_of_token(&v, token)?);
    }
    Ok(ranks)
}

/// Layers whose hidden-state token rank is below the demotion threshold, in
/// ascending layer order.
pub fn select_layers(
    params: &Parameters,
    prompt: &[usize],
    token: usize,
    cfg: &RevsConfig,
) -> Result<Vec<usize>> {
    let ranks = layer_ranks(params, prompt, token)?;
    Ok((0..ranks.len()).filter(|&l| ranks[l] < cfg.r_d).collect())
}

/// Mixes the config seed with the call site so distinct (layer, token) pairs
/// shuffle independently but reproducibly.
fn shuffle_seed(seed: u64, layer: usize, token: usize) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(1 + layer as u64))
        .wrapping_add(0xBF58_476D_1CE4_E5B9u64.wrapping_mul(1 + token as u64));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Candidate FF2 columns of `layer`, ordered by the configured strategy.
/// The activations and gradients are read from `cache`, which must come from
/// a forward pass over the prompt on the current parameters.
pub fn select_neurons(
    params: &Parameters,
    cache: &ForwardCache,
    layer: usize,
    token: usize,
    cfg: &RevsConfig,
) -> Result<Vec<NeuronRef>> {
    let d_ff = params.config.d_ff;
    if cfg.act_top_k > d_ff {
        return Err(RevsError::Config(format!(
            "act_top_k {} exceeds d_ff {d_ff}",
            cfg.act_top_k
        )));
    }
    if layer >= params.config.n_layers {
        return Err(RevsError::Config(format!(
            "layer {layer} out of range for a {}-layer model",
            params.config.n_layers
        )));
    }

    let token_rank = |j: usize| -> Result<usize> {
        let v = params.unemb.matvec(&params.blocks[layer].ff2.col(j));
        Ok(rank_of_token(&v, token)?)
    };

    let columns: Vec<usize> = match cfg.neuron_strategy {
        NeuronStrategy::Hybrid | NeuronStrategy::Zero => {
            let acts = cache.mlp_activations_last(layer);
            let mut by_act: Vec<usize> = (0..d_ff).collect();
            by_act.sort_by(|&a, &b| acts[b].total_cmp(&acts[a]).then(a.cmp(&b)));
            by_act.truncate(cfg.act_top_k);
            let mut keyed: Vec<(usize, usize)> = Vec::with_capacity(by_act.len());
            for j in by_act {
                keyed.push((token_rank(j)?, j));
            }
            keyed.sort();
            keyed.into_iter().map(|(_, j)| j).collect()
        }
        NeuronStrategy::Activations => {
            let acts = cache.mlp_activations_last(layer);
            let mut by_act: Vec<usize> = (0..d_ff).collect();
            by_act.sort_by(|&a, &b| acts[b].total_cmp(&acts[a]).then(a.cmp(&b)));
            by_act
        }
        NeuronStrategy::Rank => {
            let mut keyed: Vec<(usize, usize)> = Vec::with_capacity(d_ff);
            for j in 0..d_ff {
                keyed.push((token_rank(j)?, j));
            }
            keyed.sort();
            keyed.into_iter().map(|(_, j)| j).collect()
        }
        NeuronStrategy::Gradient => {
            let t_len = cache.tokens.len();
            let last_logits = cache.logits.last();
            let mut dlogits =
                core_linalg::Matrix::zeros(t_len, params.config.vocab_size);
            let dlast = nll_dlogits(&last_logits, token);
            dlogits.row_mut(t_len - 1).copy_from_slice(&dlast);
            let grads = activation_gradients_last(params, cache, &dlogits);
            let g = &grads[layer];
            let mut by_grad: Vec<usize> = (0..d_ff).collect();
            by_grad.sort_by(|&a, &b| g[b].abs().total_cmp(&g[a].abs()).then(a.cmp(&b)));
            by_grad
        }
        NeuronStrategy::Random => {
            let mut rng = ChaCha20Rng::seed_from_u64(shuffle_seed(cfg.seed, layer, token));
            let mut idx: Vec<usize> = (0..d_ff).collect();
            idx.shuffle(&mut rng);
            idx
        }
    };

    Ok(columns.into_iter().map(|column| NeuronRef { layer, column }).collect())
}
