//! Minibatch training loop with early stopping on a memorization probe.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use core_linalg::Matrix;

use crate::adam::AdamState;
use crate::backward::{backward, loss_and_dlogits};
use crate::config::ModelConfig;
use crate::forward::{forward, Logits, LogitsMode};
use crate::params::Parameters;
use crate::{ModelError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Run the memorization probe every this many epochs.
    pub check_every: usize,
    /// Stop only after the probe returns 1.0 on this many consecutive
    /// checks. The extra epochs widen logit margins, so argmax decisions
    /// survive the f32 rounding a checkpoint round trip applies.
    pub stable_checks: usize,
    /// Global gradient-norm ceiling.
    pub clip_norm: f64,
    /// Decoupled weight decay applied after each optimizer step to every
    /// tensor except the layer norms. Zero disables it.
    pub weight_decay: f64,
    pub init_std: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 3e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 16,
            max_epochs: 500,
            check_every: 5,
            stable_checks: 2,
            clip_norm: 1.0,
            weight_decay: 0.0,
            init_std: 0.02,
            seed: 0,
        }
    }
}

/// What happened during training, serialized alongside checkpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs_run: usize,
    /// Per-token mean loss, one entry per epoch.
    pub loss_by_epoch: Vec<f64>,
    /// `(epoch, fraction)` pairs from the memorization probe.
    pub checks: Vec<(usize, f64)>,
    /// True when the probe reached 1.0 before `max_epochs`.
    pub converged: bool,
}

fn global_grad_norm(grads: &Parameters) -> f64 {
    grads
        .tensor_views()
        .iter()
        .map(|t| t.data.iter().map(|&v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

fn clip_grads(grads: &mut Parameters, clip_norm: f64) {
    let norm = global_grad_norm(grads);
    if norm > clip_norm && norm > 0.0 {
        let s = clip_norm / norm;
        for (_, slice) in grads.tensor_slices_mut() {
            for v in slice {
                *v *= s;
            }
        }
    }
}

/// Trains a fresh model on `sentences`.
///
/// `probe`, when given, is called every `check_every` epochs with the current
/// parameters and returns a fraction in `[0, 1]`; training stops early once
/// it returns 1.0.
pub fn train(
    model_cfg: &ModelConfig,
    sentences: &[Vec<usize>],
    cfg: &TrainConfig,
    probe: Option<&dyn Fn(&Parameters) -> f64>,
) -> Result<(Parameters, TrainLog)> {
    model_cfg.validate()?;
    if sentences.is_empty() {
        return Err(ModelError::Sequence("no training sentences".into()));
    }
    if cfg.batch_size == 0 || cfg.max_epochs == 0 || cfg.check_every == 0 || cfg.stable_checks == 0
    {
        return Err(ModelError::Config(
            "batch_size, max_epochs, check_every and stable_checks must be positive".into(),
        ));
    }
    for (i, s) in sentences.iter().enumerate() {
        if s.len() < 2 {
            return Err(ModelError::Sequence(format!(
                "sentence {i} has {} tokens; need at least 2 to form a prediction",
                s.len()
            )));
        }
        if s.len() > model_cfg.context_len {
            return Err(ModelError::Sequence(format!(
                "sentence {i} exceeds context length {}",
                model_cfg.context_len
            )));
        }
    }

    let mut params = Parameters::init(model_cfg, cfg.init_std, cfg.seed);
    let mut grads = Parameters::zeros_like(model_cfg);
    let mut adam = AdamState::new(params.param_count());
    // Distinct stream from the init RNG.
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15));

    let mut log = TrainLog {
        epochs_run: 0,
        loss_by_epoch: Vec::new(),
        checks: Vec::new(),
        converged: false,
    };

    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut consecutive_full = 0usize;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut epoch_preds = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let total_preds: usize = batch.iter().map(|&i| sentences[i].len() - 1).sum();
            let weight = 1.0 / total_preds as f64;
            grads.set_all_zero();
            let mut batch_loss = 0.0;
            for &i in batch {
                let tokens = &sentences[i];
                let cache = forward(&params, tokens, LogitsMode::All)?;
                let Logits::All(logits) = &cache.logits else { unreachable!() };
                let (loss, dlogits): (f64, Matrix) = loss_and_dlogits(logits, tokens, weight);
                batch_loss += loss;
                backward(&params, &cache, &dlogits, &mut grads);
            }
            clip_grads(&mut grads, cfg.clip_norm);
            adam.step(&mut params, &grads, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
            if cfg.weight_decay > 0.0 {
                let s = 1.0 - cfg.lr * cfg.weight_decay;
                for (name, slice) in params.tensor_slices_mut() {
                    if !name.contains("ln") {
                        for v in slice {
                            *v *= s;
                        }
                    }
                }
            }
            epoch_loss += batch_loss * total_preds as f64;
            epoch_preds += total_preds;
        }
        log.loss_by_epoch.push(epoch_loss / epoch_preds as f64);
        log.epochs_run = epoch;

        if epoch % cfg.check_every == 0 || epoch == cfg.max_epochs {
            if let Some(p) = probe {
                let frac = p(&params);
                log.checks.push((epoch, frac));
                consecutive_full = if frac >= 1.0 { consecutive_full + 1 } else { 0 };
                if consecutive_full >= cfg.stable_checks {
                    log.converged = true;
                    break;
                }
            }
        }
    }
    Ok((params, log))
}
