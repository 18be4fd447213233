//! Iterative pseudoinverse editing of a single neuron.
//!
//! A neuron (FF2 column) is projected to the vocabulary through the
//! unembedding, the target token's logit is overwritten with a strongly
//! negative value, and the result is pulled back through the pseudoinverse.
//! Because the pullback is a least-squares fit, the achieved rank drifts from
//! the requested one, so the inserted logit is re-scaled and the round trip
//! repeated until the token's rank inside the neuron lands near the desired
//! deep rank.

use core_linalg::{rank_of_token, Matrix};

use crate::{Result, RevsConfig, RevsError};

/// One projection round trip: the logit that was inserted and the in-neuron
/// rank it achieved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditIteration {
    pub logit: f64,
    pub rank: usize,
}

/// Outcome of [`edit_neuron`].
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronEditLog {
    /// Every round trip performed, in order. Empty when the unedited neuron
    /// already satisfied the tolerance.
    pub iterations: Vec<EditIteration>,
    /// Token rank in the returned neuron's vocabulary projection.
    pub final_rank: usize,
    /// Logit of the final state: the last inserted value, or the token's
    /// existing in-neuron logit when no edit was needed.
    pub final_logit: f64,
    /// Whether `|final_rank - r_n| <= eps_rn`.
    pub converged: bool,
}

fn ensure_finite(values: &[f64], what: &str, iter: usize) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(RevsError::Numeric(format!(
            "non-finite {what} at neuron-edit iteration {iter}"
        )));
    }
    Ok(())
}

/// Demotes `token` inside `neuron` until its rank in the neuron's vocabulary
/// projection lies within `eps_rn` of `r_n`, returning the edited vector and
/// a log of every iteration. If the unedited neuron already satisfies the
/// tolerance it is returned unchanged. On hitting `max_edit_iters` the
/// iterate whose rank came closest to `r_n` is returned with
/// `converged: false`.
pub fn edit_neuron(
    neuron: &[f64],
    token: usize,
    cfg: &RevsConfig,
    u: &Matrix,
    u_pinv: &Matrix,
) -> Result<(Vec<f64>, NeuronEditLog)> {
    if neuron.len() != u.cols() {
        return Err(RevsError::Config(format!(
            "neuron length {} does not match unembedding width {}",
            neuron.len(),
            u.cols()
        )));
    }

    let distance = |rank: usize| rank.abs_diff(cfg.r_n);

    let mut n = neuron.to_vec();
    let v0 = u.matvec(&n);
    ensure_finite(&v0, "vocabulary projection", 0)?;
    let r0 = rank_of_token(&v0, token)?;
    if distance(r0) <= cfg.eps_rn {
        let log = NeuronEditLog {
            iterations: Vec::new(),
            final_rank: r0,
            final_logit: v0[token],
            converged: true,
        };
        return Ok((n, log));
    }

    let mut l_t = cfg.init_logit;
    let mut iterations = Vec::new();
    let mut best: Option<(Vec<f64>, EditIteration)> = None;

    for iter in 1..=cfg.max_edit_iters {
        let mut v = u.matvec(&n);
        v[token] = l_t;
        n = u_pinv.matvec(&v);
        ensure_finite(&n, "pseudoinverse pullback", iter)?;
        let achieved = u.matvec(&n);
        ensure_finite(&achieved, "vocabulary projection", iter)?;
        let rank = rank_of_token(&achieved, token)?;
        let step = EditIteration { logit: l_t, rank };
        iterations.push(step);

        if best.as_ref().map_or(true, |(_, b)| distance(rank) < distance(b.rank)) {
            best = Some((n.clone(), step));
        }
        if distance(rank) <= cfg.eps_rn {
            let log = NeuronEditLog {
                iterations,
                final_rank: rank,
                final_logit: l_t,
                converged: true,
            };
            return Ok((n, log));
        }
        if rank < cfg.r_n {
            l_t *= cfg.grow_factor;
        } else {
            l_t *= cfg.shrink_factor;
        }
        if !l_t.is_finite() {
            return Err(RevsError::Numeric(format!(
                "inserted logit became non-finite after iteration {iter}"
            )));
        }
    }

    let (best_n, best_step) = best.expect("max_edit_iters >= 1 ran at least one iteration");
    let log = NeuronEditLog {
        iterations,
        final_rank: best_step.rank,
        final_logit: best_step.logit,
        converged: false,
    };
    Ok((best_n, log))
}
