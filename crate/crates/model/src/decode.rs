//! Greedy decoding.

use crate::forward::{forward, LogitsMode};
use crate::params::Parameters;
use crate::{ModelError, Result};

/// Greedily generates `n` tokens after `prompt`. Ties break toward the lower
/// token id, consistent with the rank convention used everywhere else.
pub fn greedy_decode(params: &Parameters, prompt: &[usize], n: usize) -> Result<Vec<usize>> {
    if prompt.len() + n > params.config.context_len {
        return Err(ModelError::Sequence(format!(
            "prompt {} + generation {} exceeds context {}",
            prompt.len(),
            n,
            params.config.context_len
        )));
    }
    let mut seq = prompt.to_vec();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let cache = forward(params, &seq, LogitsMode::LastOnly)?;
        let logits = cache.logits.last();
        let mut best = 0;
        for (i, &v) in logits.iter().enumerate() {
            if v > logits[best] {
                best = i;
            }
        }
        seq.push(best);
        out.push(best);
    }
    Ok(out)
}

/// Whether greedy decoding of `prompt` reproduces `continuation` exactly.
pub fn reproduces(params: &Parameters, prompt: &[usize], continuation: &[usize]) -> Result<bool> {
    Ok(greedy_decode(params, prompt, continuation.len())? == continuation)
}
