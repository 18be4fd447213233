//! Hand-derived backpropagation for the full model.
//!
//! Gradients accumulate into a `Parameters`-shaped container so the
//! optimizer, clipping, and checkpoints all share one canonical tensor
//! order. Derivations follow the standard pre-norm transformer calculus;
//! every formula here is covered by the finite-difference suite in
//! `tests/gradcheck.rs`.

use core_linalg::Matrix;

use crate::forward::{col_block, ForwardCache, LnCache};
use crate::math::{gelu_deriv, log_sum_exp, softmax_prefix};
use crate::params::{LayerNormParams, Parameters};

/// Cross-entropy over next-token predictions.
///
/// Position `i < T - 1` predicts `tokens[i + 1]`; the last position predicts
/// nothing. Both the scalar loss and the logit gradients are scaled by
/// `weight`, so per-sentence calls can accumulate to an exact batch mean by
/// passing `1 / total_predictions`.
pub fn loss_and_dlogits(logits: &Matrix, tokens: &[usize], weight: f64) -> (f64, Matrix) {
    let (t_len, vocab) = (logits.rows(), logits.cols());
    assert_eq!(t_len, tokens.len(), "logits rows must match token count");
    let mut loss = 0.0;
    let mut dlogits = Matrix::zeros(t_len, vocab);
    for i in 0..t_len.saturating_sub(1) {
        let row = logits.row(i);
        let target = tokens[i + 1];
        let lse = log_sum_exp(row);
        loss += (lse - row[target]) * weight;
        let d = dlogits.row_mut(i);
        d.copy_from_slice(row);
        softmax_prefix(d, vocab);
        for v in d.iter_mut() {
            *v *= weight;
        }
        d[target] -= weight;
    }
    (loss, dlogits)
}

/// dL/dx for `y = gain * xhat + bias`, also accumulating dgain and dbias.
fn layer_norm_backward(
    dy: &Matrix,
    ln: &LnCache,
    p: &LayerNormParams,
    dgain: &mut [f64],
    dbias: &mut [f64],
) -> Matrix {
    let (t, d) = (dy.rows(), dy.cols());
    let dn = d as f64;
    let mut dx = Matrix::zeros(t, d);
    let mut dxhat = vec![0.0; d];
    for i in 0..t {
        let dyr = dy.row(i);
        let xh = ln.xhat.row(i);
        for j in 0..d {
            dgain[j] += dyr[j] * xh[j];
            dbias[j] += dyr[j];
            dxhat[j] = dyr[j] * p.gain[j];
        }
        let m1: f64 = dxhat.iter().sum::<f64>() / dn;
        let m2: f64 = dxhat.iter().zip(xh).map(|(a, b)| a * b).sum::<f64>() / dn;
        let is = ln.inv_std[i];
        let dxr = dx.row_mut(i);
        for j in 0..d {
            dxr[j] = is * (dxhat[j] - m1 - xh[j] * m2);
        }
    }
    dx
}

fn add_assign(dst: &mut Matrix, src: &Matrix) {
    for (d, &s) in dst.data_mut().iter_mut().zip(src.data()) {
        *d += s;
    }
}

fn add_into_cols(dst: &mut Matrix, c0: usize, src: &Matrix) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let v = dst.at(i, c0 + j) + src.at(i, j);
            dst.set(i, c0 + j, v);
        }
    }
}

/// Accumulates dL/dparams into `grads`, given dL/dlogits.
///
/// The cache must come from a `forward` call on the same parameters; `grads`
/// must be shaped like `params` (see `Parameters::zeros_like`).
pub fn backward(params: &Parameters, cache: &ForwardCache, dlogits: &Matrix, grads: &mut Parameters) {
    backward_impl(params, cache, dlogits, Some(grads), None);
}

/// dL/da at the last position for every block's MLP activations, given
/// dL/dlogits. Entry `l` has `d_ff` values for block `l`. Shares the
/// gradient-propagation path with `backward`, so the finite-difference suite
/// covers this chain too.
pub fn activation_gradients_last(
    params: &Parameters,
    cache: &ForwardCache,
    dlogits: &Matrix,
) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new(); params.config.n_layers];
    backward_impl(params, cache, dlogits, None, Some(&mut out));
    out
}

/// dL/dlogits at one position for negative log-likelihood of `token`:
/// `softmax(logits) - onehot(token)`.
pub fn nll_dlogits(logits: &[f64], token: usize) -> Vec<f64> {
    let mut d = logits.to_vec();
    let len = d.len();
    softmax_prefix(&mut d, len);
    d[token] -= 1.0;
    d
}

fn backward_impl(
    params: &Parameters,
    cache: &ForwardCache,
    dlogits: &Matrix,
    mut grads: Option<&mut Parameters>,
    mut act_grads: Option<&mut Vec<Vec<f64>>>,
) {
    let cfg = &params.config;
    let t_len = cache.tokens.len();
    let dh = cfg.head_dim();
    let scale = 1.0 / (dh as f64).sqrt();

    // Unembedding and final norm.
    let dhf = dlogits.matmul(&params.unemb);
    if let Some(g) = grads.as_deref_mut() {
        add_assign(&mut g.unemb, &dlogits.matmul_tn(&cache.ln_f.out));
    }
    let mut dgain_sink = vec![0.0; cfg.d_model];
    let mut dbias_sink = vec![0.0; cfg.d_model];
    let mut dx = match grads.as_deref_mut() {
        Some(g) => layer_norm_backward(
            &dhf,
            &cache.ln_f,
            &params.ln_f,
            &mut g.ln_f.gain,
            &mut g.ln_f.bias,
        ),
        None => layer_norm_backward(&dhf, &cache.ln_f, &params.ln_f, &mut dgain_sink, &mut dbias_sink),
    };

    for l in (0..cfg.n_layers).rev() {
        let b = &params.blocks[l];
        let bc = &cache.blocks[l];

        // MLP: x_out = x_mid + ff2_apply(gelu(ff1_apply(ln2(x_mid)))).
        if let Some(g) = grads.as_deref_mut() {
            add_assign(&mut g.blocks[l].ff2, &dx.matmul_tn(&bc.act));
        }
        let dact = dx.matmul(&b.ff2);
        if let Some(acc) = act_grads.as_deref_mut() {
            acc[l] = dact.row(t_len - 1).to_vec();
        }
        let mut dpre = dact;
        for (dp, &p) in dpre.data_mut().iter_mut().zip(bc.pre.data()) {
            *dp *= gelu_deriv(p);
        }
        if let Some(g) = grads.as_deref_mut() {
            add_assign(&mut g.blocks[l].ff1, &dpre.matmul_tn(&bc.ln2.out));
        }
        let dn2 = dpre.matmul(&b.ff1);
        let mut dx_mid = dx; // residual path
        match grads.as_deref_mut() {
            Some(g) => {
                let gb = &mut g.blocks[l];
                add_assign(
                    &mut dx_mid,
                    &layer_norm_backward(&dn2, &bc.ln2, &b.ln2, &mut gb.ln2.gain, &mut gb.ln2.bias),
                );
            }
            None => add_assign(
                &mut dx_mid,
                &layer_norm_backward(&dn2, &bc.ln2, &b.ln2, &mut dgain_sink, &mut dbias_sink),
            ),
        }

        // Attention: x_mid = x_in + wo_apply(concat_h(att_h vh)).
        if let Some(g) = grads.as_deref_mut() {
            add_assign(&mut g.blocks[l].wo, &dx_mid.matmul_tn(&bc.ctx));
        }
        let dctx = dx_mid.matmul(&b.wo);
        let mut dq = Matrix::zeros(t_len, cfg.d_model);
        let mut dk = Matrix::zeros(t_len, cfg.d_model);
        let mut dv = Matrix::zeros(t_len, cfg.d_model);
        for h in 0..cfg.n_heads {
            let c0 = h * dh;
            let dctx_h = col_block(&dctx, c0, dh);
            let qh = col_block(&bc.q, c0, dh);
            let kh = col_block(&bc.k, c0, dh);
            let vh = col_block(&bc.v, c0, dh);
            let a = &bc.att[h];

            let da = dctx_h.matmul_nt(&vh);
            add_into_cols(&mut dv, c0, &a.matmul_tn(&dctx_h));

            // Softmax backward, row by row over the causal prefix.
            let mut ds = Matrix::zeros(t_len, t_len);
            for i in 0..t_len {
                let ar = a.row(i);
                let dar = da.row(i);
                let s: f64 = ar[..=i].iter().zip(&dar[..=i]).map(|(x, y)| x * y).sum();
                let dsr = ds.row_mut(i);
                for j in 0..=i {
                    dsr[j] = ar[j] * (dar[j] - s) * scale;
                }
            }
            add_into_cols(&mut dq, c0, &ds.matmul(&kh));
            add_into_cols(&mut dk, c0, &ds.matmul_tn(&qh));
        }
        if let Some(g) = grads.as_deref_mut() {
            add_assign(&mut g.blocks[l].wq, &dq.matmul_tn(&bc.ln1.out));
            add_assign(&mut g.blocks[l].wk, &dk.matmul_tn(&bc.ln1.out));
            add_assign(&mut g.blocks[l].wv, &dv.matmul_tn(&bc.ln1.out));
        }
        let mut dn1 = dq.matmul(&b.wq);
        add_assign(&mut dn1, &dk.matmul(&b.wk));
        add_assign(&mut dn1, &dv.matmul(&b.wv));
        match grads.as_deref_mut() {
            Some(g) => {
                let gb = &mut g.blocks[l];
                add_assign(
                    &mut dx_mid,
                    &layer_norm_backward(&dn1, &bc.ln1, &b.ln1, &mut gb.ln1.gain, &mut gb.ln1.bias),
                );
            }
            None => add_assign(
                &mut dx_mid,
                &layer_norm_backward(&dn1, &bc.ln1, &b.ln1, &mut dgain_sink, &mut dbias_sink),
            ),
        }
        dx = dx_mid;
    }

    // Embeddings.
    if let Some(g) = grads.as_deref_mut() {
        for (i, &tok) in cache.tokens.iter().enumerate() {
            let dxr = dx.row(i);
            let te = g.tok_emb.row_mut(tok);
            for j in 0..cfg.d_model {
                te[j] += dxr[j];
            }
            let pe = g.pos_emb.row_mut(i);
            for j in 0..cfg.d_model {
                pe[j] += dxr[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelConfig;
    use crate::forward::{forward, Logits, LogitsMode};

    #[test]
    fn loss_matches_direct_cross_entropy() {
        let logits = Matrix::from_vec(2, 3, vec![1.0, 2.0, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let tokens = [0, 2];
        let (loss, d) = loss_and_dlogits(&logits, &tokens, 1.0);
        // Only position 0 predicts (target 2): -log softmax(1, 2, 0.5)[2].
        let z = (1f64.exp() + 2f64.exp() + 0.5f64.exp()).ln();
        assert!((loss - (z - 0.5)).abs() < 1e-12);
        // Gradient rows: softmax - onehot at position 0, zeros at the last.
        let p2 = (0.5 - z).exp();
        assert!((d.at(0, 2) - (p2 - 1.0)).abs() < 1e-12);
        assert!(d.row(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dlogits_rows_sum_to_zero() {
        let cfg = ModelConfig {
            vocab_size: 12,
            d_model: 8,
            d_ff: 16,
            n_layers: 1,
            n_heads: 2,
            context_len: 6,
        };
        let p = Parameters::init(&cfg, 0.5, 1);
        let tokens = [3, 1, 4, 1];
        let cache = forward(&p, &tokens, LogitsMode::All).unwrap();
        let Logits::All(logits) = &cache.logits else { unreachable!() };
        let (_, d) = loss_and_dlogits(logits, &tokens, 0.25);
        for i in 0..tokens.len() - 1 {
            let s: f64 = d.row(i).iter().sum();
            assert!(s.abs() < 1e-12, "row {i} sums to {s}");
        }
    }
}
