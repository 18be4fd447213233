//! Forward pass with full activation caching.
//!
//! The cache keeps every intermediate the backward pass needs, plus the
//! residual stream itself, which the editing and inspection code reads
//! through `last_position_trace`.

use core_linalg::Matrix;

use crate::math::{gelu, softmax_prefix};
use crate::params::{LayerNormParams, Parameters};
use crate::{ModelError, Result};

pub(crate) const LN_EPS: f64 = 1e-5;

/// Whether to project the unembedding at every position or only the last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogitsMode {
    All,
    LastOnly,
}

/// Output logits, shaped according to the requested mode.
#[derive(Debug, Clone)]
pub enum Logits {
    /// `(T x vocab)`.
    All(Matrix),
    /// Last position only, length `vocab`.
    Last(Vec<f64>),
}

impl Logits {
    /// Logits at the final position, whichever mode produced them.
    pub fn last(&self) -> Vec<f64> {
        match self {
            Logits::All(m) => m.row(m.rows() - 1).to_vec(),
            Logits::Last(v) => v.clone(),
        }
    }
}

pub(crate) struct LnCache {
    /// Normalized input before gain/bias, `(T x d)`.
    pub xhat: Matrix,
    /// `1 / sqrt(var + eps)` per position.
    pub inv_std: Vec<f64>,
    /// `gain * xhat + bias`, `(T x d)`.
    pub out: Matrix,
}

pub(crate) struct BlockCache {
    pub ln1: LnCache,
    pub q: Matrix,
    pub k: Matrix,
    pub v: Matrix,
    /// Per-head causal attention weights, each `(T x T)` lower-triangular.
    pub att: Vec<Matrix>,
    /// Concatenated per-head context, `(T x d)`.
    pub ctx: Matrix,
    pub ln2: LnCache,
    /// MLP pre-activations, `(T x d_ff)`.
    pub pre: Matrix,
    /// `gelu(pre)`, `(T x d_ff)`.
    pub act: Matrix,
}

pub struct ForwardCache {
    pub tokens: Vec<usize>,
    /// Residual stream: `xs[0]` is the embedding output, `xs[l + 1]` the
    /// stream after block `l`. Length `n_layers + 1`.
    pub(crate) xs: Vec<Matrix>,
    pub(crate) blocks: Vec<BlockCache>,
    pub(crate) ln_f: LnCache,
    pub logits: Logits,
}

impl ForwardCache {
    /// Residual-stream snapshots at the last position: entry 0 is the
    /// embedding output; entry `l + 1` is the stream after block `l`, except
    /// that the final entry is post final-norm, so projecting it through the
    /// unembedding reproduces the model's actual output logits.
    pub fn last_position_trace(&self) -> Vec<Vec<f64>> {
        let t = self.tokens.len() - 1;
        let n = self.xs.len();
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
        for x in &self.xs[..n - 1] {
            out.push(x.row(t).to_vec());
        }
        out.push(self.ln_f.out.row(t).to_vec());
        out
    }

    /// Final hidden state (post final-norm) at the last position.
    pub fn final_hidden_last(&self) -> &[f64] {
        self.ln_f.out.row(self.tokens.len() - 1)
    }

    /// MLP activations `gelu(ff1 ln2(x))` of `layer` at the last position.
    pub fn mlp_activations_last(&self, layer: usize) -> &[f64] {
        self.blocks[layer].act.row(self.tokens.len() - 1)
    }
}

fn layer_norm(x: &Matrix, p: &LayerNormParams) -> LnCache {
    let (t, d) = (x.rows(), x.cols());
    let mut xhat = Matrix::zeros(t, d);
    let mut out = Matrix::zeros(t, d);
    let mut inv_std = vec![0.0; t];
    for i in 0..t {
        let row = x.row(i);
        let mean = row.iter().sum::<f64>() / d as f64;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
        let is = 1.0 / (var + LN_EPS).sqrt();
        inv_std[i] = is;
        let xh = xhat.row_mut(i);
        for j in 0..d {
            xh[j] = (row[j] - mean) * is;
        }
        let o = out.row_mut(i);
        let xh = xhat.row(i);
        for j in 0..d {
            o[j] = p.gain[j] * xh[j] + p.bias[j];
        }
    }
    LnCache { xhat, inv_std, out }
}

/// Copies columns `[c0, c0 + w)` of `m` into a fresh `(rows x w)` matrix.
pub(crate) fn col_block(m: &Matrix, c0: usize, w: usize) -> Matrix {
    Matrix::from_fn(m.rows(), w, |i, j| m.at(i, c0 + j))
}

/// Adds `src` into columns `[c0, c0 + src.cols())` of `dst`.
pub(crate) fn add_col_block(dst: &mut Matrix, c0: usize, src: &Matrix) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let v = dst.at(i, c0 + j) + src.at(i, j);
            dst.set(i, c0 + j, v);
        }
    }
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = a.clone();
    for (o, &x) in out.data_mut().iter_mut().zip(b.data()) {
        *o += x;
    }
    out
}

/// Runs the model over `tokens`, returning the full activation cache.
pub fn forward(params: &Parameters, tokens: &[usize], mode: LogitsMode) -> Result<ForwardCache> {
    let cfg = &params.config;
    let t_len = tokens.len();
    if t_len == 0 {
        return Err(ModelError::Sequence("empty token sequence".into()));
    }
    if t_len > cfg.context_len {
        return Err(ModelError::Sequence(format!(
            "sequence length {} exceeds context {}",
            t_len, cfg.context_len
        )));
    }
    if let Some(&bad) = tokens.iter().find(|&&t| t >= cfg.vocab_size) {
        return Err(ModelError::Sequence(format!("token id {bad} out of range")));
    }

    let d = cfg.d_model;
    let dh = cfg.head_dim();
    let scale = 1.0 / (dh as f64).sqrt();

    let mut x = Matrix::zeros(t_len, d);
    for (i, &tok) in tokens.iter().enumerate() {
        let (e, p) = (params.tok_emb.row(tok), params.pos_emb.row(i));
        let row = x.row_mut(i);
        for j in 0..d {
            row[j] = e[j] + p[j];
        }
    }

    let mut xs = vec![x];
    let mut blocks = Vec::with_capacity(cfg.n_layers);
    for b in &params.blocks {
        let x_in = xs.last().expect("nonempty stream");
        let ln1 = layer_norm(x_in, &b.ln1);
        let q = ln1.out.matmul_nt(&b.wq);
        let k = ln1.out.matmul_nt(&b.wk);
        let v = ln1.out.matmul_nt(&b.wv);

        let mut ctx = Matrix::zeros(t_len, d);
        let mut att = Vec::with_capacity(cfg.n_heads);
        for h in 0..cfg.n_heads {
            let c0 = h * dh;
            let qh = col_block(&q, c0, dh);
            let kh = col_block(&k, c0, dh);
            let vh = col_block(&v, c0, dh);
            let mut a = Matrix::zeros(t_len, t_len);
            for i in 0..t_len {
                let qi = qh.row(i);
                for j in 0..=i {
                    let kj = kh.row(j);
                    let s: f64 = qi.iter().zip(kj).map(|(a, b)| a * b).sum();
                    a.set(i, j, s * scale);
                }
                softmax_prefix(a.row_mut(i), i + 1);
            }
            let ctx_h = a.matmul(&vh);
            add_col_block(&mut ctx, c0, &ctx_h);
            att.push(a);
        }
        let attn_out = ctx.matmul_nt(&b.wo);
        let x_mid = add(x_in, &attn_out);

        let ln2 = layer_norm(&x_mid, &b.ln2);
        let pre = ln2.out.matmul_nt(&b.ff1);
        let mut act = pre.clone();
        for v in act.data_mut() {
            *v = gelu(*v);
        }
        let ff_out = act.matmul_nt(&b.ff2);
        let x_out = add(&x_mid, &ff_out);

        blocks.push(BlockCache { ln1, q, k, v, att, ctx, ln2, pre, act });
        xs.push(x_out);
    }

    let ln_f = layer_norm(xs.last().expect("nonempty stream"), &params.ln_f);
    let logits = match mode {
        LogitsMode::All => Logits::All(ln_f.out.matmul_nt(&params.unemb)),
        LogitsMode::LastOnly => {
            Logits::Last(params.unemb.matvec(ln_f.out.row(t_len - 1)))
        }
    };

    Ok(ForwardCache { tokens: tokens.to_vec(), xs, blocks, ln_f, logits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ModelConfig;

    fn tiny() -> ModelConfig {
        ModelConfig {
            vocab_size: 12,
            d_model: 8,
            d_ff: 16,
            n_layers: 2,
            n_heads: 2,
            context_len: 6,
        }
    }

    #[test]
    fn last_only_matches_full_logits_at_last_position() {
        let p = Parameters::init(&tiny(), 0.5, 3);
        let tokens = [1, 5, 7, 2];
        let full = forward(&p, &tokens, LogitsMode::All).unwrap();
        let last = forward(&p, &tokens, LogitsMode::LastOnly).unwrap();
        let a = full.logits.last();
        let b = last.logits.last();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn causality_leaves_prefix_logits_unchanged() {
        let p = Parameters::init(&tiny(), 0.5, 4);
        let short = forward(&p, &[3, 9, 4], LogitsMode::All).unwrap();
        let long = forward(&p, &[3, 9, 4, 11, 1], LogitsMode::All).unwrap();
        let (Logits::All(ls), Logits::All(ll)) = (&short.logits, &long.logits) else {
            unreachable!()
        };
        for i in 0..3 {
            for t in 0..12 {
                assert!(
                    (ls.at(i, t) - ll.at(i, t)).abs() < 1e-12,
                    "position {i}, token {t}"
                );
            }
        }
    }

    #[test]
    fn trace_final_entry_projects_to_actual_logits() {
        let p = Parameters::init(&tiny(), 0.5, 5);
        let cache = forward(&p, &[1, 2, 3], LogitsMode::LastOnly).unwrap();
        let trace = cache.last_position_trace();
        assert_eq!(trace.len(), 3); // embeddings + 2 blocks
        let projected = p.unemb.matvec(trace.last().unwrap());
        let actual = cache.logits.last();
        for (a, b) in projected.iter().zip(&actual) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sequence_validation_rejects_bad_input() {
        let p = Parameters::init(&tiny(), 0.5, 0);
        assert!(forward(&p, &[], LogitsMode::All).is_err());
        assert!(forward(&p, &[0; 7], LogitsMode::All).is_err());
        assert!(forward(&p, &[12], LogitsMode::All).is_err());
    }

    #[test]
    fn attention_rows_are_causal_distributions() {
        let p = Parameters::init(&tiny(), 0.5, 6);
        let cache = forward(&p, &[1, 2, 3, 4], LogitsMode::LastOnly).unwrap();
        for bc in &cache.blocks {
            for a in &bc.att {
                for i in 0..4 {
                    let row_sum: f64 = a.row(i)[..=i].iter().sum();
                    assert!((row_sum - 1.0).abs() < 1e-12);
                    for j in i + 1..4 {
                        assert_eq!(a.at(i, j), 0.0);
                    }
                }
            }
        }
    }
}
