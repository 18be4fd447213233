//! Parameter containers and the canonical tensor enumeration.
//!
//! Every consumer of the full parameter set (Adam, gradient clipping,
//! checkpointing) walks the same named, ordered tensor list, so the flat
//! optimizer state, the checkpoint layout, and the gradient container all
//! stay aligned by construction.

use core_linalg::Matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::config::ModelConfig;

/// Gain and bias of one layer norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerNormParams {
    pub gain: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LayerNormParams {
    fn identity(d: usize) -> Self {
        Self { gain: vec![1.0; d], bias: vec![0.0; d] }
    }

    fn zeros(d: usize) -> Self {
        Self { gain: vec![0.0; d], bias: vec![0.0; d] }
    }
}

/// One transformer block. Weight matrices are stored `(out x in)`, i.e. they
/// act as `W x` on column vectors; batched positions use `X W^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockParams {
    pub ln1: LayerNormParams,
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
    pub wo: Matrix,
    pub ln2: LayerNormParams,
    /// `(d_ff x d_model)`: expands positions into neuron pre-activations.
    pub ff1: Matrix,
    /// `(d_model x d_ff)`: column `j` is neuron `j`'s output direction in the
    /// residual stream. Vocabulary-space edits rewrite these columns.
    pub ff2: Matrix,
}

/// The full parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters {
    pub config: ModelConfig,
    /// `(vocab x d_model)`, one embedding row per token.
    pub tok_emb: Matrix,
    /// `(context x d_model)`, learned absolute positions.
    pub pos_emb: Matrix,
    pub blocks: Vec<BlockParams>,
    pub ln_f: LayerNormParams,
    /// `(vocab x d_model)`: logits are `U h`.
    pub unemb: Matrix,
}

/// Read-only view of one named tensor. Vectors appear as a single row.
pub struct TensorView<'a> {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: &'a [f64],
}

impl Parameters {
    /// Seeded Gaussian init: weights `N(0, init_std^2)`, layer norms identity.
    pub fn init(config: &ModelConfig, init_std: f64, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, init_std).expect("finite init_std");
        let mut fill = |rows: usize, cols: usize| {
            Matrix::from_fn(rows, cols, |_, _| normal.sample(&mut rng))
        };
        let (v, d, f, c) = (config.vocab_size, config.d_model, config.d_ff, config.context_len);
        let tok_emb = fill(v, d);
        let pos_emb = fill(c, d);
        let blocks = (0..config.n_layers)
            .map(|_| BlockParams {
                ln1: LayerNormParams::identity(d),
                wq: fill(d, d),
                wk: fill(d, d),
                wv: fill(d, d),
                wo: fill(d, d),
                ln2: LayerNormParams::identity(d),
                ff1: fill(f, d),
                ff2: fill(d, f),
            })
            .collect();
        let ln_f = LayerNormParams::identity(d);
        let unemb = fill(v, d);
        Self { config: config.clone(), tok_emb, pos_emb, blocks, ln_f, unemb }
    }

    /// All-zero container with the same shapes; used for gradients.
    pub fn zeros_like(config: &ModelConfig) -> Self {
        let (v, d, f, c) = (config.vocab_size, config.d_model, config.d_ff, config.context_len);
        Self {
            config: config.clone(),
            tok_emb: Matrix::zeros(v, d),
            pos_emb: Matrix::zeros(c, d),
            blocks: (0..config.n_layers)
                .map(|_| BlockParams {
                    ln1: LayerNormParams::zeros(d),
                    wq: Matrix::zeros(d, d),
                    wk: Matrix::zeros(d, d),
                    wv: Matrix::zeros(d, d),
                    wo: Matrix::zeros(d, d),
                    ln2: LayerNormParams::zeros(d),
                    ff1: Matrix::zeros(f, d),
                    ff2: Matrix::zeros(d, f),
                })
                .collect(),
            ln_f: LayerNormParams::zeros(d),
            unemb: Matrix::zeros(v, d),
        }
    }

    pub fn set_all_zero(&mut self) {
        for (_, s) in self.tensor_slices_mut() {
            s.fill(0.0);
        }
    }

    pub fn param_count(&self) -> usize {
        self.tensor_views().iter().map(|t| t.data.len()).sum()
    }

    /// Named tensors in canonical order.
    pub fn tensor_views(&self) -> Vec<TensorView<'_>> {
        fn mat(name: String, m: &Matrix) -> TensorView<'_> {
            TensorView { name, rows: m.rows(), cols: m.cols(), data: m.data() }
        }
        fn vec(name: String, v: &[f64]) -> TensorView<'_> {
            TensorView { name, rows: 1, cols: v.len(), data: v }
        }
        let mut out = Vec::new();
        out.push(mat("tok_emb".into(), &self.tok_emb));
        out.push(mat("pos_emb".into(), &self.pos_emb));
        for (i, b) in self.blocks.iter().enumerate() {
            out.push(vec(format!("layers.{i}.ln1.gain"), &b.ln1.gain));
            out.push(vec(format!("layers.{i}.ln1.bias"), &b.ln1.bias));
            out.push(mat(format!("layers.{i}.attn.wq"), &b.wq));
            out.push(mat(format!("layers.{i}.attn.wk"), &b.wk));
            out.push(mat(format!("layers.{i}.attn.wv"), &b.wv));
            out.push(mat(format!("layers.{i}.attn.wo"), &b.wo));
            out.push(vec(format!("layers.{i}.ln2.gain"), &b.ln2.gain));
            out.push(vec(format!("layers.{i}.ln2.bias"), &b.ln2.bias));
            out.push(mat(format!("layers.{i}.ff1"), &b.ff1));
            out.push(mat(format!("layers.{i}.ff2"), &b.ff2));
        }
        out.push(vec("ln_f.gain".into(), &self.ln_f.gain));
        out.push(vec("ln_f.bias".into(), &self.ln_f.bias));
        out.push(mat("unemb".into(), &self.unemb));
        out
    }

    /// Mutable flat slices in the same canonical order as `tensor_views`.
    pub fn tensor_slices_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let mut out: Vec<(String, &mut [f64])> = Vec::new();
        out.push(("tok_emb".into(), self.tok_emb.data_mut()));
        out.push(("pos_emb".into(), self.pos_emb.data_mut()));
        for (i, b) in self.blocks.iter_mut().enumerate() {
            out.push((format!("layers.{i}.ln1.gain"), b.ln1.gain.as_mut_slice()));
            out.push((format!("layers.{i}.ln1.bias"), b.ln1.bias.as_mut_slice()));
            out.push((format!("layers.{i}.attn.wq"), b.wq.data_mut()));
            out.push((format!("layers.{i}.attn.wk"), b.wk.data_mut()));
            out.push((format!("layers.{i}.attn.wv"), b.wv.data_mut()));
            out.push((format!("layers.{i}.attn.wo"), b.wo.data_mut()));
            out.push((format!("layers.{i}.ln2.gain"), b.ln2.gain.as_mut_slice()));
            out.push((format!("layers.{i}.ln2.bias"), b.ln2.bias.as_mut_slice()));
            out.push((format!("layers.{i}.ff1"), b.ff1.data_mut()));
            out.push((format!("layers.{i}.ff2"), b.ff2.data_mut()));
        }
        out.push(("ln_f.gain".into(), self.ln_f.gain.as_mut_slice()));
        out.push(("ln_f.bias".into(), self.ln_f.bias.as_mut_slice()));
        out.push(("unemb".into(), self.unemb.data_mut()));
        out
    }
}
