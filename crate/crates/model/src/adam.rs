//! Adam with bias correction over the canonical flat parameter order.

use crate::params::Parameters;

pub struct AdamState {
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    /// `total_len` must equal `Parameters::param_count()`.
    pub fn new(total_len: usize) -> Self {
        Self { step: 0, m: vec![0.0; total_len], v: vec![0.0; total_len] }
    }

    /// One update. `grads` must be shaped exactly like `params`; both are
    /// walked in canonical tensor order, which keeps the flat moment vectors
    /// aligned across calls.
    pub fn step(
        &mut self,
        params: &mut Parameters,
        grads: &Parameters,
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
    ) {
        self.step += 1;
        let bc1 = 1.0 - beta1.powi(self.step as i32);
        let bc2 = 1.0 - beta2.powi(self.step as i32);
        let mut offset = 0;
        let gviews = grads.tensor_views();
        for ((name, p), gv) in params.tensor_slices_mut().into_iter().zip(&gviews) {
            debug_assert_eq!(name, gv.name, "parameter/gradient tensor order diverged");
            let g = gv.data;
            let m = &mut self.m[offset..offset + g.len()];
            let v = &mut self.v[offset..offset + g.len()];
            for i in 0..g.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                let mhat = m[i] / bc1;
                let vhat = v[i] / bc2;
                p[i] -= lr * mhat / (vhat.sqrt() + eps);
            }
            offset += g.len();
        }
        debug_assert_eq!(offset, self.m.len(), "moment vectors misaligned");
    }
}
