//! Engine configuration: rank targets, margins, budgets, and the neuron
//! selection strategy.

use serde::{Deserialize, Serialize};

use crate::{Result, RevsError};

/// How candidate FF2 columns are ordered within a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronStrategy {
    /// Activation top-k pre-filter, then strongest token association first
    /// (ascending in-neuron token rank). The default.
    Hybrid,
    /// Descending raw activation over all columns.
    Activations,
    /// Ascending in-neuron token rank over all columns.
    Rank,
    /// Descending absolute gradient of the target-token loss with respect to
    /// the activation.
    Gradient,
    /// Seeded shuffle of all columns.
    Random,
    /// Hybrid ordering, but selected columns are zeroed outright instead of
    /// rank-edited.
    Zero,
}

fn default_grow() -> f64 {
    1.3
}
fn default_shrink() -> f64 {
    0.8
}
fn default_init_logit() -> f64 {
    -10.0
}
fn default_max_edit_iters() -> usize {
    100
}
fn default_strategy() -> NeuronStrategy {
    NeuronStrategy::Hybrid
}

/// Tunable parameters of the editing engine.
///
/// Rank conventions: rank 1 is the most probable token. `r_d` is the hidden
/// state rank below which a layer is considered to still "know" the target
/// and gets edited; `r_n` is the deep rank an edited neuron's own vocabulary
/// projection should place the token at, within `eps_rn`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RevsConfig {
    /// Desired hidden-state rank threshold: layers with rank below this are
    /// selected for editing, and editing stops once the rank reaches it.
    pub r_d: usize,
    /// Margin on `r_d` used by evaluation-side demotion checks.
    pub eps_rd: usize,
    /// Desired in-neuron rank for edited columns.
    pub r_n: usize,
    /// Tolerance around `r_n` for declaring a neuron edit converged.
    pub eps_rn: usize,
    /// Maximum number of neurons edited per layer per unlearn call.
    pub n_max: usize,
    /// Activation pre-filter size for the hybrid strategy.
    pub act_top_k: usize,
    /// Multiplier applied to the inserted logit when the token is still too
    /// prominent (drives the negative logit further down).
    pub grow_factor: f64,
    /// Multiplier applied when the token overshot below the desired rank.
    pub shrink_factor: f64,
    /// Starting value for the inserted target-token logit.
    pub init_logit: f64,
    /// Hard cap on iterations per neuron edit.
    pub max_edit_iters: usize,
    /// Candidate ordering strategy.
    pub neuron_strategy: NeuronStrategy,
    /// Seed for the random strategy's shuffles.
    pub seed: u64,
}

impl Default for RevsConfig {
    /// Placeholder sized for nothing in particular; real uses derive the rank
    /// targets from the vocabulary via [`RevsConfig::desk_default`] or spell
    /// them out. Exists so serde can fill omitted fields.
    fn default() -> Self {
        Self::desk_default(1000)
    }
}

impl RevsConfig {
    /// Defaults that scale with the vocabulary: the rank targets are the
    /// reference ratios (0.6% for the hidden threshold, 82% of the way down
    /// for the in-neuron target) applied to `vocab_size`.
    pub fn desk_default(vocab_size: usize) -> Self {
        let v = vocab_size as f64;
        Self {
            r_d: (0.006 * v).ceil() as usize,
            eps_rd: (0.002 * v).ceil() as usize,
            r_n: (0.8 * v).floor() as usize,
            eps_rn: (0.05 * v).ceil() as usize,
            n_max: 24,
            act_top_k: 128,
            grow_factor: default_grow(),
            shrink_factor: default_shrink(),
            init_logit: default_init_logit(),
            max_edit_iters: default_max_edit_iters(),
            neuron_strategy: default_strategy(),
            seed: 0,
        }
    }

    /// Checks every config invariant against a concrete model shape. The
    /// operations themselves only enforce what they locally need (for
    /// example `act_top_k <= d_ff` at selection time), so degenerate configs
    /// such as `r_d = 1` flow through as no-ops; call this at the boundary
    /// where configs are accepted.
    pub fn validate(&self, vocab_size: usize, d_ff: usize) -> Result<()> {
        let fail = |msg: String| Err(RevsError::Config(msg));
        if self.r_d <= 1 || self.r_d > vocab_size {
            return fail(format!("r_d {} must satisfy 1 < r_d <= |V| = {vocab_size}", self.r_d));
        }
        if self.r_n == 0 || self.r_n > vocab_size {
            return fail(format!("r_n {} must satisfy 1 <= r_n <= |V| = {vocab_size}", self.r_n));
        }
        if self.n_max == 0 {
            return fail("n_max must be at least 1".into());
        }
        if self.act_top_k == 0 || self.act_top_k > d_ff {
            return fail(format!(
                "act_top_k {} must satisfy 1 <= act_top_k <= d_ff = {d_ff}",
                self.act_top_k
            ));
        }
        if !(self.shrink_factor > 0.0 && self.shrink_factor < 1.0) {
            return fail(format!("shrink_factor {} must lie in (0, 1)", self.shrink_factor));
        }
        if !(self.grow_factor > 1.0 && self.grow_factor.is_finite()) {
            return fail(format!("grow_factor {} must exceed 1", self.grow_factor));
        }
        if !self.init_logit.is_finite() || self.init_logit >= 0.0 {
            return fail(format!("init_logit {} must be finite and negative", self.init_logit));
        }
        if self.max_edit_iters == 0 {
            return fail("max_edit_iters must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_defaults_scale_with_vocabulary() {
        let c = RevsConfig::desk_default(583);
        assert_eq!(c.r_d, 4);
        assert_eq!(c.eps_rd, 2);
        assert_eq!(c.r_n, 466);
        assert_eq!(c.eps_rn, 30);
        assert_eq!(c.grow_factor, 1.3);
        assert_eq!(c.shrink_factor, 0.8);
        assert_eq!(c.init_logit, -10.0);
        assert_eq!(c.max_edit_iters, 100);
        assert_eq!(c.neuron_strategy, NeuronStrategy::Hybrid);
        c.validate(583, 256).unwrap();

        let big = RevsConfig::desk_default(128_256);
        assert_eq!(big.r_d, 770);
        assert_eq!(big.eps_rd, 257);
        assert_eq!(big.r_n, 102_604);
        assert_eq!(big.eps_rn, 6413);
    }

    #[test]
    fn validate_rejects_each_broken_invariant() {
        let ok = RevsConfig::desk_default(583);
        ok.validate(583, 256).unwrap();

        let cases: Vec<(&str, RevsConfig)> = vec![
            ("r_d of 1", RevsConfig { r_d: 1, ..ok.clone() }),
            ("r_d above vocab", RevsConfig { r_d: 584, ..ok.clone() }),
            ("r_n of 0", RevsConfig { r_n: 0, ..ok.clone() }),
            ("r_n above vocab", RevsConfig { r_n: 584, ..ok.clone() }),
            ("n_max of 0", RevsConfig { n_max: 0, ..ok.clone() }),
            ("act_top_k of 0", RevsConfig { act_top_k: 0, ..ok.clone() }),
            ("act_top_k above d_ff", RevsConfig { act_top_k: 257, ..ok.clone() }),
            ("shrink of 1", RevsConfig { shrink_factor: 1.0, ..ok.clone() }),
            ("shrink of 0", RevsConfig { shrink_factor: 0.0, ..ok.clone() }),
            ("grow of 1", RevsConfig { grow_factor: 1.0, ..ok.clone() }),
            ("grow of NaN", RevsConfig { grow_factor: f64::NAN, ..ok.clone() }),
            ("positive init logit", RevsConfig { init_logit: 10.0, ..ok.clone() }),
            ("NaN init logit", RevsConfig { init_logit: f64::NAN, ..ok.clone() }),
            ("max_edit_iters of 0", RevsConfig { max_edit_iters: 0, ..ok.clone() }),
        ];
        for (what, cfg) in cases {
            assert!(
                matches!(cfg.validate(583, 256), Err(RevsError::Config(_))),
                "{what} should be rejected"
            );
        }
    }

    #[test]
    fn serde_fills_omitted_fields_with_defaults() {
        let cfg: RevsConfig =
            serde_json::from_str(r#"{"r_d": 4, "eps_rd": 2, "r_n": 466, "eps_rn": 30}"#).unwrap();
        assert_eq!(cfg.grow_factor, 1.3);
        assert_eq!(cfg.shrink_factor, 0.8);
        assert_eq!(cfg.init_logit, -10.0);
        assert_eq!(cfg.max_edit_iters, 100);
        assert_eq!(cfg.neuron_strategy, NeuronStrategy::Hybrid);

        let err = serde_json::from_str::<RevsConfig>(r#"{"r_dd": 4}"#);
        assert!(err.is_err(), "unknown fields should be rejected");
    }
}
