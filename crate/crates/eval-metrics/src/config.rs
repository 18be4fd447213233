//! Metric evaluation configuration.

use serde::{Deserialize, Serialize};

use crate::{MetricError, Result};

/// Candidate cap and split protocol for one evaluation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    /// Rank cap k of the normalized Score@k: a token ranked at or beyond k
    /// counts as fully demoted. Reference models use 100; the desk scale
    /// uses 20.
    pub k: usize,
    /// Seeds of the forget/retain split shuffles, one evaluation per seed.
    pub splits: Vec<u64>,
}

impl MetricConfig {
    /// Desk-scale defaults: k = 20 and three split seeds.
    pub fn desk_default() -> Self {
        Self { k: 20, splits: vec![0, 1, 2] }
    }

    /// Checks 1 <= k <= |V| and a non-empty split list.
    pub fn validate(&self, vocab_size: usize) -> Result<()> {
        if self.k < 1 || self.k > vocab_size {
            return Err(MetricError::InvalidScore {
                what: format!("k (vocabulary size {vocab_size})"),
                value: self.k as f64,
            });
        }
        if self.splits.is_empty() {
            return Err(MetricError::EmptyAggregate);
        }
        Ok(())
    }
}
