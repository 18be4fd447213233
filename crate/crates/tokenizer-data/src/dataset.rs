//! Dataset types and their canonical JSON file format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::vocab::{Vocabulary, BOS};
use crate::{canon, DataError, Result};

/// Which side of the unlearning protocol a target belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Forget,
    Retain,
}

/// One secret token together with its position in the secret sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenPos {
    pub id: usize,
    pub pos: usize,
}

/// One sensitive sequence: its prompt, the memorized continuation, the token
/// subset selected for unlearning, and unseen prompts for generalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub target_id: String,
    pub prompt: Vec<usize>,
    pub secret: Vec<usize>,
    pub unlearn_tokens: Vec<TokenPos>,
    pub generalization_prompts: Vec<Vec<usize>>,
    pub split: Split,
}

impl TargetSpec {
    /// The probe prompt for the secret token at `pos`: the target prompt
    /// extended with the secret prefix before that position (next-token
    /// semantics for non-initial secret tokens).
    pub fn prompt_with_secret_prefix(&self, pos: usize) -> Vec<usize> {
        let mut p = self.prompt.clone();
        p.extend_from_slice(&self.secret[..pos]);
        p
    }
}

/// A generated corpus: every sentence of the training set plus the target
/// bookkeeping on top of it.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub seed: u64,
    pub vocab: Vocabulary,
    pub sentences: Vec<Vec<usize>>,
    pub targets: Vec<TargetSpec>,
    pub template_domain_counts: BTreeMap<String, usize>,
}

/// Serialized shape of the dataset file.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    seed: u64,
    vocabulary: Vec<String>,
    sentences: Vec<Vec<usize>>,
    targets: Vec<TargetSpec>,
    template_domain_counts: BTreeMap<String, usize>,
}

impl SyntheticDataset {
    pub fn forget_targets(&self) -> impl Iterator<Item = &TargetSpec> {
        self.targets.iter().filter(|t| t.split == Split::Forget)
    }

    pub fn retain_targets(&self) -> impl Iterator<Item = &TargetSpec> {
        self.targets.iter().filter(|t| t.split == Split::Retain)
    }

    /// Canonical JSON rendering (sorted keys, LF, trailing newline).
    pub fn to_canonical_json(&self) -> Result<String> {
        let file = DatasetFile {
            seed: self.seed,
            vocabulary: self.vocab.tokens().to_vec(),
            sentences: self.sentences.clone(),
            targets: self.targets.clone(),
            template_domain_counts: self.template_domain_counts.clone(),
        };
        Ok(canon::to_canonical_json(&file)?)
    }

    /// Parses and validates a dataset file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DatasetFile = serde_json::from_str(text)?;
        let vocab = Vocabulary::from_token_list(file.vocabulary, &file.sentences)?;
        let ds = Self {
            seed: file.seed,
            vocab,
            sentences: file.sentences,
            targets: file.targets,
            template_domain_counts: file.template_domain_counts,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Structural invariants shared by generation and load.
    pub(crate) fn validate(&self) -> Result<()> {
        let v = self.vocab.len();
        let check_ids = |ids: &[usize], what: &str| -> Result<()> {
            if ids.is_empty() {
                return Err(DataError::Invalid(format!("{what} is empty")));
            }
            if let Some(&bad) = ids.iter().find(|&&id| id >= v) {
                return Err(DataError::Invalid(format!("{what} has out-of-range id {bad}")));
            }
            Ok(())
        };
        for (i, s) in self.sentences.iter().enumerate() {
            check_ids(s, &format!("sentence {i}"))?;
            if s[0] != BOS {
                return Err(DataError::Invalid(format!("sentence {i} does not start with BOS")));
            }
        }
        for t in &self.targets {
            check_ids(&t.prompt, &format!("{} prompt", t.target_id))?;
            check_ids(&t.secret, &format!("{} secret", t.target_id))?;
            for tp in &t.unlearn_tokens {
                if tp.pos >= t.secret.len() || t.secret[tp.pos] != tp.id {
                    return Err(DataError::Invalid(format!(
                        "{}: unlearn token {} not at secret position {}",
                        t.target_id, tp.id, tp.pos
                    )));
                }
            }
            for g in &t.generalization_prompts {
                check_ids(g, &format!("{} generalization prompt", t.target_id))?;
                if *g == t.prompt {
                    return Err(DataError::Invalid(format!(
                        "{}: generalization prompt equals the unlearn prompt",
                        t.target_id
                    )));
                }
            }
        }
        Ok(())
    }
}
