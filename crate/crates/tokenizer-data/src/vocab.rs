//! Word-level tokenizer with single-character fallback.
//!
//! Splitting is context-free: alphanumeric runs are words, every other
//! non-whitespace character is its own token, whitespace only separates.
//! Unknown words fall back to per-character tokens (this is what keeps the
//! perturbation attack's re-tokenization meaningful when an insertion splits
//! a word), and unknown characters become UNK.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::{DataError, Result};

/// Reserved padding token (never produced by tokenize).
pub const PAD: usize = 0;
/// Reserved beginning-of-sequence token; every tokenized text starts with it.
pub const BOS: usize = 1;
/// Reserved unknown-character token.
pub const UNK: usize = 2;

const RESERVED: [&str; 3] = ["<pad>", "<bos>", "<unk>"];

/// Punctuation rendered with no space before it.
const ATTACH_LEFT: [&str; 6] = [",", ".", ":", ";", "!", "?"];
/// Punctuation rendered with no space on either side.
const ATTACH_BOTH: [&str; 3] = ["-", "/", "@"];

/// Token table with frequency-ranked ids.
///
/// Invariants: ids are 0-based and contiguous; ids 0-2 are the reserved
/// tokens; for ids >= 3 the corpus frequency is non-increasing, ties broken
/// lexicographically on the token string.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    id_of: HashMap<String, usize>,
    frequency: Vec<u64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token_str(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn id_of(&self, token: &str) -> Option<usize> {
        self.id_of.get(token).copied()
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.frequency[id]
    }

    /// Rebuilds a vocabulary from a serialized token list (dataset load path).
    /// Frequencies are recounted from the accompanying sentences.
    pub fn from_token_list(tokens: Vec<String>, sentences: &[Vec<usize>]) -> Result<Self> {
        if tokens.len() < RESERVED.len() {
            return Err(DataError::Invalid("vocabulary shorter than reserved set".into()));
        }
        for (i, r) in RESERVED.iter().enumerate() {
            if tokens[i] != *r {
                return Err(DataError::Invalid(format!(
                    "reserved token {i} is {:?}, expected {r:?}",
                    tokens[i]
                )));
            }
        }
        let mut id_of = HashMap::with_capacity(tokens.len());
        for (id, t) in tokens.iter().enumerate() {
            if id_of.insert(t.clone(), id).is_some() {
                return Err(DataError::Invalid(format!("duplicate token {t:?}")));
            }
        }
        let mut frequency = vec![0u64; tokens.len()];
        for sentence in sentences {
            for &id in sentence {
                if id >= tokens.len() {
                    return Err(DataError::Invalid(format!("token id {id} out of range")));
                }
                if id > UNK {
                    frequency[id] += 1;
                }
            }
        }
        Ok(Self { tokens, id_of, frequency })
    }

    /// Tokenizes text into ids, BOS-prefixed.
    pub fn tokenize(&self, text: &str) -> Vec<usize> {
        let mut ids = vec![BOS];
        for word in split_words(text) {
            if let Some(&id) = self.id_of.get(&word) {
                ids.push(id);
            } else {
                for ch in word.chars() {
                    ids.push(self.id_of.get(ch.to_string().as_str()).copied().unwrap_or(UNK));
                }
            }
        }
        ids
    }

    /// Renders ids back to text. PAD and BOS are skipped; attach-left
    /// punctuation binds to the previous word, attach-both punctuation binds
    /// on both sides, everything else is space-separated. Round-trips exactly
    /// for every generated sentence.
    pub fn detokenize(&self, ids: &[usize]) -> String {
        let mut out = String::new();
        let mut prev_attaches_right = false;
        for &id in ids {
            if id == PAD || id == BOS {
                continue;
            }
            let tok = self.token_str(id);
            let attach_left = ATTACH_LEFT.contains(&tok);
            let attach_both = ATTACH_BOTH.contains(&tok);
            if !out.is_empty() && !prev_attaches_right && !attach_left && !attach_both {
                out.push(' ');
            }
            out.push_str(tok);
            prev_attaches_right = attach_both;
        }
        out
    }
}

/// Context-free word splitter: alphanumeric runs plus individual punctuation
/// characters, whitespace dropped.
pub(crate) fn split_words(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut run = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            run.push(ch);
        } else {
            if !run.is_empty() {
                words.push(std::mem::take(&mut run));
            }
            if !ch.is_whitespace() {
                words.push(ch.to_string());
            }
        }
    }
    if !run.is_empty() {
        words.push(run);
    }
    words
}

/// Builds a vocabulary over a corpus: word tokens plus single-character
/// fallback tokens covering the corpus alphabet, ids assigned by descending
/// frequency then lexicographic order, after the three reserved tokens.
pub fn build_vocabulary(corpus: &[String]) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(DataError::EmptyCorpus);
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut alphabet: BTreeSet<char> = BTreeSet::new();
    let mut saw_any = false;
    for text in corpus {
        for word in split_words(text) {
            saw_any = true;
            *counts.entry(word).or_insert(0) += 1;
        }
        alphabet.extend(text.chars().filter(|c| !c.is_whitespace()));
    }
    if !saw_any {
        return Err(DataError::EmptyCorpus);
    }
    // Character fallbacks that never occur as standalone words get count 0,
    // which sorts them after every real word.
    for ch in &alphabet {
        counts.entry(ch.to_string()).or_insert(0);
    }
    for r in RESERVED {
        if counts.contains_key(r) {
            return Err(DataError::Invalid(format!(
                "corpus contains reserved token text {r:?}"
            )));
        }
    }

    let mut entries: Vec<(String, u64)> = counts.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut tokens: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
    let mut frequency: Vec<u64> = vec![0; RESERVED.len()];
    for (tok, count) in entries {
        tokens.push(tok);
        frequency.push(count);
    }
    let id_of = tokens
        .iter()
        .enumerate()
        .map(|(id, t)| (t.clone(), id))
        .collect();
    Ok(Vocabulary { tokens, id_of, frequency })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(texts: &[&str]) -> Vec<String> {
        texts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn frequency_order_matches_spec_example() {
        let v = build_vocabulary(&corpus(&["a a b"])).unwrap();
        assert_eq!(v.token_str(PAD), "<pad>");
        assert_eq!(v.token_str(BOS), "<bos>");
        assert_eq!(v.token_str(UNK), "<unk>");
        assert_eq!(v.id_of("a"), Some(3));
        assert_eq!(v.id_of("b"), Some(4));
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn frequencies_are_non_increasing_beyond_reserved() {
        let v = build_vocabulary(&corpus(&["the cat sat on the mat", "the dog"])).unwrap();
        for id in 4..v.len() {
            assert!(v.frequency(id - 1) >= v.frequency(id), "id {id}");
        }
    }

    #[test]
    fn character_fallback_covers_split_words() {
        let v = build_vocabulary(&corpus(&["payroll 6789"])).unwrap();
        // "67 89" never occurred as words; both fall back to digit characters.
        let ids = v.tokenize("67 89");
        let expect: Vec<usize> = [BOS]
            .into_iter()
            .chain(["6", "7", "8", "9"].iter().map(|c| v.id_of(c).unwrap()))
            .collect();
        assert_eq!(ids, expect);
    }

    #[test]
    fn unknown_characters_become_unk() {
        let v = build_vocabulary(&corpus(&["plain words"])).unwrap();
        let ids = v.tokenize("plain + words");
        assert_eq!(ids[2], UNK);
    }

    #[test]
    fn detokenize_join_rules() {
        let v = build_vocabulary(&corpus(&["SSN: 123-45-6789, filed on 3-7-2019."])).unwrap();
        let ids = v.tokenize("SSN: 123-45-6789, filed on 3-7-2019.");
        assert_eq!(v.detokenize(&ids), "SSN: 123-45-6789, filed on 3-7-2019.");
    }

    #[test]
    fn empty_corpus_rejected() {
        assert!(matches!(build_vocabulary(&[]), Err(DataError::EmptyCorpus)));
        assert!(matches!(build_vocabulary(&corpus(&["  "])), Err(DataError::EmptyCorpus)));
    }
}
