//! Deterministic synthetic corpus generation.
//!
//! The corpus memorization task must be well posed: each identity maps to
//! exactly one SSN, forget and retain identities are disjoint, and no two
//! sentences give conflicting continuations for the same prompt. Everything
//! is drawn from a single seeded RNG in a fixed order so that equal
//! `(config, seed)` pairs produce byte-identical datasets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Split, SyntheticDataset, TargetSpec};
use crate::select::{select_unlearn_tokens, TokenStrategy};
use crate::templates::all_templates;
use crate::vocab::build_vocabulary;
use crate::{DataError, Result};

/// Identities whose SSNs are memorized and then unlearned.
const FORGET_NAMES: [&str; 20] = [
    "Carlos Mendez",
    "Aisha Thornton",
    "Dmitri Volkov",
    "Priya Natarajan",
    "Johan Lindqvist",
    "Fatima Alvi",
    "Marcus Delgado",
    "Ingrid Solberg",
    "Kenji Okamoto",
    "Leila Haddad",
    "Tomas Herrera",
    "Nadia Petrov",
    "Samuel Adeyemi",
    "Greta Lindgren",
    "Rafael Quintero",
    "Mei Nakahara",
    "Viktor Antonov",
    "Zainab Khalil",
    "Oscar Villanueva",
    "Hana Fujimori",
];

/// Identities whose SSNs must survive unlearning untouched.
const RETAIN_NAMES: [&str; 20] = [
    "Lucas Moreira",
    "Amara Diallo",
    "Pavel Sorokin",
    "Divya Raghavan",
    "Erik Johansson",
    "Yasmin Farouk",
    "Diego Salazar",
    "Astrid Nilsen",
    "Haruto Shimizu",
    "Noor Mansour",
    "Andres Cabrera",
    "Vera Morozova",
    "Daniel Okonkwo",
    "Freya Lindholm",
    "Emilio Casares",
    "Yuki Tanimoto",
    "Sergei Baranov",
    "Salma Rashid",
    "Hugo Echeverria",
    "Rin Katsura",
];

/// Knobs for corpus size and unlearn-token selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// How many identities go into the forget split.
    pub n_forget_targets: usize,
    /// Sentences per forget identity; the first is the unlearn prompt, the
    /// rest become generalization prompts.
    pub prefixes_per_target: usize,
    /// Sentences about retain identities.
    pub n_retain_sentences: usize,
    /// How many secret tokens to select per target.
    pub unlearn_tokens_per_target: usize,
    /// Rule for picking those tokens.
    pub token_strategy: TokenStrategy,
    /// Token strings never selected for unlearning (typically separators).
    pub exclusions: Vec<String>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            n_forget_targets: 20,
            prefixes_per_target: 5,
            n_retain_sentences: 100,
            unlearn_tokens_per_target: 2,
            token_strategy: TokenStrategy::Rarest,
            exclusions: vec!["-".to_string()],
        }
    }
}

impl DatasetConfig {
    fn validate(&self) -> Result<()> {
        let n_templates = all_templates().len();
        if self.n_forget_targets == 0 || self.n_forget_targets > FORGET_NAMES.len() {
            return Err(DataError::Config(format!(
                "n_forget_targets must be in 1..={}, got {}",
                FORGET_NAMES.len(),
                self.n_forget_targets
            )));
        }
        if self.prefixes_per_target == 0 {
            return Err(DataError::Config("prefixes_per_target must be positive".into()));
        }
        if self.n_forget_targets * self.prefixes_per_target > n_templates {
            return Err(DataError::Config(format!(
                "forget split needs {} distinct templates but only {} exist",
                self.n_forget_targets * self.prefixes_per_target,
                n_templates
            )));
        }
        if self.n_retain_sentences > RETAIN_NAMES.len() * n_templates {
            return Err(DataError::Config(format!(
                "n_retain_sentences {} exceeds the {} distinct (identity, template) pairs",
                self.n_retain_sentences,
                RETAIN_NAMES.len() * n_templates
            )));
        }
        if self.unlearn_tokens_per_target == 0 {
            return Err(DataError::Config("unlearn_tokens_per_target must be positive".into()));
        }
        Ok(())
    }
}

/// Splitmix64-style per-target seed derivation, so token selection for one
/// target is independent of how many targets precede it.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n` SSN strings whose area and serial fields are assigned
/// bijectively — no two identities ever share an area or a serial — so
/// unlearning one identity's tokens cannot collide with another identity's
/// secret. The two-digit middle group is drawn freely (only 90 values
/// exist), but its higher corpus frequency keeps it out of the rarest-token
/// selection. Serials skip 2000..=2099 so they can never collide with a
/// date's year token.
fn sample_ssns(rng: &mut ChaCha20Rng, n: usize) -> Vec<String> {
    let mut area_set: BTreeSet<u32> = BTreeSet::new();
    while area_set.len() < n {
        area_set.insert(rng.gen_range(100..900));
    }
    let mut serial_set: BTreeSet<u32> = BTreeSet::new();
    while serial_set.len() < n {
        let s = rng.gen_range(1000..10000);
        if !(2000..2100).contains(&s) {
            serial_set.insert(s);
        }
    }
    let mut areas: Vec<u32> = area_set.into_iter().collect();
    let mut serials: Vec<u32> = serial_set.into_iter().collect();
    areas.shuffle(rng);
    serials.shuffle(rng);
    (0..n)
        .map(|i| format!("{}-{}-{}", areas[i], rng.gen_range(10..100), serials[i]))
        .collect()
}

/// Draws `n` distinct dates in `d-m-yyyy` form.
fn sample_dates(rng: &mut ChaCha20Rng, n: usize) -> Vec<String> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let day: u32 = rng.gen_range(1..29);
        let month: u32 = rng.gen_range(1..13);
        let year: u32 = rng.gen_range(2010..2024);
        let date = format!("{day}-{month}-{year}");
        if seen.insert(date.clone()) {
            out.push(date);
        }
    }
    out
}

/// Fills a template's placeholders. `date` is consulted only when the
/// template mentions `{date}`.
fn instantiate(template: &str, name: &str, ssn: &str, date: Option<&str>) -> String {
    let mut text = template.replace("{name}", name).replace("{ssn}", ssn);
    if let Some(d) = date {
        text = text.replace("{date}", d);
    }
    debug_assert!(!text.contains('{'), "unfilled placeholder in {text:?}");
    text
}

/// The instantiated text strictly before the SSN, trailing whitespace
/// trimmed. This is what a target's prompt is tokenized from.
fn prompt_prefix(template: &str, name: &str, date: Option<&str>) -> String {
    let at = template.find("{ssn}").expect("template lost its {ssn} placeholder");
    instantiate(&template[..at], name, "", date).trim_end().to_string()
}

struct SentencePlan {
    domain: &'static str,
    text: String,
    prefix: String,
}

fn plan_sentence(
    rng: &mut ChaCha20Rng,
    template: (&'static str, &'static str),
    name: &str,
    ssn: &str,
    dates: &[String],
) -> SentencePlan {
    let (domain, text) = template;
    let date = if text.contains("{date}") {
        Some(dates[rng.gen_range(0..dates.len())].as_str())
    } else {
        None
    };
    SentencePlan {
        domain,
        text: instantiate(text, name, ssn, date),
        prefix: prompt_prefix(text, name, date),
    }
}

/// Generates the full corpus plus target bookkeeping for `(config, seed)`.
pub fn generate_ssn_dataset(config: &DatasetConfig, seed: u64) -> Result<SyntheticDataset> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let templates = all_templates();

    // One SSN per identity, forget names first, then retain names.
    let ssns = sample_ssns(&mut rng, FORGET_NAMES.len() + RETAIN_NAMES.len());
    let (forget_ssns, retain_ssns) = ssns.split_at(FORGET_NAMES.len());
    let dates = sample_dates(&mut rng, 200);

    // Forget sentences use templates without replacement so each prompt
    // prefix occurs exactly once in the corpus.
    let mut template_order: Vec<usize> = (0..templates.len()).collect();
    template_order.shuffle(&mut rng);

    let mut plans: Vec<SentencePlan> = Vec::new();
    let mut forget_plan_ranges: Vec<std::ops::Range<usize>> = Vec::new();
    for i in 0..config.n_forget_targets {
        let start = plans.len();
        for j in 0..config.prefixes_per_target {
            let t_idx = template_order[i * config.prefixes_per_target + j];
            plans.push(plan_sentence(
                &mut rng,
                templates[t_idx],
                FORGET_NAMES[i],
                &forget_ssns[i],
                &dates,
            ));
        }
        forget_plan_ranges.push(start..plans.len());
    }

    // Retain sentences reuse templates but never repeat an (identity,
    // template) pair, so every prompt has a unique continuation.
    let mut used_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut retain_identities: Vec<usize> = Vec::new();
    let retain_start = plans.len();
    for _ in 0..config.n_retain_sentences {
        let (ident, t_idx) = loop {
            let ident = rng.gen_range(0..RETAIN_NAMES.len());
            let t_idx = rng.gen_range(0..templates.len());
            if used_pairs.insert((ident, t_idx)) {
                break (ident, t_idx);
            }
        };
        retain_identities.push(ident);
        plans.push(plan_sentence(
            &mut rng,
            templates[t_idx],
            RETAIN_NAMES[ident],
            &retain_ssns[ident],
            &dates,
        ));
    }

    // Forget secrets must not leak into retain sentences. SSN strings are
    // fixed-width, so containment would mean an identity mix-up upstream.
    for (i, ssn) in forget_ssns[..config.n_forget_targets].iter().enumerate() {
        if let Some(p) = plans[retain_start..].iter().position(|pl| pl.text.contains(ssn)) {
            return Err(DataError::Invalid(format!(
                "forget SSN {i} appears in retain sentence {p}"
            )));
        }
    }

    let corpus: Vec<String> = plans.iter().map(|p| p.text.clone()).collect();
    let vocab = build_vocabulary(&corpus)?;
    let sentences: Vec<Vec<usize>> = corpus.iter().map(|s| vocab.tokenize(s)).collect();

    let exclusion_ids: BTreeSet<usize> =
        config.exclusions.iter().filter_map(|s| vocab.id_of(s)).collect();

    let mut targets = Vec::new();
    let make_target = |target_id: String,
                           plan_idx: usize,
                           gen_plan_idxs: &[usize],
                           split: Split,
                           select_seed: u64|
     -> Result<TargetSpec> {
        let plan = &plans[plan_idx];
        let prompt = vocab.tokenize(&plan.prefix);
        let sentence = &sentences[plan_idx];
        if sentence.len() <= prompt.len() || sentence[..prompt.len()] != prompt[..] {
            return Err(DataError::Invalid(format!(
                "{target_id}: sentence does not extend its own prompt"
            )));
        }
        // The secret is exactly the SSN span: the first whitespace-delimited
        // word after the prompt, minus any closing punctuation.
        let ssn_str = plan.text[plan.prefix.len()..]
            .trim_start()
            .split_whitespace()
            .next()
            .unwrap_or("")
            .trim_end_matches(['.', ',']);
        let secret = vocab.tokenize(ssn_str)[1..].to_vec(); // drop BOS
        if secret.is_empty() {
            return Err(DataError::Invalid(format!("{target_id}: empty secret")));
        }
        if sentence[prompt.len()..prompt.len() + secret.len()] != secret[..] {
            return Err(DataError::Invalid(format!(
                "{target_id}: secret tokens do not follow the prompt in the sentence"
            )));
        }
        let unlearn_tokens = select_unlearn_tokens(
            &secret,
            config.token_strategy,
            config.unlearn_tokens_per_target,
            &exclusion_ids,
            select_seed,
        )
        .map_err(|e| match e {
            DataError::Selection { reason, .. } => DataError::Selection { target: target_id.clone(), reason },
            other => other,
        })?;
        let mut generalization_prompts = Vec::new();
        for &g in gen_plan_idxs {
            let gp = vocab.tokenize(&plans[g].prefix);
            if gp == prompt {
                return Err(DataError::Invalid(format!(
                    "{target_id}: generalization prompt duplicates the unlearn prompt"
                )));
            }
            generalization_prompts.push(gp);
        }
        Ok(TargetSpec {
            target_id,
            prompt,
            secret,
            unlearn_tokens,
            generalization_prompts,
            split,
        })
    };

    for (i, range) in forget_plan_ranges.iter().enumerate() {
        let idxs: Vec<usize> = range.clone().collect();
        targets.push(make_target(
            format!("forget-{i:03}"),
            idxs[0],
            &idxs[1..],
            Split::Forget,
            derive_seed(seed, i as u64),
        )?);
    }

    // Retain targets: one per retain identity, anchored at that identity's
    // first sentence; later sentences for the same identity become its
    // generalization prompts.
    let mut first_plan_of_identity: BTreeMap<usize, usize> = BTreeMap::new();
    let mut extra_plans_of_identity: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (offset, &ident) in retain_identities.iter().enumerate() {
        let plan_idx = retain_start + offset;
        match first_plan_of_identity.entry(ident) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(plan_idx);
            }
            std::collections::btree_map::Entry::Occupied(_) => {
                extra_plans_of_identity.entry(ident).or_default().push(plan_idx);
            }
        }
    }
    for (k, (&ident, &plan_idx)) in first_plan_of_identity.iter().enumerate() {
        let gens = extra_plans_of_identity.get(&ident).cloned().unwrap_or_default();
        targets.push(make_target(
            format!("retain-{ident:03}"),
            plan_idx,
            &gens,
            Split::Retain,
            derive_seed(seed, (config.n_forget_targets + k) as u64),
        )?);
    }

    let mut template_domain_counts: BTreeMap<String, usize> = BTreeMap::new();
    for plan in &plans {
        *template_domain_counts.entry(plan.domain.to_string()).or_insert(0) += 1;
    }

    let ds = SyntheticDataset {
        seed,
        vocab,
        sentences,
        targets,
        template_domain_counts,
    };
    ds.validate()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_passes_validation() {
        DatasetConfig::default().validate().unwrap();
    }

    #[test]
    fn config_rejects_template_exhaustion() {
        let cfg = DatasetConfig {
            n_forget_targets: 20,
            prefixes_per_target: 7,
            ..DatasetConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(DataError::Config(_))));
    }

    #[test]
    fn ssn_areas_and_serials_are_bijective_and_skip_year_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let ssns = sample_ssns(&mut rng, 120);
        let full: BTreeSet<&str> = ssns.iter().map(|s| s.as_str()).collect();
        assert_eq!(full.len(), 120, "full SSNs must be pairwise distinct");
        let areas: BTreeSet<&str> = ssns.iter().map(|s| s.split('-').next().unwrap()).collect();
        assert_eq!(areas.len(), 120, "no two identities share an area");
        let serials: BTreeSet<&str> =
            ssns.iter().map(|s| s.rsplit('-').next().unwrap()).collect();
        assert_eq!(serials.len(), 120, "no two identities share a serial");
        for s in &serials {
            let n: u32 = s.parse().unwrap();
            assert!(!(2000..2100).contains(&n), "serial {n} collides with year range");
        }
    }

    #[test]
    fn prefix_stops_before_the_ssn() {
        let p = prompt_prefix("the SSN of {name} is {ssn}.", "Ada Lovelace", None);
        assert_eq!(p, "the SSN of Ada Lovelace is");
    }

    #[test]
    fn derive_seed_separates_indices() {
        assert_ne!(derive_seed(0, 0), derive_seed(0, 1));
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }
}
