//! Metric oracles: brute-force recomputation on seeded random models, and
//! the unedited-baseline table on a model that genuinely memorized its
//! corpus.

use std::sync::OnceLock;

use eval_metrics::{
    efficacy_at_k, generalization_at_k, score_at_k, specificity, token_output_rank,
};
use model::{forward, train, LogitsMode, ModelConfig, Parameters, TrainConfig};
use tokenizer_data::{Split, TargetSpec, TokenPos};

/// Independent rank oracle: stable-sort the logits descending with index
/// tie-breaking and report the token's 1-based position.
fn brute_force_rank(logits: &[f64], token: usize) -> usize {
    let mut order: Vec<usize> = (0..logits.len()).collect();
    order.sort_by(|&a, &b| logits[b].partial_cmp(&logits[a]).unwrap().then(a.cmp(&b)));
    order.iter().position(|&i| i == token).unwrap() + 1
}

#[test]
fn efficacy_matches_brute_force_recomputation_on_seeded_targets() {
    let cfg = ModelConfig {
        vocab_size: 50,
        d_model: 12,
        d_ff: 24,
        n_layers: 2,
        n_heads: 2,
        context_len: 12,
    };
    for seed in [0u64, 1, 2, 3, 4] {
        let params = Parameters::init(&cfg, 0.6, seed);
        let target = TargetSpec {
            target_id: format!("seeded-{seed}"),
            prompt: vec![1, 2 + seed as usize, 9],
            secret: vec![20, 21, 22],
            unlearn_tokens: vec![TokenPos { id: 20, pos: 0 }, TokenPos { id: 22, pos: 2 }],
            generalization_prompts: vec![],
            split: Split::Forget,
        };
        let k = 15;
        let got = efficacy_at_k(&params, &target, k).unwrap();

        let mut expect = 0.0f64;
        for tp in &target.unlearn_tokens {
            let probe = target.prompt_with_secret_prefix(tp.pos);
            let cache = forward(&params, &probe, LogitsMode::LastOnly).unwrap();
            let rank = brute_force_rank(&cache.logits.last(), tp.id);
            assert_eq!(rank, token_output_rank(&params, &probe, tp.id).unwrap());
            expect = expect.max(score_at_k(rank, k));
        }
        assert_eq!(got, expect, "seed {seed}");
    }
}

/// Two-template corpus whose three secret tokens each encode a sheared
/// mod-4 combination of the two head tokens; every table contains
/// exclusive-or sub-blocks no additive circuit can realize, so memorization
/// must use the feed-forward layers. Template A is the target prompt,
/// template B the generalization prompt.
fn fixture_sentences() -> Vec<Vec<usize>> {
    let mut sentences = Vec::new();
    for a in 0..4usize {
        for b in 0..4usize {
            let s1 = 11 + (a + b) % 4;
            let s2 = 15 + (a + 2 * b + 1) % 4;
            let s3 = 19 + (2 * a + b + 3) % 4;
            sentences.push(vec![1 + a, 5 + b, 9, 10, s1, s2, s3]);
            sentences.push(vec![1 + a, 5 + b, 9, 31, s1, s2, s3]);
        }
    }
    sentences
}

fn fixture_targets() -> Vec<TargetSpec> {
    let mut targets = Vec::new();
    for a in 0..4usize {
        for b in 0..4usize {
            let s1 = 11 + (a + b) % 4;
            let s2 = 15 + (a + 2 * b + 1) % 4;
            let s3 = 19 + (2 * a + b + 3) % 4;
            let split = if a < 2 { Split::Forget } else { Split::Retain };
            targets.push(TargetSpec {
                target_id: format!("pair-{a}{b}"),
                prompt: vec![1 + a, 5 + b, 9, 10],
                secret: vec![s1, s2, s3],
                unlearn_tokens: vec![
                    TokenPos { id: s1, pos: 0 },
                    TokenPos { id: s2, pos: 1 },
                    TokenPos { id: s3, pos: 2 },
                ],
                generalization_prompts: if split == Split::Forget {
                    vec![vec![1 + a, 5 + b, 9, 31]]
                } else {
                    vec![]
                },
                split,
            });
        }
    }
    targets
}

fn memorized_fixture() -> &'static Parameters {
    static FIXTURE: OnceLock<Parameters> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let sentences = fixture_sentences();
        let mcfg = ModelConfig {
            vocab_size: 32,
            d_model: 8,
            d_ff: 64,
            n_layers: 2,
            n_heads: 1,
            context_len: 8,
        };
        let probe_sentences = sentences.clone();
        let probe = move |p: &Parameters| -> f64 {
            let hits = probe_sentences
                .iter()
                .filter(|s| model::reproduces(p, &s[..4], &s[4..]).unwrap())
                .count();
            hits as f64 / probe_sentences.len() as f64
        };
        let tc = TrainConfig {
            lr: 1e-2,
            max_epochs: 1500,
            check_every: 10,
            stable_checks: 5,
            ..TrainConfig::default()
        };
        let (params, log) = train(&mcfg, &sentences, &tc, Some(&probe)).unwrap();
        assert!(log.converged, "fixture corpus must memorize");
        params
    })
}

#[test]
fn unedited_memorized_model_scores_the_baseline_table() {
    let params = memorized_fixture();
    let targets = fixture_targets();
    let k = 20;

    for target in targets.iter().filter(|t| t.split == Split::Forget) {
        let eff = efficacy_at_k(params, target, k).unwrap();
        assert_eq!(eff, 1.0 / k as f64, "{} efficacy", target.target_id);
        let gen = generalization_at_k(params, target, k).unwrap().unwrap();
        assert_eq!(gen, 1.0 / k as f64, "{} generalization", target.target_id);
    }

    let retain: Vec<&TargetSpec> = targets.iter().filter(|t| t.split == Split::Retain).collect();
    let spec = specificity(params, params, &retain).unwrap();
    assert_eq!(spec, 1.0);
}

#[test]
fn zeroing_every_ff2_column_collapses_specificity_to_the_recount() {
    let baseline = memorized_fixture();
    let mut destroyed = baseline.clone();
    for (name, slice) in destroyed.tensor_slices_mut() {
        if name.ends_with("ff2") {
            slice.fill(0.0);
        }
    }
    let targets = fixture_targets();
    let retain: Vec<&TargetSpec> = targets.iter().filter(|t| t.split == Split::Retain).collect();
    let spec = specificity(&destroyed, baseline, &retain).unwrap();
    let recount = retain
        .iter()
        .filter(|t| model::reproduces(&destroyed, &t.prompt, &t.secret).unwrap())
        .count() as f64
        / retain.len() as f64;
    assert_eq!(spec, recount, "specificity must equal a direct reproduction recount");
    assert!(spec < 1.0, "feed-forward values hold the memorized table; spec={spec}");
}

#[test]
fn zeroed_out_model_scores_zero_specificity() {
    let baseline = memorized_fixture();
    let mut dead = baseline.clone();
    for (_, slice) in dead.tensor_slices_mut() {
        slice.fill(0.0);
    }
    let targets = fixture_targets();
    let retain: Vec<&TargetSpec> = targets.iter().filter(|t| t.split == Split::Retain).collect();
    // Every logit of the all-zero model is exactly zero, so greedy decoding
    // emits a constant tie-break token that is never one of the secrets.
    let spec = specificity(&dead, baseline, &retain).unwrap();
    assert_eq!(spec, 0.0);
}
