//! Scratch instrumentation for the editing dynamics on the desk-scale SSN
//! benchmark. Not part of the library surface; prints summary metrics for a
//! given architecture/training/engine parameterization.
//!
//! Usage: debug_unlearn [stable_checks n_layers n_heads d_ff lr n_max act_top_k max_epochs]

use std::time::Instant;

use model::{train, ModelConfig, Parameters, TrainConfig};
use revs_engine::{layer_ranks, unlearn_target, RevsConfig};
use tokenizer_data::{generate_ssn_dataset, DatasetConfig, Split};

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let get = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let stable_checks = get(0, 2.0) as usize;
    let n_layers = get(1, 4.0) as usize;
    let n_heads = get(2, 2.0) as usize;
    let d_ff = get(3, 256.0) as usize;
    let lr = get(4, 3e-3);
    let n_max_cfg = get(5, 16.0) as usize;
    let act_top_k = get(6, 32.0) as usize;
    let max_epochs = get(7, 500.0) as usize;
    let weight_decay = get(8, 0.0);
    let r_d_override = get(9, 0.0) as usize;
    let data_seed = get(10, 1.0) as u64;
    let split_seed = get(11, -1.0);

    let data = generate_ssn_dataset(&DatasetConfig::default(), data_seed).unwrap();
    let vocab = data.vocab.len();

    let mcfg = ModelConfig {
        vocab_size: vocab,
        d_model: 64,
        d_ff,
        n_layers,
        n_heads,
        context_len: 64,
    };
    let targets: Vec<_> = data.targets.clone();
    let probe_targets = targets.clone();
    let probe = move |p: &Parameters| -> f64 {
        let mut hits = 0;
        let mut total = 0;
        for t in &probe_targets {
            total += 1;
            if model::reproduces(p, &t.prompt, &t.secret).unwrap() {
                hits += 1;
            }
            if t.split == Split::Forget {
                for g in &t.generalization_prompts {
                    total += 1;
                    if model::reproduces(p, g, &t.secret).unwrap() {
                        hits += 1;
                    }
                }
            }
        }
        hits as f64 / total as f64
    };
    let tc = TrainConfig { lr, stable_checks, max_epochs, weight_decay, ..TrainConfig::default() };
    let cache_dir = std::path::PathBuf::from(format!(
        "/tmp/ckpt_cache_s{data_seed}_st{stable_checks}_l{n_layers}h{n_heads}f{d_ff}_lr{lr}_me{max_epochs}_wd{weight_decay}"
    ));
    let params = if cache_dir.exists() {
        println!("trained: (cached {})", cache_dir.display());
        model::load_checkpoint(&cache_dir).unwrap()
    } else {
        let t0 = Instant::now();
        let (params, log) = train(&mcfg, &data.sentences, &tc, Some(&probe)).unwrap();
        println!(
            "trained: converged={} epochs={} wall={:.1}s final_loss={:.3}",
            log.converged,
            log.epochs_run,
            t0.elapsed().as_secs_f64(),
            log.loss_by_epoch.last().unwrap()
        );
        if !log.converged {
            println!("NOT MEMORIZED, aborting");
            return;
        }
        std::fs::create_dir_all(&cache_dir).unwrap();
        model::save_checkpoint(&cache_dir, &params).unwrap();
        params
    };

    let forget_diag: Vec<_> = data.targets.iter().filter(|t| t.split == Split::Forget).collect();
    for target in forget_diag.iter().take(10) {
        let tp = &target.unlearn_tokens[0];
        let prompt = target.prompt_with_secret_prefix(tp.pos);
        let cache = model::forward(&params, &prompt, model::LogitsMode::LastOnly).unwrap();
        let logits = cache.logits.last();
        let mut mlp_contrib = Vec::new();
        for l in 0..mcfg.n_layers {
            let a = cache.mlp_activations_last(l);
            let out = params.blocks[l].ff2.matvec(a);
            let v = params.unemb.matvec(&out);
            mlp_contrib.push(format!("{:.2}", v[tp.id]));
        }
        let mut others: Vec<f64> = logits
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != tp.id)
            .map(|(_, x)| *x)
            .collect();
        others.sort_by(|a, b| b.partial_cmp(a).unwrap());
        println!(
            "  {}: tok_logit={:.2} lead4={:.2} lead20={:.2} mlp={:?}",
            target.target_id,
            logits[tp.id],
            logits[tp.id] - others[3],
            logits[tp.id] - others[19],
            mlp_contrib
        );
    }

    let mut cfg = RevsConfig::desk_default(vocab);
    cfg.n_max = n_max_cfg;
    cfg.act_top_k = act_top_k;
    if r_d_override > 0 {
        cfg.r_d = r_d_override;
        cfg.eps_rd = (r_d_override + 3) / 4;
    }
    println!(
        "engine: r_d={} r_n={} eps_rn={} n_max={} act_top_k={}",
        cfg.r_d, cfg.r_n, cfg.eps_rn, cfg.n_max, cfg.act_top_k
    );

    let all_forget: Vec<_> = data.targets.iter().filter(|t| t.split == Split::Forget).collect();
    let order: Vec<usize> = if split_seed >= 0.0 {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(split_seed as u64);
        let mut idx: Vec<usize> = (0..all_forget.len()).collect();
        idx.shuffle(&mut rng);
        idx
    } else {
        (0..all_forget.len()).collect()
    };
    let half = all_forget.len() / 2;
    let forget: Vec<_> = order[..half].iter().map(|&i| all_forget[i]).collect();
    let heldout_targets: Vec<_> = order[half..].iter().map(|&i| all_forget[i]).collect();
    let mut edited = params.clone();
    let t1 = Instant::now();
    let mut n_edits = 0usize;
    let mut budget_flags = 0usize;
    let mut per_layer_edits = vec![0usize; n_layers];
    let mut per_layer_flags = vec![0usize; n_layers];
    for target in forget.iter() {
        let records = unlearn_target(&mut edited, target, &cfg).unwrap();
        for r in &records {
            n_edits += r.neurons_edited();
            if r.budget_exhausted {
                budget_flags += 1;
            }
            for lr in &r.layers {
                per_layer_edits[lr.layer] += lr.neurons.len();
                if lr.budget_exhausted {
                    per_layer_flags[lr.layer] += 1;
                }
            }
            let l0 = &r.layers[0];
            println!(
                "  {} tok={} pos={:?}: L0 edits={} rank {}->{} sel={}",
                r.target_id,
                r.token,
                r.secret_pos,
                l0.neurons.len(),
                l0.initial_rank,
                l0.final_rank,
                l0.selected
            );
        }
    }
    println!("per-layer edits: {per_layer_edits:?} flags: {per_layer_flags:?}");
    let edit_wall = t1.elapsed().as_secs_f64();

    let k = 20usize;
    let score = |r: usize| if r >= k { 1.0 } else { r as f64 / k as f64 };
    let mut effs = Vec::new();
    let mut all_ranks = Vec::new();
    for target in forget.iter() {
        let mut best = 0.0f64;
        let mut ranks = Vec::new();
        for tp in &target.unlearn_tokens {
            let prompt = target.prompt_with_secret_prefix(tp.pos);
            let per_layer = layer_ranks(&edited, &prompt, tp.id).unwrap();
            println!("  {} pos={} rank trace post-edit: {per_layer:?}", target.target_id, tp.pos);
            let r = *per_layer.last().unwrap();
            ranks.push(r);
            best = best.max(score(r));
        }
        all_ranks.push(ranks);
        effs.push(best);
    }
    let mean_eff: f64 = effs.iter().sum::<f64>() / effs.len() as f64;

    let mut gens = Vec::new();
    for target in forget.iter() {
        for g in &target.generalization_prompts {
            let mut best = 0.0f64;
            for tp in &target.unlearn_tokens {
                let mut prompt = g.clone();
                prompt.extend_from_slice(&target.secret[..tp.pos]);
                let r = *layer_ranks(&edited, &prompt, tp.id).unwrap().last().unwrap();
                best = best.max(score(r));
            }
            gens.push(best);
        }
    }
    let mean_gen: f64 = gens.iter().sum::<f64>() / gens.len() as f64;

    let retain: Vec<_> = data.targets.iter().filter(|t| t.split == Split::Retain).collect();
    let kept = retain
        .iter()
        .filter(|t| model::reproduces(&edited, &t.prompt, &t.secret).unwrap())
        .count();
    let heldout: Vec<_> = heldout_targets.iter().collect();
    let unlearned_ids: std::collections::BTreeSet<usize> = forget
        .iter()
        .flat_map(|t| t.unlearn_tokens.iter().map(|tp| tp.id))
        .collect();
    let mut kept_heldout = 0usize;
    for t in &heldout {
        let ok = model::reproduces(&edited, &t.prompt, &t.secret).unwrap();
        if ok {
            kept_heldout += 1;
            continue;
        }
        let mut notes = Vec::new();
        for (pos, &id) in t.secret.iter().enumerate() {
            let prompt = t.prompt_with_secret_prefix(pos);
            let r = *layer_ranks(&edited, &prompt, id).unwrap().last().unwrap();
            let shared = if unlearned_ids.contains(&id) { "*unlearned*" } else { "" };
            if r > 1 {
                notes.push(format!("pos {pos} tok {id}{shared} rank {r}"));
            }
        }
        println!("  heldout {} BROKEN: {}", t.target_id, notes.join("; "));
    }

    println!("post ranks: {all_ranks:?}");
    println!(
        "edits={n_edits} flags={budget_flags} wall={edit_wall:.1}s | eff={mean_eff:.3} \
         gen={mean_gen:.3} spec_heldout={:.3} spec_retain={:.3}",
        kept_heldout as f64 / heldout.len() as f64,
        kept as f64 / retain.len() as f64
    );
}
