use std::time::Instant;
use model::{reproduces, train, ModelConfig, Parameters, TrainConfig};
use tokenizer_data::{generate_ssn_dataset, DatasetConfig, Split};

fn main() {
    let ds = generate_ssn_dataset(&DatasetConfig::default(), 0).unwrap();
    let mcfg = ModelConfig::desk_default(ds.vocab.len());
    let targets = ds.targets.clone();
    let probe = move |p: &Parameters| -> f64 {
        let mut hits = 0usize;
        let mut total = 0usize;
        for t in &targets {
            total += 1;
            if reproduces(p, &t.prompt, &t.secret).unwrap() { hits += 1; }
            if t.split == Split::Forget {
                for g in &t.generalization_prompts {
                    total += 1;
                    if reproduces(p, g, &t.secret).unwrap() { hits += 1; }
                }
            }
        }
        hits as f64 / total as f64
    };
    let args: Vec<String> = std::env::args().collect();
    let lr: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(3e-3);
    let max_epochs: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(120);
    let tc = TrainConfig { lr, max_epochs, check_every: 5, ..TrainConfig::default() };
    let t0 = Instant::now();
    let (_params, log) = train(&mcfg, &ds.sentences, &tc, Some(&probe)).unwrap();
    println!("lr={} epochs={} converged={} wall={:.1}s", lr, log.epochs_run, log.converged, t0.elapsed().as_secs_f64());
    println!("checks: {:?}", log.checks);
    let n = log.loss_by_epoch.len();
    for i in (0..n).step_by(10.max(n/12)) { println!("  epoch {:3} loss {:.4}", i+1, log.loss_by_epoch[i]); }
    println!("  final loss {:.4}", log.loss_by_epoch.last().unwrap());
}
