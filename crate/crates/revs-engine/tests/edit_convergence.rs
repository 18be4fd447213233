//! Convergence measurement for the per-neuron editing loop on a seeded
//! medium-sized unembedding: the overwhelming majority of edits must land
//! inside the rank tolerance, and the stragglers must say so.

use core_linalg::{pseudoinverse, rank_of_token, Matrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use revs_engine::{edit_neuron, RevsConfig};

#[test]
fn mass_edits_on_a_seeded_unembedding_mostly_converge() {
    let vocab = 256;
    let d = 64;
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let u = Matrix::from_fn(vocab, d, |_, _| rng.gen_range(-1.0..1.0));
    let u_pinv = pseudoinverse(&u).unwrap();

    let cfg = RevsConfig::desk_default(vocab);
    assert_eq!(cfg.r_n, 204);
    assert_eq!(cfg.eps_rn, 13);

    let attempts = 200;
    let mut converged = 0;
    let mut already_deep = 0;
    for i in 0..attempts {
        let neuron: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let token = rng.gen_range(0..vocab);
        let (edited, log) = edit_neuron(&neuron, token, &cfg, &u, &u_pinv).unwrap();

        let achieved = rank_of_token(&u.matvec(&edited), token).unwrap();
        assert_eq!(achieved, log.final_rank, "attempt {i}: log must match the returned vector");
        assert!(log.iterations.len() <= cfg.max_edit_iters);

        if log.converged {
            converged += 1;
            assert!(
                log.final_rank.abs_diff(cfg.r_n) <= cfg.eps_rn,
                "attempt {i}: converged flag outside tolerance (rank {achieved})"
            );
            if log.iterations.is_empty() {
                already_deep += 1;
            }
        } else {
            assert!(
                log.final_rank.abs_diff(cfg.r_n) > cfg.eps_rn,
                "attempt {i}: non-converged flag inside tolerance"
            );
        }
    }

    let rate = converged as f64 / attempts as f64;
    assert!(
        rate >= 0.95,
        "only {converged}/{attempts} edits converged (rate {rate:.3}); \
         {already_deep} were already within tolerance"
    );
}
