use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcldpc_core::qc::{label_search, lift, MaskMatrix, Objective, SearchConfig};
use qcldpc_core::sim::{run_monte_carlo, spa_decode, Algorithm, DecoderConfig, SimConfig};
use qcldpc_core::tanner::{girth, Girth, TannerGraph};
use qcldpc_core::ParityCheckMatrix;

/// Random forest-shaped Tanner graph: each check joins variables from
/// distinct components.
fn random_tree_code(rng: &mut ChaCha8Rng) -> ParityCheckMatrix {
    let n = rng.gen_range(2..=12);
    let mut component: Vec<usize> = (0..n).collect();
    let mut rows = Vec::new();
    for _ in 0..rng.gen_range(1..=n) {
        let mut vars: Vec<usize> = (0..n).collect();
        vars.shuffle(rng);
        let mut chosen: Vec<usize> = Vec::new();
        let want = rng.gen_range(2..=4);
        for v in vars {
            if chosen.len() == want {
                break;
            }
            if chosen.iter().all(|&u| component[u] != component[v]) {
                chosen.push(v);
            }
        }
        // a degree-1 check pins its bit, whose exact LLR is infinite
        if chosen.len() < 2 {
            continue;
        }
        let merged = component[chosen[0]];
        for &v in &chosen[1..] {
            let old = component[v];
            component.iter_mut().filter(|c| **c == old).for_each(|c| *c = merged);
        }
        chosen.sort_unstable();
        rows.push(chosen);
    }
    if rows.is_empty() {
        rows.push(vec![0, 1]);
    }
    ParityCheckMatrix::from_rows(n, &rows).unwrap()
}

/// Bitwise MAP log-likelihood ratios by enumerating every codeword.
fn map_marginals(h: &ParityCheckMatrix, llr: &[f64]) -> Vec<f64> {
    let n = h.n();
    let mut zero = vec![0.0; n];
    let mut one = vec![0.0; n];
    for bits in 0u32..(1 << n) {
        let word: Vec<u8> = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
        if !h.is_codeword(&word) {
            continue;
        }
        let weight: f64 = (0..n).filter(|&i| word[i] == 1).map(|i| -llr[i]).sum::<f64>().exp();
        for i in 0..n {
            if word[i] == 0 {
                zero[i] += weight;
            } else {
                one[i] += weight;
            }
        }
    }
    (0..n).map(|i| (zero[i] / one[i]).ln()).collect()
}

#[test]
fn spa_is_exact_on_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let h = random_tree_code(&mut rng);
        assert_eq!(girth(&TannerGraph::new(&h)), Girth::Infinite);
        let llr: Vec<f64> = (0..h.n()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut config = DecoderConfig::new(Algorithm::Spa, 2 * h.n() + 2);
        config.early_termination = false;
        let out = spa_decode(&h, &llr, &config).unwrap();
        let map = map_marginals(&h, &llr);
        for (a, b) in out.posterior.iter().zip(&map) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

fn regular_code(p: usize) -> ParityCheckMatrix {
    let mask = MaskMatrix::ones(3, 6).unwrap();
    let out = label_search(&mask, p, &SearchConfig::new(Objective::MaxGirth, 50, 1)).unwrap();
    lift(&out.base, &mask, p).unwrap()
}

#[test]
fn high_snr_short_code_has_no_frame_errors() {
    let h = regular_code(17);
    let mut cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, 50), 10_000, 12);
    cfg.min_frame_errors = 1;
    let res = run_monte_carlo(&h, &[10.0], &cfg).unwrap();
    assert_eq!(res.points[0].frames, 10_000);
    assert_eq!(res.points[0].frame_errors, 0);
}

#[test]
fn more_iterations_never_hurt() {
    let h = regular_code(17);
    let run = |iters| {
        let cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, iters), 2000, 5);
        let cfg = SimConfig { min_frame_errors: u64::MAX, ..cfg };
        run_monte_carlo(&h, &[2.0], &cfg).unwrap().points[0].frame_errors
    };
    let one = run(1);
    let many = run(200);
    assert!(one >= many, "{one} < {many}");
    assert!(one > 0);
}

#[test]
fn min_sum_results_are_reproducible() {
    let h = regular_code(11);
    let cfg = SimConfig::new(DecoderConfig::new(Algorithm::Msa, 30), 500, 3);
    let a = run_monte_carlo(&h, &[1.0, 3.0], &cfg).unwrap();
    let b = run_monte_carlo(&h, &[1.0, 3.0], &cfg).unwrap();
    assert_eq!(a, b);
    for p in &a.points {
        assert!(p.frame_errors <= p.frames);
        assert!(p.undetected <= p.frame_errors);
    }
}
