//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcldpc_core::de::{threshold, DeConfig, DegreeDistribution, Grid, OptimizerConfig, diff_evolution};
use qcldpc_core::qc::{label_search, lift, BaseMatrix, MaskMatrix, Objective, SearchConfig};
use qcldpc_core::sim::{run_monte_carlo, Algorithm, DecoderConfig, SimConfig};
use qcldpc_core::sim::spa_decode;
use qcldpc_core::tanner::{
    ace, emd, enumerate_cycles, girth, min_distance_bruteforce, qc_girth, spectral_bound,
    ts_candidates, Girth, QcGirth, TannerGraph, TsConfig,
};
use qcldpc_core::ParityCheckMatrix;

const REFERENCE_SIGMA: f64 = 0.97592;
const REFERENCE_TOLERANCE: f64 = 0.003;
const TREND_TOLERANCE: f64 = 0.002;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_base(rng: &mut ChaCha8Rng, rows: usize, cols: usize, p: usize) -> BaseMatrix {
    BaseMatrix::new((0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..p)).collect()).collect()).unwrap()
}

fn random_mask(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MaskMatrix {
    let mut bits: Vec<Vec<bool>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(0.8)).collect()).collect();
    for c in 0..cols {
        if bits.iter().all(|r| !r[c]) {
            bits[rng.gen_range(0..rows)][c] = true;
        }
    }
    MaskMatrix::new(bits).unwrap()
}

fn girth_at_most_twelve() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0;
    for _ in 0..200 {
        let j = rng.gen_range(2..=4);
        let (l, p) = (rng.gen_range(j.max(3)..=8), rng.gen_range(5..=64));
        let mask = MaskMatrix::ones(j, l).unwrap();
        // half the instances come from the search, half are random labelings
        let base = if rng.gen_bool(0.5) {
            label_search(&mask, p, &SearchConfig::new(Objective::MaxGirth, 20, rng.gen())).unwrap().base
        } else {
            random_base(&mut rng, j, l, p)
        };
        match qc_girth(&base, &mask, p, 12).unwrap() {
            QcGirth::Exactly(g) => worst = worst.max(g),
            QcGirth::AboveLimit => return outcome(false, format!("{j}x{l} p={p} has girth above 12")),
        }
    }
    outcome(true, format!("200 instances, largest girth {worst}"))
}

fn girth_oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        let j = rng.gen_range(1..=3);
        let (l, p) = (rng.gen_range(j.max(2)..=6), rng.gen_range(2..=16));
        let mask = random_mask(&mut rng, j, l);
        let base = random_base(&mut rng, j, l, p);
        let bfs = girth(&TannerGraph::new(&lift(&base, &mask, p).unwrap()));
        let expected = match bfs {
            Girth::Finite(g) if g <= 12 => QcGirth::Exactly(g),
            _ => QcGirth::AboveLimit,
        };
        let got = qc_girth(&base, &mask, p, 12).unwrap();
        if got != expected {
            return outcome(false, format!("instance {i}: qc {got:?}, bfs {bfs:?}"));
        }
    }
    outcome(true, "100 instances agree")
}

fn ace_equals_emd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut graphs, mut cycles) = (0, 0);
    while graphs < 50 {
        let (j, l) = (rng.gen_range(2..=3), rng.gen_range(3..=5));
        let p = rng.gen_range(4..=60 / (j + l));
        let mask = random_mask(&mut rng, j, l);
        let h = lift(&random_base(&mut rng, j, l, p), &mask, p).unwrap();
        let graph = TannerGraph::new(&h);
        let Some(g) = girth(&graph).finite() else { continue };
        if g < 6 {
            continue;
        }
        graphs += 1;
        let index = enumerate_cycles(&graph, 2 * (g - 3), usize::MAX);
        if index.any_truncated() {
            return outcome(false, "cycle enumeration truncated");
        }
        for c in index.cycles() {
            cycles += 1;
            if ace(c, &graph) != emd(c, &graph).emd {
                return outcome(false, format!("cycle {:?} has ace != emd", c.nodes()));
            }
        }
    }
    outcome(true, format!("{graphs} graphs, {cycles} cycles, 0 violations"))
}

fn dl100_ensemble() -> DegreeDistribution {
    DegreeDistribution::new(
        &[
            (2, 0.170031),
            (3, 0.160460),
            (6, 0.112837),
            (7, 0.047489),
            (10, 0.011481),
            (11, 0.091537),
            (26, 0.152978),
            (27, 0.036131),
            (100, 0.217056),
        ],
        &[(10, 0.0625), (11, 0.9375)],
    )
    .unwrap()
}

fn de_config(bits: u32) -> DeConfig {
    DeConfig { grid: Grid::new(30.0, bits).unwrap(), ..DeConfig::default() }
}

fn reference_threshold(sigma12: f64) -> Outcome {
    let err = (sigma12 - REFERENCE_SIGMA).abs();
    outcome(err <= REFERENCE_TOLERANCE, format!("sigma* = {sigma12:.5} at 12 bits, |error| = {err:.5} (limit {REFERENCE_TOLERANCE})"))
}

fn quantization_trend(by_bits: &[(u32, f64)]) -> Outcome {
    let resolution = DeConfig::default().sigma_tolerance;
    // adjacent thresholds may differ by less than the bisection resolution
    let monotone = by_bits.windows(2).all(|w| w[1].1 >= w[0].1 - resolution);
    let last = by_bits[by_bits.len() - 1].1;
    let before = by_bits[by_bits.len() - 2].1;
    let close = (last - before).abs() <= TREND_TOLERANCE;
    let list: Vec<String> = by_bits.iter().map(|(b, s)| format!("{b}:{s:.5}")).collect();
    outcome(monotone && close, format!("{} (monotone {monotone}, 11-to-12 gap {:.5})", list.join(" "), (last - before).abs()))
}

fn random_tree_code(rng: &mut ChaCha8Rng) -> ParityCheckMatrix {
    let n = rng.gen_range(2..=12);
    let mut component: Vec<usize> = (0..n).collect();
    let mut rows = Vec::new();
    for _ in 0..rng.gen_range(1..=n) {
        let mut chosen: Vec<usize> = Vec::new();
        let want = rng.gen_range(2..=4);
        for _ in 0..4 * n {
            let v = rng.gen_range(0..n);
            if chosen.len() < want && chosen.iter().all(|&u| component[u] != component[v]) {
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

fn spa_tree_map() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let h = random_tree_code(&mut rng);
        let n = h.n();
        let llr: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut config = DecoderConfig::new(Algorithm::Spa, 2 * n + 2);
        config.early_termination = false;
        let out = spa_decode(&h, &llr, &config).unwrap();
        let (mut zero, mut one) = (vec![0.0; n], vec![0.0; n]);
        for bits in 0u32..(1 << n) {
            let word: Vec<u8> = (0..n).map(|i| ((bits >> i) & 1) as u8).collect();
            if !h.is_codeword(&word) {
                continue;
            }
            let w = (0..n).filter(|&i| word[i] == 1).map(|i| -llr[i]).sum::<f64>().exp();
            for i in 0..n {
                if word[i] == 0 { zero[i] += w } else { one[i] += w }
            }
        }
        for i in 0..n {
            worst = worst.max((out.posterior[i] - (zero[i] / one[i]).ln()).abs());
        }
    }
    outcome(worst < 1e-9, format!("100 trees, max |SPA - MAP| = {worst:.2e}"))
}

fn spectral_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut regular, mut small) = (0, 0);
    let mut worst_mu: f64 = 0.0;
    while regular < 30 {
        let (j, l) = (rng.gen_range(2..=3), rng.gen_range(3..=6));
        let p = rng.gen_range(3..=24 / l);
        let h = lift(&random_base(&mut rng, j, l, p), &MaskMatrix::ones(j, l).unwrap(), p).unwrap();
        if !TannerGraph::new(&h).is_connected() {
            continue;
        }
        regular += 1;
        let res = spectral_bound(&h).unwrap();
        worst_mu = worst_mu.max((res.mu1 - ((j * l) as f64).sqrt()).abs());
        if h.n() <= 24 {
            small += 1;
            let d = min_distance_bruteforce(&h).unwrap();
            if let (Some(bound), Some(d)) = (res.bound, d) {
                if bound > d as f64 + 1e-9 {
                    return outcome(false, format!("bound {bound} exceeds d_min {d}"));
                }
            }
        }
    }
    outcome(worst_mu < 1e-6, format!("{regular} codes, max |mu1 - sqrt(jk)| = {worst_mu:.2e}, bound <= d_min on {small}"))
}

fn ts_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut records, mut below, mut bad_codewords) = (0, 0, 0);
    let mut example = None;
    for _ in 0..40 {
        let j = rng.gen_range(2..=3);
        let (l, p) = (rng.gen_range(3..=5), rng.gen_range(3..=12));
        let h = lift(&random_base(&mut rng, j, l, p), &random_mask(&mut rng, j, l), p).unwrap();
        let graph = TannerGraph::new(&h);
        let Some(g) = girth(&graph).finite() else { continue };
        let config = TsConfig { a_max: 8, b_max: 6, max_cycle_len: g + 2, max_sets: 5000, ..TsConfig::default() };
        let (_, sets) = ts_candidates(&graph, &config);
        for s in &sets {
            records += 1;
            if s.a + s.b < g {
                below += 1;
                example.get_or_insert(format!("TS({}, {}) at girth {g}", s.a, s.b));
            }
            if s.b == 0 {
                let mut word = vec![0u8; h.n()];
                s.variables.iter().for_each(|&v| word[v] = 1);
                if !h.is_codeword(&word) {
                    bad_codewords += 1;
                }
            }
        }
    }
    let detail = format!(
        "{records} records, {below} with a+b < girth{}, {bad_codewords} b=0 records not codewords",
        example.map(|e| format!(" (e.g. {e})")).unwrap_or_default()
    );
    outcome(below == 0 && bad_codewords == 0, detail)
}

fn monte_carlo_sanity() -> Outcome {
    let mask = MaskMatrix::ones(3, 6).unwrap();
    let p = 167;
    let search = label_search(&mask, p, &SearchConfig::new(Objective::MaxGirth, 100, 9)).unwrap();
    let h = lift(&search.base, &mask, p).unwrap();
    let mut cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, 200), 50_000, 9);
    cfg.min_frame_errors = 100;
    let snr = [1.0, 1.75, 2.5];
    let res = run_monte_carlo(&h, &snr, &cfg).unwrap();
    let pts = &res.points;
    let monotone = pts.windows(2).all(|w| w[1].fer() <= w[0].fer() || w[1].fer_interval().0 <= w[0].fer_interval().1);
    let drop = pts[0].fer() >= 10.0 * pts[2].fer();
    let list: Vec<String> = pts
        .iter()
        .map(|p| format!("{} dB: {}/{}", p.snr_db, p.frame_errors, p.frames))
        .collect();
    outcome(monotone && drop, format!("n={}, girth {:?}, {}", h.n(), search.girth, list.join(", ")))
}

fn optimizer_beats_regular() -> Outcome {
    let de = de_config(10);
    let regular = threshold(&DegreeDistribution::regular(3, 6).unwrap(), &de).unwrap().sigma;
    let mut config = OptimizerConfig::new(vec![2, 3, 6, 20], vec![7, 8], 0.5);
    config.de = de;
    config.generations = 40;
    config.inner_iterations = 150;
    config.sigma_start = 0.85;
    config.seed = 10;
    match diff_evolution(&config) {
        Ok(res) => outcome(
            res.threshold.sigma > regular,
            format!("optimized sigma* {:.5} vs (3,6) {:.5}", res.threshold.sigma, regular),
        ),
        Err(e) => outcome(false, format!("optimizer failed: {e}")),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        results.push((id, name, out, start.elapsed()));
        let (id, name, out, time) = results.last().unwrap();
        println!(
            "criterion {id:>2} {}: {name}: {} ({:.1?})",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            time
        );
    };

    run(1, "girth never exceeds 12 on all-ones masks", &girth_at_most_twelve);
    run(2, "qc_girth equals BFS girth", &girth_oracle_agreement);
    run(3, "ACE equals EMD below the girth condition", &ace_equals_emd);

    let start = Instant::now();
    let by_bits: Vec<(u32, f64)> = [9, 10, 11, 12]
        .iter()
        .map(|&b| (b, threshold(&dl100_ensemble(), &de_config(b)).unwrap().sigma))
        .collect();
    let sweep = start.elapsed();
    let sigma12 = by_bits[3].1;
    run(4, "d_l=100 ensemble threshold at 12 bits", &|| reference_threshold(sigma12));
    run(5, "quantization trend over 9..12 bits", &|| quantization_trend(&by_bits));
    println!("   (threshold sweep took {sweep:.1?})");

    run(6, "SPA equals MAP on trees", &spa_tree_map);
    run(7, "spectral identities", &spectral_identities);
    run(8, "trapping-set soundness", &ts_soundness);
    run(9, "Monte-Carlo sanity", &monte_carlo_sanity);
    run(10, "optimizer beats (3,6)-regular", &optimizer_beats_regular);

    let failed = results.iter().filter(|r| !r.2.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
