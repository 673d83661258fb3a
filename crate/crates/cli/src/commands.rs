use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use qcldpc_core::de::{
    diff_evolution, DeConfig, DegreeDistribution, DensityEvolution, Grid, OptimizerConfig,
};
use qcldpc_core::qc::{
    builtin_mask, label_search, lift, read_alist, read_base, write_alist, write_base, BaseMatrix,
    MaskKind, Objective, SearchConfig,
};
use qcldpc_core::sim::{run_monte_carlo, Algorithm, DecoderConfig, RateMode, SimConfig};
use qcldpc_core::tanner::{audit, girth, AuditConfig, TannerGraph, DEFAULT_CYCLE_CAP};
use qcldpc_core::ParityCheckMatrix;

use crate::manifest::{with_manifest, RunManifest};

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn load_alist(manifest: &mut RunManifest, path: &Path) -> Result<ParityCheckMatrix> {
    let bytes = manifest.read_input(path)?;
    read_alist(bytes.as_slice()).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Copy, Serialize, ValueEnum)]
pub enum SearchKind {
    /// Maximize girth.
    Girth,
    /// Maximize girth, then minimize ACE violations.
    GirthAce,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstructArgs {
    /// Base-matrix file (`J L p` header, -1 marks a zero block).
    #[arg(long, conflicts_with_all = ["mask", "p"])]
    base: Option<PathBuf>,
    /// Built-in mask: M1, M2, M3 or M_RA.
    #[arg(long, required_unless_present = "base")]
    mask: Option<MaskKind>,
    /// Block rows of the built-in mask (M_RA: 5).
    #[arg(long = "J")]
    rows: Option<usize>,
    /// Block columns of the built-in mask (M_RA: 10).
    #[arg(long = "L")]
    cols: Option<usize>,
    /// Circulant size.
    #[arg(long, required_unless_present = "base")]
    p: Option<usize>,
    /// Labeling search objective; built-in masks always search (default girth).
    #[arg(long, value_enum)]
    search: Option<SearchKind>,
    /// Candidate evaluations for the labeling search.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Longest cycle the girth objective distinguishes.
    #[arg(long, default_value_t = 16)]
    girth_limit: usize,
    /// ACE objective: longest cycle checked.
    #[arg(long, default_value_t = 12)]
    ace_max_len: usize,
    /// ACE objective: smallest acceptable ACE.
    #[arg(long, default_value_t = 3)]
    ace_eta: usize,
    /// Output prefix; writes `<out>.alist`, `<out>.base` and `<out>.json`.
    #[arg(long, default_value = "code")]
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ConstructSummary {
    rows: usize,
    cols: usize,
    p: usize,
    girth: String,
    search: Option<qcldpc_core::qc::SearchOutcome>,
}

pub fn construct(args: ConstructArgs) -> Result<()> {
    let mut manifest = RunManifest::new("construct", &args, Some(args.seed))?;
    let (mut base, mask, p) = match &args.base {
        Some(path) => {
            let bytes = manifest.read_input(path)?;
            read_base(bytes.as_slice()).with_context(|| format!("parsing {}", path.display()))?
        }
        None => {
            let kind = args.mask.expect("clap requires --mask without --base");
            let (rows, cols) = match (kind, args.rows, args.cols) {
                (_, Some(j), Some(l)) => (j, l),
                (MaskKind::Ra, None, None) => (5, 10),
                _ => {
                    return Err(qcldpc_core::Error::InvalidParameter(
                        "--J and --L are required for this mask".into(),
                    )
                    .into())
                }
            };
            let mask = builtin_mask(kind, rows, cols)?;
            let base = BaseMatrix::zeros(rows, cols)?;
            (base, mask, args.p.expect("clap requires --p without --base"))
        }
    };

    let search = match (args.search, args.base.is_some()) {
        (None, true) => None,
        (kind, _) => Some(kind.unwrap_or(SearchKind::Girth)),
    };
    let outcome = match search {
        Some(kind) => {
            let objective = match kind {
                SearchKind::Girth => Objective::MaxGirth,
                SearchKind::GirthAce => Objective::MaxGirthThenMinAceViolations {
                    max_len: args.ace_max_len,
                    eta: args.ace_eta,
                },
            };
            let config = SearchConfig {
                girth_limit: args.girth_limit,
                ..SearchConfig::new(objective, args.budget, args.seed)
            };
            let outcome = label_search(&mask, p, &config)?;
            base = outcome.base.clone();
            Some(outcome)
        }
        None => None,
    };

    let h = lift(&base, &mask, p)?;
    let g = girth(&TannerGraph::new(&h));
    let alist_path = with_suffix(&args.out, ".alist");
    let base_path = with_suffix(&args.out, ".base");
    let mut alist = Vec::new();
    write_alist(&h, &mut alist)?;
    write_file(&alist_path, alist)?;
    let mut base_text = Vec::new();
    write_base(&base, &mask, p, &mut base_text)?;
    write_file(&base_path, base_text)?;
    let summary = ConstructSummary {
        rows: h.r(),
        cols: h.n(),
        p,
        girth: g.to_string(),
        search: outcome,
    };
    write_file(&with_suffix(&args.out, ".json"), with_manifest(&manifest, &summary)?)?;
    println!(
        "H: {} x {} (p = {p}), girth {g}; wrote {} and {}",
        h.r(),
        h.n(),
        alist_path.display(),
        base_path.display()
    );
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Parity-check matrix in alist format.
    alist: PathBuf,
    /// Longest cycle enumerated (default: girth + 6).
    #[arg(long)]
    max_cycle_len: Option<usize>,
    /// Largest trapping-set size searched.
    #[arg(long, default_value_t = 12)]
    a_max: usize,
    /// Largest number of odd checks reported.
    #[arg(long, default_value_t = 8)]
    b_max: usize,
    /// Stored cycles per (variable node, length); counts stay exact.
    #[arg(long, default_value_t = DEFAULT_CYCLE_CAP)]
    per_vn_cap: usize,
    /// Trapping-set rows in the text report.
    #[arg(long, default_value_t = 20)]
    ts_rows: usize,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Write the JSON report (with manifest) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let mut manifest = RunManifest::new("analyze", &args, None)?;
    let h = load_alist(&mut manifest, &args.alist)?;
    let config = AuditConfig {
        max_cycle_len: args.max_cycle_len,
        per_vn_cap: args.per_vn_cap,
        a_max: args.a_max,
        b_max: args.b_max,
        ..AuditConfig::default()
    };
    let report = audit(&h, &config);
    let json = with_manifest(&manifest, &report)?;
    if args.json {
        println!("{json}");
    } else {
        print!("{}", report.to_text(args.ts_rows));
    }
    if let Some(out) = &args.out {
        write_file(out, &json)?;
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct DeFlags {
    /// Quantization bits (8..=16).
    #[arg(long, default_value_t = 12)]
    bits: u32,
    /// LLR range of the grid.
    #[arg(long, default_value_t = 30.0)]
    llr_range: f64,
    /// Convergence target for the error probability.
    #[arg(long, default_value_t = 1e-7)]
    epsilon: f64,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Bisection stops at this bracket width.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    /// Lower end of the initial sigma bracket.
    #[arg(long, default_value_t = 0.5)]
    sigma_lo: f64,
    /// Upper end of the initial sigma bracket.
    #[arg(long, default_value_t = 1.5)]
    sigma_hi: f64,
}

impl DeFlags {
    fn config(&self) -> Result<DeConfig> {
        let config = DeConfig {
            epsilon: self.epsilon,
            max_iter: self.max_iter,
            grid: Grid::new(self.llr_range, self.bits)?,
            sigma_tolerance: self.tolerance,
            bracket: (self.sigma_lo, self.sigma_hi),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ThresholdArgs {
    /// Distribution file with lines `V degree fraction` / `C degree fraction`.
    distribution: PathBuf,
    #[command(flatten)]
    de: DeFlags,
    /// Write the JSON report (with manifest and traces) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn threshold(args: ThresholdArgs) -> Result<()> {
    let mut manifest = RunManifest::new("threshold", &args, None)?;
    let bytes = manifest.read_input(&args.distribution)?;
    let dist = DegreeDistribution::parse(bytes.as_slice())
        .with_context(|| format!("parsing {}", args.distribution.display()))?;
    let config = args.de.config()?;
    let report = DensityEvolution::new(config)?.threshold(&dist)?;
    println!(
        "sigma* = {:.6} (bracket [{:.6}, {:.6}], rate {:.6}, {} bits)",
        report.sigma,
        report.lower,
        report.upper,
        dist.design_rate(),
        config.grid.bits
    );
    if let Some(out) = &args.out {
        write_file(out, with_manifest(&manifest, &report)?)?;
    }
    Ok(())
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    /// Population size (at least 6).
    #[arg(long, default_value_t = 20)]
    np: usize,
    /// Mutation scale in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    f: f64,
    /// Variable-node degree support, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    lambda_degrees: Vec<usize>,
    /// Check-node degree support, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    rho_degrees: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    /// Density-evolution iterations per fitness evaluation.
    #[arg(long, default_value_t = 100)]
    inner_iterations: usize,
    #[arg(long, default_value_t = 0.8)]
    sigma_start: f64,
    #[arg(long, default_value_t = 0.005)]
    sigma_step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    de: DeFlags,
    /// Output prefix; writes `<out>.dist` and `<out>.json`.
    #[arg(long, default_value = "optimized")]
    out: PathBuf,
}

pub fn optimize(args: OptimizeArgs) -> Result<()> {
    let manifest = RunManifest::new("optimize", &args, Some(args.seed))?;
    let config = OptimizerConfig {
        population: args.np,
        scale: args.f,
        variable_degrees: args.lambda_degrees.clone(),
        check_degrees: args.rho_degrees.clone(),
        rate: args.rate,
        sigma_start: args.sigma_start,
        sigma_step: args.sigma_step,
        generations: args.generations,
        inner_iterations: args.inner_iterations,
        seed: args.seed,
        de: args.de.config()?,
    };
    let result = diff_evolution(&config)?;
    let dist_path = with_suffix(&args.out, ".dist");
    write_file(&dist_path, result.best.to_text())?;
    write_file(&with_suffix(&args.out, ".json"), with_manifest(&manifest, &result)?)?;
    println!(
        "sigma* = {:.6}, rate {:.6}; wrote {}",
        result.threshold.sigma,
        result.best.design_rate(),
        dist_path.display()
    );
    print!("{}", result.best.to_text());
    Ok(())
}

#[derive(Debug, Clone, Copy, Serialize, ValueEnum)]
pub enum RateArg {
    /// 1 - r/n from the matrix shape.
    Design,
    /// From the GF(2) rank of H.
    Rank,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Parity-check matrix in alist format.
    alist: PathBuf,
    /// Eb/N0 points in dB, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    snr: Vec<f64>,
    /// spa or msa.
    #[arg(long, default_value = "spa")]
    decoder: Algorithm,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    /// Min-sum normalization in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Punctured variable nodes (0-based), comma separated.
    #[arg(long, value_delimiter = ',')]
    puncture: Vec<usize>,
    /// Stop a point after this many frame errors.
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// Stop a point after this many frames.
    #[arg(long, default_value_t = 100_000)]
    max_frames: u64,
    #[arg(long, value_enum, default_value_t = RateArg::Design)]
    rate_mode: RateArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (default: stdout); a manifest sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let mut manifest = RunManifest::new("simulate", &args, Some(args.seed))?;
    let h = load_alist(&mut manifest, &args.alist)?;
    let decoder = DecoderConfig {
        alpha: args.alpha,
        punctured: args.puncture.clone(),
        ..DecoderConfig::new(args.decoder, args.iterations)
    };
    let config = SimConfig {
        min_frame_errors: args.min_errors,
        rate_mode: match args.rate_mode {
            RateArg::Design => RateMode::Design,
            RateArg::Rank => RateMode::Rank,
        },
        ..SimConfig::new(decoder, args.max_frames, args.seed)
    };
    let result = run_monte_carlo(&h, &args.snr, &config)?;
    let csv = result.to_csv();
    match &args.out {
        Some(out) => {
            write_file(out, &csv)?;
            manifest.write_sidecar(out)?;
            eprintln!("rate {:.6}; wrote {}", result.rate, out.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
