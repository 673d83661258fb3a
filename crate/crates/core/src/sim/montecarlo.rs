use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decoder::{channel_llr, Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::matrix::ParityCheckMatrix;

/// Frames drawn per parallel batch. Fixed so that results do not depend on
/// the thread count.
const BATCH: u64 = 256;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateMode {
    /// `1 - r / n` from the matrix shape.
    Design,
    /// `(n - rank H) / n` over GF(2).
    Rank,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub decoder: DecoderConfig,
    /// A point stops once this many frame errors are seen...
    pub min_frame_errors: u64,
    /// ...or this many frames are sent.
    pub max_frames: u64,
    pub rate_mode: RateMode,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(decoder: DecoderConfig, max_frames: u64, seed: u64) -> Self {
        SimConfig {
            decoder,
            min_frame_errors: 100,
            max_frames,
            rate_mode: RateMode::Design,
            seed,
        }
    }
}

/// Counts for one Eb/N0 point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub sigma: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    /// Wrong words that satisfy every check.
    pub undetected: u64,
    pub total_iterations: u64,
    /// Code bits per frame, for the bit error rate.
    pub bits_per_frame: u64,
}

impl SimPoint {
    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.frames * self.bits_per_frame)
    }

    pub fn mean_iterations(&self) -> f64 {
        ratio(self.total_iterations, self.frames)
    }

    /// 95% Wilson score interval on the frame error rate.
    pub fn fer_interval(&self) -> (f64, f64) {
        wilson_interval(self.frame_errors, self.frames)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// 95% Wilson score interval for `successes` out of `trials`; `(0, 1)` when
/// there are no trials.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    /// Rate used for the Eb/N0 conversion, after puncturing.
    pub rate: f64,
    pub points: Vec<SimPoint>,
}

impl SimResult {
    pub const CSV_HEADER: &'static str =
        "snr_db,sigma,frames,frame_errors,bit_errors,undetected,fer,ber,fer_lo,fer_hi,mean_iters";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let (lo, hi) = p.fer_interval();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:e},{:e},{:e},{:e},{}",
                p.snr_db,
                p.sigma,
                p.frames,
                p.frame_errors,
                p.bit_errors,
                p.undetected,
                p.fer(),
                p.ber(),
                lo,
                hi,
                p.mean_iterations()
            );
        }
        out
    }
}

/// Transmitted code rate: information bits over sent (unpunctured) bits.
pub fn effective_rate(h: &ParityCheckMatrix, mode: RateMode, punctured: usize) -> Result<f64> {
    let n = h.n();
    let info = match mode {
        RateMode::Design => n as f64 - h.r() as f64,
        RateMode::Rank => (n - h.rank()) as f64,
    };
    let sent = (n - punctured) as f64;
    let rate = info / sent;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::param(format!("code rate {rate} is not positive")));
    }
    Ok(rate)
}

/// Noise deviation for BPSK at `snr_db` Eb/N0 and code rate `rate`.
pub fn sigma_for(snr_db: f64, rate: f64) -> f64 {
    let ebn0 = 10f64.powf(snr_db / 10.0);
    (1.0 / (2.0 * rate * ebn0)).sqrt()
}

struct FrameStats {
    frame_error: bool,
    bit_errors: u64,
    undetected: bool,
    iterations: u64,
}

/// Simulates all-zero codeword transmission over AWGN at each Eb/N0 point.
///
/// Frame `f` of point `k` draws its noise from a ChaCha stream keyed by
/// `(seed, k, f)`, so results depend only on the seed.
pub fn run_monte_carlo(
    h: &ParityCheckMatrix,
    snr_db: &[f64],
    config: &SimConfig,
) -> Result<SimResult> {
    if snr_db.is_empty() {
        return Err(Error::param("SNR list is empty"));
    }
    if let Some(bad) = snr_db.iter().find(|s| !s.is_finite()) {
        return Err(Error::param(format!("SNR value {bad} is not finite")));
    }
    let mut punctured = config.decoder.punctured.clone();
    punctured.sort_unstable();
    punctured.dedup();
    config.decoder.validate(h.n())?;
    let rate = effective_rate(h, config.rate_mode, punctured.len())?;
    let decoder = Decoder::new(h);
    let n = h.n();

    let mut points = Vec::with_capacity(snr_db.len());
    for (k, &snr) in snr_db.iter().enumerate() {
        let sigma = sigma_for(snr, rate);
        let mut point = SimPoint {
            snr_db: snr,
            sigma,
            frames: 0,
            frame_errors: 0,
            bit_errors: 0,
            undetected: 0,
            total_iterations: 0,
            bits_per_frame: n as u64,
        };
        let frame = |f: u64| -> Result<FrameStats> {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(((k as u64) << 48) | f);
            let received: Vec<f64> = (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    1.0 + sigma * z
                })
                .collect();
            let llr = channel_llr(&received, sigma, &punctured)?;
            let out = decoder.decode(&llr, &config.decoder)?;
            let bit_errors = out.word.iter().map(|&b| u64::from(b)).sum::<u64>();
            Ok(FrameStats {
                frame_error: bit_errors > 0,
                bit_errors,
                undetected: bit_errors > 0 && out.syndrome_ok,
                iterations: out.iterations as u64,
            })
        };

        'batches: while point.frames < config.max_frames
            && point.frame_errors < config.min_frame_errors
        {
            let start = point.frames;
            let end = (start + BATCH).min(config.max_frames);
            let stats: Vec<FrameStats> = (start..end)
                .into_par_iter()
                .map(frame)
                .collect::<Result<_>>()?;
            for s in stats {
                point.frames += 1;
                point.total_iterations += s.iterations;
                point.bit_errors += s.bit_errors;
                point.frame_errors += u64::from(s.frame_error);
                point.undetected += u64::from(s.undetected);
                if point.frame_errors >= config.min_frame_errors {
                    break 'batches;
                }
            }
        }
        points.push(point);
    }
    Ok(SimResult { rate, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::decoder::Algorithm;

    fn hamming() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[
            vec![1, 1, 0, 1, 1, 0, 0],
            vec![1, 0, 1, 1, 0, 1, 0],
            vec![0, 1, 1, 1, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn wilson_reference_values() {
        // 10 of 100: standard Wilson bounds
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.055_229).abs() < 1e-5, "{lo}");
        assert!((hi - 0.174_366).abs() < 1e-5, "{hi}");
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
        let (lo, _) = wilson_interval(0, 50);
        assert!(lo.abs() < 1e-12, "{lo}");
    }

    #[test]
    fn sigma_conversion() {
        // rate 1/2 at 0 dB: sigma = 1
        assert!((sigma_for(0.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((sigma_for(10.0, 0.5) - 0.1f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rates() {
        let h = hamming();
        assert!((effective_rate(&h, RateMode::Design, 0).unwrap() - 4.0 / 7.0).abs() < 1e-15);
        assert!((effective_rate(&h, RateMode::Rank, 0).unwrap() - 4.0 / 7.0).abs() < 1e-15);
        assert!((effective_rate(&h, RateMode::Design, 1).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        // duplicate row lowers the design rate but not the true rate
        let dup = ParityCheckMatrix::from_dense(&[vec![1, 1, 0], vec![1, 1, 0]]).unwrap();
        assert!((effective_rate(&dup, RateMode::Design, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((effective_rate(&dup, RateMode::Rank, 0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_frames_gives_empty_counts() {
        let cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, 10), 0, 1);
        let res = run_monte_carlo(&hamming(), &[1.0, 2.0], &cfg).unwrap();
        for p in &res.points {
            assert_eq!(p.frames, 0);
            assert_eq!(p.fer(), 0.0);
            assert_eq!(p.ber(), 0.0);
        }
        assert!(res.to_csv().lines().count() == 3);
    }

    #[test]
    fn invalid_snr_list_rejected() {
        let cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, 10), 10, 1);
        assert!(run_monte_carlo(&hamming(), &[], &cfg).is_err());
        assert!(run_monte_carlo(&hamming(), &[f64::NAN], &cfg).is_err());
    }

    #[test]
    fn stops_at_error_target_and_is_reproducible() {
        let mut cfg = SimConfig::new(DecoderConfig::new(Algorithm::Spa, 20), 100_000, 7);
        cfg.min_frame_errors = 25;
        let a = run_monte_carlo(&hamming(), &[0.0], &cfg).unwrap();
        assert_eq!(a.points[0].frame_errors, 25);
        let b = run_monte_carlo(&hamming(), &[0.0], &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.points[0].frame_errors <= a.points[0].frames);
    }

    #[test]
    fn csv_header() {
        let cfg = SimConfig::new(DecoderConfig::new(Algorithm::Msa, 5), 10, 3);
        let res = run_monte_carlo(&hamming(), &[3.0], &cfg).unwrap();
        let csv = res.to_csv();
        assert_eq!(csv.lines().next(), Some(SimResult::CSV_HEADER));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 11);
    }
}
