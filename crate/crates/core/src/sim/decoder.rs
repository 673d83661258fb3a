use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ParityCheckMatrix;

/// Magnitude limit for channel values and decoder messages.
pub const LLR_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    /// Sum-product.
    Spa,
    /// Min-sum, optionally normalized.
    Msa,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spa" | "sum-product" => Ok(Algorithm::Spa),
            "msa" | "min-sum" => Ok(Algorithm::Msa),
            other => Err(Error::param(format!("unknown decoder {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    /// Min-sum scale in `(0, 1]`; ignored by sum-product.
    pub alpha: f64,
    /// Variable nodes that are never transmitted; their channel LLR is zero.
    pub punctured: Vec<usize>,
    /// Stop as soon as the hard decision satisfies every check.
    pub early_termination: bool,
}

impl DecoderConfig {
    pub fn new(algorithm: Algorithm, max_iterations: usize) -> Self {
        DecoderConfig {
            algorithm,
            max_iterations,
            alpha: 1.0,
            punctured: Vec::new(),
            early_termination: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::param(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if let Some(&v) = self.punctured.iter().find(|&&v| v >= n) {
            return Err(Error::param(format!("punctured index {v} out of range for n = {n}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Hard decision, one bit per variable node.
    pub word: Vec<u8>,
    /// A-posteriori LLRs (not clipped).
    pub posterior: Vec<f64>,
    pub iterations: usize,
    /// The hard decision satisfies every parity check.
    pub syndrome_ok: bool,
}

/// Channel LLRs `2 y / sigma^2` for BPSK `0 -> +1`; punctured positions get 0.
pub fn channel_llr(received: &[f64], sigma: f64, punctured: &[usize]) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(format!("noise sigma must be positive, got {sigma}")));
    }
    let scale = 2.0 / (sigma * sigma);
    let mut llr: Vec<f64> = received.iter().map(|y| scale * y).collect();
    for &v in punctured {
        if let Some(x) = llr.get_mut(v) {
            *x = 0.0;
        }
    }
    Ok(llr)
}

/// `-ln tanh(x / 2)` for `x >= 0`; maps 0 to infinity and infinity to 0.
fn phi(x: f64) -> f64 {
    if x < 1.0 {
        -(0.5 * x).tanh().ln()
    } else {
        let e = (-x).exp();
        e.ln_1p() - (-e).ln_1p()
    }
}

/// Flooding belief-propagation decoder with the edge layout of one matrix.
#[derive(Debug, Clone)]
pub struct Decoder {
    n: usize,
    // edges of check c are check_start[c]..check_start[c + 1]
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    // edge ids per variable node
    var_edges: Vec<Vec<usize>>,
}

impl Decoder {
    pub fn new(h: &ParityCheckMatrix) -> Self {
        let mut check_start = Vec::with_capacity(h.r() + 1);
        let mut edge_var = Vec::with_capacity(h.num_nonzeros());
        let mut var_edges = vec![Vec::new(); h.n()];
        check_start.push(0);
        for row in h.rows() {
            for &v in row {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            check_start.push(edge_var.len());
        }
        Decoder {
            n: h.n(),
            check_start,
            edge_var,
            var_edges,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn decode(&self, llr: &[f64], config: &DecoderConfig) -> Result<DecodeOutcome> {
        if llr.len() != self.n {
            return Err(Error::Dimension(format!(
                "expected {} LLRs, got {}",
                self.n,
                llr.len()
            )));
        }
        config.validate(self.n)?;
        let mut channel: Vec<f64> = llr
            .iter()
            .map(|&x| if x.is_nan() { 0.0 } else { x.clamp(-LLR_LIMIT, LLR_LIMIT) })
            .collect();
        for &v in &config.punctured {
            channel[v] = 0.0;
        }

        let edges = self.edge_var.len();
        let mut to_check: Vec<f64> = self.edge_var.iter().map(|&v| channel[v]).collect();
        let mut to_var = vec![0.0; edges];
        let mut posterior = channel.clone();
        let mut word = vec![0u8; self.n];
        let mut scratch = Vec::new();
        let mut iterations = 0;
        let mut syndrome_ok = false;

        while iterations < config.max_iterations {
            iterations += 1;
            for c in 0..self.check_start.len() - 1 {
                let range = self.check_start[c]..self.check_start[c + 1];
                match config.algorithm {
                    Algorithm::Spa => spa_check(&to_check[range.clone()], &mut to_var[range], &mut scratch),
                    Algorithm::Msa => {
                        msa_check(&to_check[range.clone()], &mut to_var[range], config.alpha)
                    }
                }
            }
            for (v, edges_of_v) in self.var_edges.iter().enumerate() {
                let total = channel[v] + edges_of_v.iter().map(|&e| to_var[e]).sum::<f64>();
                posterior[v] = total;
                for &e in edges_of_v {
                    to_check[e] = (total - to_var[e]).clamp(-LLR_LIMIT, LLR_LIMIT);
                }
                word[v] = u8::from(total < 0.0);
            }
            syndrome_ok = self.syndrome_ok(&word);
            if syndrome_ok && config.early_termination {
                break;
            }
        }
        Ok(DecodeOutcome {
            word,
            posterior,
            iterations,
            syndrome_ok,
        })
    }

    fn syndrome_ok(&self, word: &[u8]) -> bool {
        (0..self.check_start.len() - 1).all(|c| {
            self.edge_var[self.check_start[c]..self.check_start[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ word[v])
                == 0
        })
    }
}

/// Sum-product check update in the `phi` domain. Exclusive sums use prefix
/// and suffix accumulations, never subtraction.
fn spa_check(inputs: &[f64], outputs: &mut [f64], scratch: &mut Vec<f64>) {
    let d = inputs.len();
    scratch.clear();
    scratch.extend(inputs.iter().map(|x| phi(x.abs())));
    let negatives = inputs.iter().filter(|x| x.is_sign_negative() && **x != 0.0).count();
    // suffix sums, then sweep forward with a running prefix
    let mut suffix = vec![0.0; d + 1];
    for i in (0..d).rev() {
        suffix[i] = suffix[i + 1] + scratch[i];
    }
    let mut prefix = 0.0;
    for i in 0..d {
        // a degree-1 check yields phi(0) = inf
        let magnitude = phi(prefix + suffix[i + 1]).min(LLR_LIMIT);
        let own_negative = inputs[i].is_sign_negative() && inputs[i] != 0.0;
        let odd = (negatives - usize::from(own_negative)) % 2 == 1;
        outputs[i] = if odd { -magnitude } else { magnitude };
        prefix += scratch[i];
    }
}

/// Min-sum check update: `alpha` times the smallest other magnitude, with the
/// product of the other signs.
fn msa_check(inputs: &[f64], outputs: &mut [f64], alpha: f64) {
    let (mut min1, mut min2, mut at) = (f64::INFINITY, f64::INFINITY, usize::MAX);
    let mut negatives = 0;
    for (i, x) in inputs.iter().enumerate() {
        let m = x.abs();
        if m < min1 {
            min2 = min1;
            min1 = m;
            at = i;
        } else if m < min2 {
            min2 = m;
        }
        if x.is_sign_negative() && *x != 0.0 {
            negatives += 1;
        }
    }
    for (i, x) in inputs.iter().enumerate() {
        let magnitude = if i == at { min2 } else { min1 };
        let magnitude = alpha * magnitude.min(LLR_LIMIT);
        let own_negative = x.is_sign_negative() && *x != 0.0;
        let odd = (negatives - usize::from(own_negative)) % 2 == 1;
        outputs[i] = if odd { -magnitude } else { magnitude };
    }
}

/// Sum-product decoding of `llr` on `h`.
pub fn spa_decode(h: &ParityCheckMatrix, llr: &[f64], config: &DecoderConfig) -> Result<DecodeOutcome> {
    let config = DecoderConfig {
        algorithm: Algorithm::Spa,
        ..config.clone()
    };
    Decoder::new(h).decode(llr, &config)
}

/// Min-sum decoding of `llr` on `h`.
pub fn msa_decode(h: &ParityCheckMatrix, llr: &[f64], config: &DecoderConfig) -> Result<DecodeOutcome> {
    let config = DecoderConfig {
        algorithm: Algorithm::Msa,
        ..config.clone()
    };
    Decoder::new(h).decode(llr, &config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hamming() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[
            vec![1, 1, 0, 1, 1, 0, 0],
            vec![1, 0, 1, 1, 0, 1, 0],
            vec![0, 1, 1, 1, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn channel_llr_examples() {
        let llr = channel_llr(&[0.0, 1.0, -0.5, 2.0], 1.0, &[3]).unwrap();
        assert_eq!(llr, vec![0.0, 2.0, -1.0, 0.0]);
        assert!(channel_llr(&[1.0], 0.0, &[]).is_err());
    }

    #[test]
    fn clean_channel_decodes_in_one_iteration() {
        let h = hamming();
        let cfg = DecoderConfig::new(Algorithm::Spa, 50);
        let out = spa_decode(&h, &[20.0; 7], &cfg).unwrap();
        assert_eq!(out.word, vec![0; 7]);
        assert_eq!(out.iterations, 1);
        assert!(out.syndrome_ok);
    }

    #[test]
    fn corrects_single_error() {
        let h = hamming();
        let mut llr = vec![3.0; 7];
        llr[2] = -1.0;
        for alg in [Algorithm::Spa, Algorithm::Msa] {
            let out = Decoder::new(&h).decode(&llr, &DecoderConfig::new(alg, 20)).unwrap();
            assert_eq!(out.word, vec![0; 7], "{alg:?}");
        }
    }

    #[test]
    fn spa_check_matches_tanh_rule() {
        let inputs = [1.3, -0.4, 2.2, 5.0];
        let mut out = [0.0; 4];
        spa_check(&inputs, &mut out, &mut Vec::new());
        for i in 0..4 {
            let prod: f64 = (0..4)
                .filter(|&k| k != i)
                .map(|k| (inputs[k] / 2.0).tanh())
                .product();
            assert!((out[i] - 2.0 * prod.atanh()).abs() < 1e-12, "{i}");
        }
    }

    #[test]
    fn msa_degree_three_takes_min() {
        let mut out = [0.0; 3];
        msa_check(&[2.0, -0.5, 1.0], &mut out, 1.0);
        assert_eq!(out, [-0.5, 1.0, -0.5]);
        let mut scaled = [0.0; 3];
        msa_check(&[2.0, -0.5, 1.0], &mut scaled, 0.75);
        for (a, b) in scaled.iter().zip(out) {
            assert_eq!(*a, 0.75 * b);
        }
    }

    #[test]
    fn min_sum_overestimates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = [0.0; 6];
        let mut b = [0.0; 6];
        for _ in 0..500 {
            let inputs: Vec<f64> = (0..6).map(|_| rng.gen_range(-8.0..8.0)).collect();
            spa_check(&inputs, &mut a, &mut Vec::new());
            msa_check(&inputs, &mut b, 1.0);
            for (s, m) in a.iter().zip(&b) {
                assert!(m.abs() >= s.abs() - 1e-12);
                assert!(s * m >= 0.0);
            }
        }
    }

    #[test]
    fn zero_and_saturated_inputs_stay_finite() {
        let mut out = [0.0; 3];
        spa_check(&[0.0, 30.0, -30.0], &mut out, &mut Vec::new());
        // an erased input silences every other edge
        assert_eq!(out[1].abs(), 0.0);
        assert_eq!(out[2].abs(), 0.0);
        assert!(out.iter().all(|x| x.is_finite()));
        let h = hamming();
        let llr = [f64::INFINITY, f64::NEG_INFINITY, f64::NAN, 0.0, 1e300, -1e300, 0.0];
        let out = spa_decode(&h, &llr, &DecoderConfig::new(Algorithm::Spa, 10)).unwrap();
        assert!(out.posterior.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn punctured_positions_ignored() {
        let h = hamming();
        let mut cfg = DecoderConfig::new(Algorithm::Spa, 20);
        cfg.punctured = vec![0];
        // bit 0 claims a strong 1 but is punctured
        let mut llr = vec![4.0; 7];
        llr[0] = -20.0;
        let out = spa_decode(&h, &llr, &cfg).unwrap();
        assert_eq!(out.word, vec![0; 7]);
        cfg.punctured = vec![7];
        assert!(spa_decode(&h, &llr, &cfg).is_err());
    }

    #[test]
    fn sign_flip_equivariance() {
        // flipping the LLR signs on a codeword's support maps outputs by that codeword
        let h = hamming();
        let codeword = [1u8, 1, 0, 0, 0, 1, 1];
        assert!(h.is_codeword(&codeword));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alg in [Algorithm::Spa, Algorithm::Msa] {
            // stopping on the syndrome would let hard-decision ties at zero break the symmetry
            let cfg = DecoderConfig {
                early_termination: false,
                ..DecoderConfig::new(alg, 10)
            };
            for _ in 0..50 {
                let llr: Vec<f64> = (0..7).map(|_| rng.gen_range(-3.0..5.0)).collect();
                let flipped: Vec<f64> = llr
                    .iter()
                    .zip(&codeword)
                    .map(|(x, &c)| if c == 1 { -x } else { *x })
                    .collect();
                let a = Decoder::new(&h).decode(&llr, &cfg).unwrap();
                let b = Decoder::new(&h).decode(&flipped, &cfg).unwrap();
                for v in 0..7 {
                    let expect = if codeword[v] == 1 { -a.posterior[v] } else { a.posterior[v] };
                    assert!((b.posterior[v] - expect).abs() < 1e-9);
                    if a.posterior[v] != 0.0 {
                        assert_eq!(b.word[v], a.word[v] ^ codeword[v]);
                    }
                }
                assert_eq!(a.iterations, b.iterations);
            }
        }
    }
}
