//! Check- and variable-node density updates.
//!
//! The check rule is `m = 2 atanh(prod tanh(m_s / 2))`. The half-LLR inside
//! `tanh` is required for LLR messages; without it the rule does not map
//! LLRs to LLRs. It is applied to densities pairwise through a table of
//! quantized output magnitudes. The variable rule sums LLRs, so its density
//! is an ordinary convolution, done with real FFTs.

use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use realfft::num_complex::Complex;
use realfft::{RealFftPlanner, RealToComplex, ComplexToReal};

use super::density::{Grid, QuantizedDensity};
use crate::error::{Error, Result};

const NORMALIZED_TOLERANCE: f64 = 1e-9;

/// `-ln tanh(x / 2)`, an involution on `(0, inf)`.
fn phi(x: f64) -> f64 {
    if x < 1.0 {
        -(0.5 * x).tanh().ln()
    } else {
        // tanh(x/2) rounds to 1 for large x
        let e = (-x).exp();
        e.ln_1p() - (-e).ln_1p()
    }
}

/// Quantized output magnitude of the pairwise check rule.
///
/// For each smaller input magnitude `i`, the larger magnitudes `j >= i` are
/// grouped into runs of equal output index. The end bin stands for
/// "at least `max_llr`" and is treated as certain, so it never lowers the
/// other input.
#[derive(Debug)]
struct CheckTable {
    // runs of magnitude i are runs[offsets[i]..offsets[i + 1]] as (first j, output)
    offsets: Vec<usize>,
    runs: Vec<(u32, u32)>,
}

impl CheckTable {
    fn new(grid: &Grid) -> Self {
        let half = grid.half();
        let step = grid.step();
        let per_magnitude: Vec<Vec<(u32, u32)>> = (0..=half)
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return vec![(0, 0)];
                }
                if i == half {
                    return vec![(half as u32, half as u32)];
                }
                let phi_i = phi(i as f64 * step);
                let mut runs: Vec<(u32, u32)> = Vec::new();
                for j in i..half {
                    let out = phi(phi_i + phi(j as f64 * step));
                    let t = ((out / step).round() as usize).min(i) as u32;
                    if runs.last().map_or(true, |&(_, prev)| prev != t) {
                        runs.push((j as u32, t));
                    }
                    if t as usize == i {
                        break;
                    }
                }
                if runs.last().map_or(true, |&(_, prev)| prev as usize != i) {
                    runs.push((half as u32, i as u32));
                }
                runs
            })
            .collect();
        let mut offsets = Vec::with_capacity(half + 2);
        let mut runs = Vec::new();
        offsets.push(0);
        for r in per_magnitude {
            runs.extend(r);
            offsets.push(runs.len());
        }
        CheckTable { offsets, runs }
    }

    /// `(first j, last j, output)` for smaller magnitude `i`.
    fn runs(&self, i: usize, half: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let slice = &self.runs[self.offsets[i]..self.offsets[i + 1]];
        slice.iter().enumerate().map(move |(k, &(start, t))| {
            let end = slice.get(k + 1).map_or(half, |&(next, _)| next as usize - 1);
            (start as usize, end, t as usize)
        })
    }
}

/// Signed-magnitude split: `(positive, negative)` mass per magnitude, with
/// the zero bin on the positive side.
fn split(density: &[f64], half: usize) -> (Vec<f64>, Vec<f64>) {
    let pos = density[half..].to_vec();
    let mut neg: Vec<f64> = density[..=half].iter().rev().copied().collect();
    neg[0] = 0.0;
    (pos, neg)
}

fn prefix(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// Density-evolution kernels for one grid. Building the engine precomputes
/// the check table; FFT plans are cached per transform length.
pub struct DeEngine {
    grid: Grid,
    table: CheckTable,
    planner: Mutex<RealFftPlanner<f64>>,
}

impl std::fmt::Debug for DeEngine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DeEngine").field("grid", &self.grid).finish()
    }
}

impl DeEngine {
    pub fn new(grid: Grid) -> Self {
        DeEngine {
            grid,
            table: CheckTable::new(&grid),
            planner: Mutex::new(RealFftPlanner::new()),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn check_input(&self, f: &QuantizedDensity, what: &str) -> Result<()> {
        if f.grid() != self.grid {
            return Err(Error::Dimension(format!("{what} is on a different grid")));
        }
        if !f.is_normalized(NORMALIZED_TOLERANCE) {
            return Err(Error::Numerical(format!(
                "{what} is not normalized (total mass {})",
                f.total()
            )));
        }
        Ok(())
    }

    /// Density of the check rule applied to one message from `a` and one from `b`.
    fn check_pair(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let half = self.grid.half();
        let (ap, an) = split(a, half);
        let (bp, bn) = split(b, half);
        let (ap_sum, an_sum) = (prefix(&ap), prefix(&an));
        let (bp_sum, bn_sum) = (prefix(&bp), prefix(&bn));
        let mut pos = vec![0.0; half + 1];
        let mut neg = vec![0.0; half + 1];

        for i in 0..=half {
            let a_here = ap[i] + an[i] > 0.0;
            let b_here = bp[i] + bn[i] > 0.0;
            if !a_here && !b_here {
                continue;
            }
            for (start, end, t) in self.table.runs(i, half) {
                if a_here {
                    // |a| = i is the smaller magnitude, |b| in start..=end
                    let gp = bp_sum[end + 1] - bp_sum[start];
                    let gn = bn_sum[end + 1] - bn_sum[start];
                    pos[t] += ap[i] * gp + an[i] * gn;
                    neg[t] += ap[i] * gn + an[i] * gp;
                }
                let lo = start.max(i + 1);
                if b_here && lo <= end {
                    // |b| = i strictly smaller, |a| in lo..=end
                    let fp = ap_sum[end + 1] - ap_sum[lo];
                    let fn_ = an_sum[end + 1] - an_sum[lo];
                    pos[t] += bp[i] * fp + bn[i] * fn_;
                    neg[t] += bp[i] * fn_ + bn[i] * fp;
                }
            }
        }

        let mut out = vec![0.0; self.grid.len()];
        for t in 0..=half {
            out[half + t] += pos[t].max(0.0);
            out[half - t] += neg[t].max(0.0);
        }
        out
    }

    /// `sum_d rho_d f^(d-1)` under the check rule. `check` is `(degree, fraction)`.
    pub fn cn_update(&self, f: &QuantizedDensity, check: &[(usize, f64)]) -> Result<QuantizedDensity> {
        self.check_input(f, "check-node input")?;
        let max_degree = check.iter().map(|&(d, _)| d).max().unwrap_or(0);
        if max_degree < 2 {
            return Err(Error::param("check degrees must be at least 2"));
        }
        let mut out = vec![0.0; self.grid.len()];
        let mut power = f.mass().to_vec();
        for degree in 2..=max_degree {
            if let Some(&(_, w)) = check.iter().find(|&&(d, _)| d == degree) {
                out.iter_mut().zip(&power).for_each(|(o, p)| *o += w * p);
            }
            if degree < max_degree {
                power = self.check_pair(&power, f.mass());
            }
        }
        let mut density = QuantizedDensity::from_raw(self.grid, out);
        density.normalize();
        Ok(density)
    }

    /// `(sum_d lambda_d f^(d-1)) * f0` under LLR addition, saturating at the
    /// end bins. `variable` is `(degree, fraction)`.
    pub fn vn_update(
        &self,
        f: &QuantizedDensity,
        f0: &QuantizedDensity,
        variable: &[(usize, f64)],
    ) -> Result<QuantizedDensity> {
        let channel = self.channel_transform(f0, variable)?;
        self.vn_update_with(f, &channel, variable)
    }

    /// Transform of the channel density, reusable across iterations with the
    /// same variable degrees.
    pub(crate) fn channel_transform(
        &self,
        f0: &QuantizedDensity,
        variable: &[(usize, f64)],
    ) -> Result<ChannelTransform> {
        self.check_input(f0, "channel density")?;
        let max_degree = variable.iter().map(|&(d, _)| d).max().unwrap_or(0);
        if max_degree < 2 {
            return Err(Error::param("variable degrees must be at least 2"));
        }
        let len = fft_len(2 * max_degree * self.grid.half() + 1);
        Ok(ChannelTransform {
            len,
            max_degree,
            spectrum: self.spectrum(f0.mass(), len),
        })
    }

    fn spectrum(&self, density: &[f64], len: usize) -> Vec<Complex<f64>> {
        let half = self.grid.half();
        let (forward, _) = self.plans(len);
        let mut input = vec![0.0; len];
        for (k, &m) in density.iter().enumerate() {
            // offset k - half, stored circularly
            input[(k + len - half) % len] = m;
        }
        let mut out = forward.make_output_vec();
        forward
            .process(&mut input, &mut out)
            .expect("buffer sizes match the plan");
        out
    }

    pub(crate) fn vn_update_with(
        &self,
        f: &QuantizedDensity,
        channel: &ChannelTransform,
        variable: &[(usize, f64)],
    ) -> Result<QuantizedDensity> {
        self.check_input(f, "variable-node input")?;
        let max_degree = variable.iter().map(|&(d, _)| d).max().unwrap_or(0);
        if max_degree > channel.max_degree {
            return Err(Error::param("channel transform built for smaller degrees"));
        }
        let len = channel.len;
        let half = self.grid.half();
        let message = self.spectrum(f.mass(), len);

        // exponent d - 1 carries weight lambda_d
        let mut terms: Vec<(usize, f64)> = variable.iter().map(|&(d, w)| (d - 1, w)).collect();
        terms.sort_unstable_by_key(|t| t.0);
        let top_bit = usize::BITS - max_degree.leading_zeros();
        let mut product: Vec<Complex<f64>> = message
            .par_iter()
            .zip(channel.spectrum.par_iter())
            .map(|(&x, &c)| {
                // x^(2^k) table, then climb through the sorted exponents
                let mut squares = [Complex::new(0.0, 0.0); usize::BITS as usize];
                squares[0] = x;
                for k in 1..top_bit as usize {
                    squares[k] = squares[k - 1] * squares[k - 1];
                }
                let mut power = Complex::new(1.0, 0.0);
                let mut at = 0;
                let mut acc = Complex::new(0.0, 0.0);
                for &(e, w) in &terms {
                    let mut gap = e - at;
                    let mut k = 0;
                    while gap > 0 {
                        if gap & 1 == 1 {
                            power *= squares[k];
                        }
                        gap >>= 1;
                        k += 1;
                    }
                    at = e;
                    acc += power * w;
                }
                acc * c
            })
            .collect();
        product[0].im = 0.0;
        if len % 2 == 0 {
            let last = product.len() - 1;
            product[last].im = 0.0;
        }
        let (_, inverse) = self.plans(len);
        let mut sums = inverse.make_output_vec();
        inverse
            .process(&mut product, &mut sums)
            .expect("buffer sizes match the plan");

        let scale = 1.0 / len as f64;
        let reach = (max_degree * half) as isize;
        let half = half as isize;
        let mut out = vec![0.0; self.grid.len()];
        let (mut below, mut above) = (0.0, 0.0);
        for offset in -reach..=reach {
            let value = sums[offset.rem_euclid(len as isize) as usize] * scale;
            if offset < -half {
                below += value;
            } else if offset > half {
                above += value;
            } else {
                out[(offset + half) as usize] = value;
            }
        }
        out[0] += below;
        out[2 * half as usize] += above;
        out.iter_mut().for_each(|m| *m = m.max(0.0));
        let mut density = QuantizedDensity::from_raw(self.grid, out);
        density.normalize();
        Ok(density)
    }

    fn plans(&self, len: usize) -> (Arc<dyn RealToComplex<f64>>, Arc<dyn ComplexToReal<f64>>) {
        let mut planner = self.planner.lock().unwrap_or_else(|e| e.into_inner());
        (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
    }
}

/// Channel spectrum at the transform length for a given maximum degree.
#[derive(Debug, Clone)]
pub(crate) struct ChannelTransform {
    len: usize,
    max_degree: usize,
    spectrum: Vec<Complex<f64>>,
}

/// Smallest even length `>= need` whose prime factors are at most 7.
fn fft_len(need: usize) -> usize {
    let mut n = need.max(2);
    loop {
        if n % 2 == 0 {
            let mut m = n;
            for p in [2, 3, 5, 7] {
                while m % p == 0 {
                    m /= p;
                }
            }
            if m == 1 {
                return n;
            }
        }
        n += 1;
    }
}
