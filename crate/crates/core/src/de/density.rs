use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric LLR grid.
///
/// `b` bits give `2^b - 1` bins at `k * step` for `k = -K..=K` with
/// `K = 2^(b-1) - 1`, so zero is a bin centre. The outermost bins at
/// `+-max_llr` also hold all mass beyond the range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub max_llr: f64,
    pub bits: u32,
}

impl Grid {
    pub const MIN_BITS: u32 = 8;
    pub const MAX_BITS: u32 = 16;

    pub fn new(max_llr: f64, bits: u32) -> Result<Self> {
        if !(Self::MIN_BITS..=Self::MAX_BITS).contains(&bits) {
            return Err(Error::param(format!(
                "quantization bits must be in {}..={}, got {bits}",
                Self::MIN_BITS,
                Self::MAX_BITS
            )));
        }
        if !(max_llr.is_finite() && max_llr > 0.0) {
            return Err(Error::param(format!(
                "LLR range must be positive, got {max_llr}"
            )));
        }
        Ok(Grid { max_llr, bits })
    }

    /// Index of the zero bin, also the largest magnitude index.
    pub fn half(&self) -> usize {
        (1usize << (self.bits - 1)) - 1
    }

    pub fn len(&self) -> usize {
        2 * self.half() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.max_llr / self.half() as f64
    }

    pub fn value(&self, index: usize) -> f64 {
        (index as f64 - self.half() as f64) * self.step()
    }

    /// Nearest bin, saturating at the ends.
    pub fn index_of(&self, llr: f64) -> usize {
        let k = (llr / self.step()).round();
        let half = self.half() as f64;
        (k.clamp(-half, half) + half) as usize
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            max_llr: 30.0,
            bits: 12,
        }
    }
}

/// Probability mass function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizedDensity {
    grid: Grid,
    mass: Vec<f64>,
}

impl QuantizedDensity {
    pub fn new(grid: Grid, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "density has {} bins, grid has {}",
                mass.len(),
                grid.len()
            )));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::param("density mass must be finite and non-negative"));
        }
        Ok(QuantizedDensity { grid, mass })
    }

    pub(crate) fn from_raw(grid: Grid, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), grid.len());
        QuantizedDensity { grid, mass }
    }

    /// Unit mass at the bin nearest `llr`.
    pub fn point_mass(grid: Grid, llr: f64) -> Self {
        let mut mass = vec![0.0; grid.len()];
        mass[grid.index_of(llr)] = 1.0;
        QuantizedDensity { grid, mass }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn is_normalized(&self, tolerance: f64) -> bool {
        (self.total() - 1.0).abs() <= tolerance
    }

    pub(crate) fn normalize(&mut self) {
        let total = self.total();
        if total > 0.0 {
            self.mass.iter_mut().for_each(|m| *m /= total);
        }
    }

    /// Mass below zero plus half the zero bin.
    pub fn error_probability(&self) -> f64 {
        let half = self.grid.half();
        self.mass[..half].iter().sum::<f64>() + 0.5 * self.mass[half]
    }

    pub fn mean(&self) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * self.grid.value(i))
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| m * (self.grid.value(i) - mean).powi(2))
            .sum()
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// Probability that a normal variable falls in `[lo, hi)`, accurate in both tails.
fn interval_mass(lo: f64, hi: f64) -> f64 {
    if lo > 0.0 {
        normal_sf(lo) - normal_sf(hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

/// Channel LLR density for BPSK `+1` over AWGN: normal with mean `2/sigma^2`
/// and variance `4/sigma^2`, binned with saturating end bins.
pub fn awgn_initial_density(sigma: f64, grid: Grid) -> Result<QuantizedDensity> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(format!("noise sigma must be positive, got {sigma}")));
    }
    let mean = 2.0 / (sigma * sigma);
    let std = 2.0 / sigma;
    let step = grid.step();
    let len = grid.len();
    let z = |x: f64| (x - mean) / std;
    let mass = (0..len)
        .map(|i| {
            let centre = grid.value(i);
            let lo = if i == 0 { f64::NEG_INFINITY } else { z(centre - 0.5 * step) };
            let hi = if i == len - 1 { f64::INFINITY } else { z(centre + 0.5 * step) };
            interval_mass(lo, hi)
        })
        .collect();
    let mut density = QuantizedDensity { grid, mass };
    density.normalize();
    Ok(density)
}
