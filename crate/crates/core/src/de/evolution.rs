use serde::Serialize;

use super::density::{awgn_initial_density, Grid};
use super::distribution::DegreeDistribution;
use super::update::DeEngine;
use crate::error::{Error, Result};

/// Iterations compared by the stall test.
const STALL_WINDOW: usize = 10;
/// Relative decrease of the error probability over the window below which a
/// run is treated as stuck at a fixed point.
const STALL_RELATIVE: f64 = 1e-6;
/// Initial iterations exempt from the stall test.
const STALL_WARMUP: usize = 20;
const MAX_WIDENINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeConfig {
    /// A run converges once the error probability drops below this.
    pub epsilon: f64,
    pub max_iter: usize,
    pub grid: Grid,
    /// Bisection stops once the sigma bracket is narrower than this.
    pub sigma_tolerance: f64,
    /// Initial `(lower, upper)` sigma bracket; widened by 1.5x when it does not straddle.
    pub bracket: (f64, f64),
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            epsilon: 1e-7,
            max_iter: 2000,
            grid: Grid::default(),
            sigma_tolerance: 1e-4,
            bracket: (0.5, 1.5),
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        Grid::new(self.grid.max_llr, self.grid.bits)?;
        if !(self.epsilon > 0.0) {
            return Err(Error::param("epsilon must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter must be at least 1"));
        }
        if !(self.sigma_tolerance > 0.0) {
            return Err(Error::param("sigma tolerance must be positive"));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::param(format!("invalid sigma bracket [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Result of one density-evolution run at a fixed sigma.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeRun {
    pub sigma: f64,
    pub converged: bool,
    /// Iterations performed; 0 when the channel density already meets epsilon.
    pub iterations: usize,
    /// Error probability of the variable-to-check density, starting with the channel.
    pub trace: Vec<f64>,
    /// Stopped early because the error probability stopped decreasing.
    pub stalled: bool,
}

impl DeRun {
    pub fn final_error_probability(&self) -> f64 {
        *self.trace.last().expect("trace holds the channel error probability")
    }
}

/// One bisection probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub sigma: f64,
    pub converged: bool,
    pub iterations: usize,
    pub final_error_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Midpoint of the final bracket.
    pub sigma: f64,
    /// Largest sigma seen to converge.
    pub lower: f64,
    /// Smallest sigma seen to fail.
    pub upper: f64,
    pub config: DeConfig,
    pub widenings: usize,
    pub probes: Vec<Probe>,
    /// Full traces at the final bracket endpoints.
    pub lower_trace: Vec<f64>,
    pub upper_trace: Vec<f64>,
}

/// Density-evolution driver bound to one grid.
#[derive(Debug)]
pub struct DensityEvolution {
    config: DeConfig,
    engine: DeEngine,
}

impl DensityEvolution {
    pub fn new(config: DeConfig) -> Result<Self> {
        config.validate()?;
        Ok(DensityEvolution {
            engine: DeEngine::new(config.grid),
            config,
        })
    }

    pub fn config(&self) -> &DeConfig {
        &self.config
    }

    pub fn engine(&self) -> &DeEngine {
        &self.engine
    }

    /// Runs density evolution for at most `max_iter` iterations.
    pub fn run(&self, dist: &DegreeDistribution, sigma: f64) -> Result<DeRun> {
        self.run_for(dist, sigma, self.config.max_iter, true)
    }

    /// Runs exactly up to `iterations` iterations, with or without the stall test.
    pub(crate) fn run_for(
        &self,
        dist: &DegreeDistribution,
        sigma: f64,
        iterations: usize,
        stop_on_stall: bool,
    ) -> Result<DeRun> {
        let eps = self.config.epsilon;
        let channel = awgn_initial_density(sigma, self.config.grid)?;
        let mut trace = vec![channel.error_probability()];
        let mut run = DeRun {
            sigma,
            converged: trace[0] < eps,
            iterations: 0,
            trace: Vec::new(),
            stalled: false,
        };
        let transform = self.engine.channel_transform(&channel, dist.variable())?;
        let mut to_check = channel.clone();
        while !run.converged && run.iterations < iterations {
            let to_var = self.engine.cn_update(&to_check, dist.check())?;
            to_check = self.engine.vn_update_with(&to_var, &transform, dist.variable())?;
            run.iterations += 1;
            let pe = to_check.error_probability();
            trace.push(pe);
            if pe < eps {
                run.converged = true;
            } else if stop_on_stall && run.iterations >= STALL_WARMUP {
                let before = trace[trace.len() - 1 - STALL_WINDOW];
                if before - pe < STALL_RELATIVE * before {
                    run.stalled = true;
                    break;
                }
            }
        }
        run.trace = trace;
        Ok(run)
    }

    /// Largest sigma for which density evolution converges, by bisection.
    pub fn threshold(&self, dist: &DegreeDistribution) -> Result<ThresholdReport> {
        let mut probes = Vec::new();
        let mut probe = |sigma: f64| -> Result<DeRun> {
            let run = self.run(dist, sigma)?;
            probes.push(Probe {
                sigma,
                converged: run.converged,
                iterations: run.iterations,
                final_error_probability: run.final_error_probability(),
            });
            Ok(run)
        };

        let (mut lo, mut hi) = self.config.bracket;
        let mut widenings = 0;
        let mut lo_run = probe(lo)?;
        while !lo_run.converged {
            if widenings == MAX_WIDENINGS {
                return Err(Error::Numerical(format!(
                    "no converging sigma found down to {lo}"
                )));
            }
            hi = lo;
            lo /= 1.5;
            widenings += 1;
            lo_run = probe(lo)?;
        }
        let mut hi_run = if hi == self.config.bracket.1 {
            probe(hi)?
        } else {
            // hi already failed while widening downwards
            DeRun {
                sigma: hi,
                converged: false,
                iterations: 0,
                trace: Vec::new(),
                stalled: false,
            }
        };
        while hi_run.converged {
            if widenings == MAX_WIDENINGS {
                return Err(Error::Numerical(format!(
                    "density evolution still converges at sigma {hi}"
                )));
            }
            lo = hi;
            lo_run = hi_run;
            hi *= 1.5;
            widenings += 1;
            hi_run = probe(hi)?;
        }

        while hi - lo >= self.config.sigma_tolerance {
            let mid = 0.5 * (lo + hi);
            let run = probe(mid)?;
            if run.converged {
                lo = mid;
                lo_run = run;
            } else {
                hi = mid;
                hi_run = run;
            }
        }
        if hi_run.trace.is_empty() {
            hi_run = self.run(dist, hi)?;
        }
        Ok(ThresholdReport {
            sigma: 0.5 * (lo + hi),
            lower: lo,
            upper: hi,
            config: self.config,
            widenings,
            probes,
            lower_trace: lo_run.trace,
            upper_trace: hi_run.trace,
        })
    }
}

/// Runs density evolution at `sigma` with a fresh engine.
pub fn run_de(dist: &DegreeDistribution, sigma: f64, config: &DeConfig) -> Result<DeRun> {
    DensityEvolution::new(*config)?.run(dist, sigma)
}

/// Bisection threshold with a fresh engine.
pub fn threshold(dist: &DegreeDistribution, config: &DeConfig) -> Result<ThresholdReport> {
    DensityEvolution::new(*config)?.threshold(dist)
}
