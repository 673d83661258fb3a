//! Quantized density evolution for binary-input AWGN channels.
//!
//! Densities live on a symmetric LLR grid ([`Grid`]). [`DeEngine`] holds the
//! check- and variable-node kernels for one grid, [`DensityEvolution`] drives
//! iterations and the threshold bisection, and [`diff_evolution`] searches
//! degree distributions.

mod density;
mod distribution;
mod evolution;
mod optimize;
mod update;

pub use density::{awgn_initial_density, Grid, QuantizedDensity};
pub use distribution::DegreeDistribution;
pub use evolution::{run_de, threshold, DeConfig, DeRun, DensityEvolution, Probe, ThresholdReport};
pub use optimize::{
    diff_evolution, diff_evolution_from, GenerationRecord, OptimizeResult, OptimizerConfig,
};
pub use update::DeEngine;
