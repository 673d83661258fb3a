//! Quasi-cyclic LDPC toolkit.
//!
//! - [`qc`]: circulant lifting of base/mask matrices, labeling search and file formats
//! - [`tanner`]: girth, diameter, ACE/EMD spectra, trapping-set candidates, spectral bound
//! - [`de`]: quantized density evolution, thresholds and degree-distribution optimization
//! - [`sim`]: sum-product / min-sum decoding and AWGN Monte-Carlo simulation

pub mod de;
pub mod error;
pub mod matrix;
pub mod qc;
pub mod sim;
pub mod tanner;

pub use error::{Error, Result};
pub use matrix::ParityCheckMatrix;
