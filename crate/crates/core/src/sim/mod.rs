//! Belief-propagation decoding and AWGN Monte-Carlo simulation.
//!
//! The simulator always sends the all-zero codeword. That is valid because
//! both decoders are symmetric: flipping the channel signs on a codeword's
//! support flips the output by the same codeword.

mod decoder;
mod montecarlo;

pub use decoder::{
    channel_llr, msa_decode, spa_decode, Algorithm, DecodeOutcome, Decoder, DecoderConfig,
    LLR_LIMIT,
};
pub use montecarlo::{
    effective_rate, run_monte_carlo, sigma_for, wilson_interval, RateMode, SimConfig, SimPoint,
    SimResult,
};
