//! Convolutional coding and hard-decision Viterbi decoding.
//!
//! The decoder mirrors the classic four-unit structure: branch metrics
//! (Hamming distance), an add-compare-select stage whose additions go
//! through an [`AdderModel`](crate::adder::AdderModel), a survivor memory
//! holding every decision bit of the block, and the path-metric vector.

mod code;
mod decoder;
mod trellis;

use thiserror::Error;

pub use code::{conv_encode, ConvCode, ConvCodeConfig, MAX_CONSTRAINT_LENGTH};
pub use decoder::{acs_step, branch_metric, viterbi_decode, AcsOutput, DecisionMatrix, PathMetrics, ViterbiDecoder};
pub use trellis::Trellis;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ViterbiError {
    #[error("invalid convolutional code: {0}")]
    InvalidCode(String),
    #[error("received {len} bits, not a multiple of the symbol width {rate_inverse}")]
    Framing { len: usize, rate_inverse: usize },
    #[error("symbol width mismatch: expected {expected} bits, got {found}")]
    SymbolWidth { expected: usize, found: usize },
    #[error("{adder}-bit adder cannot serve a {word_width}-bit path-metric word")]
    AdderTooNarrow { adder: u32, word_width: u32 },
    #[error("invalid decoder word width {0}")]
    InvalidWordWidth(u32),
}
