//! Simulated digital link: Huffman source coding, convolutional channel
//! coding, carrier modulation over AWGN and Viterbi decoding through a
//! configurable adder.

mod channel;
mod huffman;
mod modem;
mod pipeline;

pub use channel::{awgn, awgn_with, noise_variance, SnrMode};
pub use huffman::{char_frequencies, HuffmanCodebook, HuffmanDecoded};
pub use modem::{demodulate, modulate, ModemParams, Modulation, Waveform};
pub use pipeline::{
    ber_sweep, run_pipeline, run_seed, write_ber_csv, BerResult, PipelineConfig, PreparedSource, CORRUPTION_BER,
    CORRUPTION_MATCH_THRESHOLD,
};

use crate::adder::AdderError;
use crate::viterbi::ViterbiError;

#[derive(Debug, thiserror::Error)]
pub enum CommError {
    #[error("cannot build a code over an empty alphabet")]
    EmptyAlphabet,
    #[error("symbol frequencies must be finite, non-negative and not all zero")]
    InvalidFrequencies,
    #[error("symbol {0:?} is not in the codebook")]
    UnknownSymbol(char),
    #[error("unknown modulation {0:?} (expected BASK, BPSK or QPSK)")]
    UnknownModulation(String),
    #[error("{samples} samples is not a whole number of {per_symbol}-sample symbols")]
    WaveFraming { samples: usize, per_symbol: usize },
    #[error("invalid pipeline config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("source text is empty")]
    EmptyText,
    #[error(transparent)]
    Viterbi(#[from] ViterbiError),
    #[error(transparent)]
    Adder(#[from] AdderError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(String),
}
