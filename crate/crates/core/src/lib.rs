//! Approximate-adder Viterbi decoders.
//!
//! The crate plugs n-bit approximate adders into the add-compare-select
//! stage of a Viterbi decoder and measures what that does to two
//! applications: a coded digital link (BER against SNR) and an HMM
//! part-of-speech tagger. Accuracy results are joined with per-adder
//! area/power records to find Pareto-optimal decoder configurations.
//!
//! Modules:
//! - [`adder`]: adder models (exact, lower-OR, truncated, gate netlists)
//!   and their error metrics.
//! - [`viterbi`]: convolutional encoder, trellis and hard-decision decoder.
//! - [`comm`]: Huffman source coding, BASK/BPSK/QPSK modem, AWGN channel and
//!   the BER sweep driver.
//! - [`pos`]: quantized HMM tagger and its floating-point oracle.
//! - [`dse`]: cost records, Pareto fronts, budget filters, reports.

pub mod adder;
pub mod comm;
pub mod dse;
pub mod pos;
pub mod seed;
pub mod viterbi;

mod error;

pub use adder::{AdderKind, AdderModel, ErrorReport, GateNetlist, MetricsMode};
pub use comm::{BerResult, HuffmanCodebook, Modulation, PipelineConfig, Waveform};
pub use dse::{AccuracyMetric, CostRecord, DesignPoint, ParetoFront};
pub use error::{Error, Result};
pub use pos::{HmmModel, QuantizedHmm, TagSequence};
pub use viterbi::{ConvCode, PathMetrics, Trellis};
