//! Part-of-speech tagging with an HMM whose Viterbi additions run through
//! an [`AdderModel`](crate::AdderModel).
//!
//! Probabilities are mapped to unsigned negative-log costs so the tagger
//! becomes a min-cost search over 16-bit words.

mod hmm;
mod quantize;
mod tagger;

pub use hmm::{parse_gold, parse_sentences, HmmModel, UNKNOWN_WORD_PROB};
pub use quantize::{quantize_hmm, QuantizedHmm, DEFAULT_CLAMP, DEFAULT_SCALE};
pub use tagger::{accuracy, corpus_accuracy, float_viterbi, tag, CorpusAccuracy, TagSequence, TAGGER_WIDTH};

#[derive(Debug, thiserror::Error)]
pub enum PosError {
    #[error("invalid HMM: {}", .0.join("; "))]
    InvalidModel(Vec<String>),
    #[error("scale {scale} and clamp {clamp} give costs that do not fit in 16 bits")]
    Quantization { scale: f64, clamp: f64 },
    #[error("sentence is empty")]
    EmptySentence,
    #[error("adder {adder} is {width}-bit; the tagger needs a 16-bit adder")]
    AdderWidth { adder: String, width: u32 },
    #[error("predicted {pred} tags but gold has {gold}")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("line {line}: unknown tag {tag:?}")]
    UnknownTag { line: usize, tag: String },
    #[error("gold/sentence mismatch: {}", .0.join("; "))]
    GoldMismatch(Vec<String>),
    #[error("model json: {0}")]
    Json(#[from] serde_json::Error),
}
