use super::{HmmModel, PosError};

pub const DEFAULT_SCALE: f64 = 1024.0;
pub const DEFAULT_CLAMP: f64 = 32.0;

/// Largest cost representable by the tagger's 16-bit words, plus one.
const COST_LIMIT: f64 = 65536.0;

/// HMM with probabilities replaced by `round(min(-ln p, clamp) * scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedHmm {
    pub(crate) hmm: HmmModel,
    scale: f64,
    clamp: f64,
    pub(crate) initial: Vec<u32>,
    pub(crate) transition: Vec<u32>,
    pub(crate) emission: Vec<u32>,
    pub(crate) unknown: u32,
}

impl QuantizedHmm {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    pub fn model(&self) -> &HmmModel {
        &self.hmm
    }

    pub fn num_tags(&self) -> usize {
        self.hmm.num_tags()
    }

    /// Quantizes one probability with this model's parameters.
    pub fn cost(&self, p: f64) -> u32 {
        cost(p, self.scale, self.clamp)
    }

    pub fn initial_cost(&self, tag: usize) -> u32 {
        self.initial[tag]
    }

    pub fn transition_cost(&self, from: usize, to: usize) -> u32 {
        self.transition[from * self.num_tags() + to]
    }

    pub fn emission_cost(&self, tag: usize, word: Option<usize>) -> u32 {
        match word {
            Some(w) => self.emission[tag * self.hmm.vocab().len() + w],
            None => self.unknown,
        }
    }
}

fn cost(p: f64, scale: f64, clamp: f64) -> u32 {
    let nll = if p > 0.0 { -p.ln() } else { f64::INFINITY };
    // -ln(1) is -0.0; max(0) also absorbs p marginally above 1
    (nll.min(clamp).max(0.0) * scale).round() as u32
}

pub fn quantize_hmm(hmm: &HmmModel, scale: f64, clamp: f64) -> Result<QuantizedHmm, PosError> {
    let valid = scale.is_finite() && scale > 0.0 && clamp.is_finite() && clamp > 0.0;
    if !valid || (clamp * scale).round() >= COST_LIMIT {
        return Err(PosError::Quantization { scale, clamp });
    }
    let n = hmm.num_tags();
    let v = hmm.vocab().len();
    let c = |p| cost(p, scale, clamp);
    Ok(QuantizedHmm {
        initial: (0..n).map(|t| c(hmm.initial(t))).collect(),
        transition: (0..n * n).map(|i| c(hmm.transition(i / n, i % n))).collect(),
        emission: (0..n * v).map(|i| c(hmm.emission(i / v, Some(i % v)))).collect(),
        unknown: c(hmm.emission(0, None)),
        hmm: hmm.clone(),
        scale,
        clamp,
    })
}
