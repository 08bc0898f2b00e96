use crate::adder::AdderModel;

use super::{ConvCode, Trellis, ViterbiError};

/// Path metrics, one per trellis state (the PMU contents).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathMetrics(Vec<u32>);

impl PathMetrics {
    pub fn new(metrics: Vec<u32>) -> Self {
        PathMetrics(metrics)
    }

    /// Start-of-block metrics: state 0 at 0, every other state at the
    /// saturation ceiling `2^w - 1`.
    pub fn start(num_states: usize, word_width: u32) -> Self {
        let mut v = vec![saturation_ceiling(word_width); num_states];
        v[0] = 0;
        PathMetrics(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn min(&self) -> u32 {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// Lowest-index state holding the minimum metric.
    pub fn argmin(&self) -> usize {
        let m = self.min();
        self.0.iter().position(|&v| v == m).unwrap_or(0)
    }

    /// Subtracts the minimum from every entry and returns it.
    pub fn normalize(&mut self) -> u32 {
        let m = self.min();
        for v in &mut self.0 {
            *v -= m;
        }
        m
    }
}

#[inline]
pub(crate) fn saturation_ceiling(word_width: u32) -> u32 {
    (1u32 << word_width) - 1
}

/// Hamming distance between two hard-decision symbols.
pub fn branch_metric(expected: &[u8], received: &[u8]) -> Result<u32, ViterbiError> {
    if expected.len() != received.len() {
        return Err(ViterbiError::SymbolWidth {
            expected: expected.len(),
            found: received.len(),
        });
    }
    Ok(expected
        .iter()
        .zip(received)
        .filter(|(a, b)| (*a & 1) != (*b & 1))
        .count() as u32)
}

/// Result of one add-compare-select step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcsOutput {
    /// New metrics after subtract-minimum normalization.
    pub metrics: PathMetrics,
    /// Winning predecessor index (0 or 1) per state.
    pub decisions: Vec<u8>,
    /// The minimum that was subtracted during normalization.
    pub offset: u32,
}

/// One ACS step over the whole trellis.
///
/// `branch_metrics[2*s + b]` is the metric of the transition leaving state
/// `s` on input `b`. Both candidate sums per state go through `adder` and
/// saturate at `2^w - 1`; compare/select and normalization are exact.
/// Ties select predecessor 0.
pub fn acs_step(
    pms: &PathMetrics,
    branch_metrics: &[u32],
    trellis: &Trellis,
    adder: &AdderModel,
    word_width: u32,
) -> AcsOutput {
    let n = trellis.num_states();
    assert_eq!(pms.0.len(), n);
    assert_eq!(branch_metrics.len(), 2 * n);
    let mut scratch = AcsScratch::new(n);
    let mut next = vec![0u32; n];
    let mut decisions = vec![0u8; n];
    scratch.run(
        &pms.0,
        branch_metrics,
        trellis,
        adder,
        saturation_ceiling(word_width),
        &mut next,
        |s, d| decisions[s] = d,
    );
    let mut metrics = PathMetrics(next);
    let offset = metrics.normalize();
    AcsOutput {
        metrics,
        decisions,
        offset,
    }
}

struct AcsScratch {
    lhs: Vec<u32>,
    rhs: Vec<u32>,
    sums: Vec<u32>,
}

impl AcsScratch {
    fn new(n: usize) -> Self {
        AcsScratch {
            lhs: vec![0; 2 * n],
            rhs: vec![0; 2 * n],
            sums: vec![0; 2 * n],
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn run(
        &mut self,
        pms: &[u32],
        bms: &[u32],
        trellis: &Trellis,
        adder: &AdderModel,
        ceiling: u32,
        next: &mut [u32],
        mut decide: impl FnMut(usize, u8),
    ) {
        let n = next.len();
        for s in 0..n {
            let input = usize::from(trellis.input_into(s));
            for i in 0..2 {
                let p = trellis.predecessor(s, i);
                self.lhs[2 * s + i] = pms[p];
                self.rhs[2 * s + i] = bms[2 * p + input];
            }
        }
        adder.add_batch(&self.lhs, &self.rhs, &mut self.sums);
        for (s, out) in next.iter_mut().enumerate() {
            let c0 = self.sums[2 * s].min(ceiling);
            let c1 = self.sums[2 * s + 1].min(ceiling);
            if c1 < c0 {
                *out = c1;
                decide(s, 1);
            } else {
                *out = c0;
                decide(s, 0);
            }
        }
    }
}

/// Decision bits for every (step, state), bit-packed (the SMU contents).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionMatrix {
    states: usize,
    words_per_step: usize,
    bits: Vec<u64>,
}

impl DecisionMatrix {
    fn new(steps: usize, states: usize) -> Self {
        let words_per_step = states.div_ceil(64);
        DecisionMatrix {
            states,
            words_per_step,
            bits: vec![0; steps * words_per_step],
        }
    }

    pub fn steps(&self) -> usize {
        self.bits.len() / self.words_per_step.max(1)
    }

    pub fn states(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn get(&self, step: usize, state: usize) -> u8 {
        let w = self.bits[step * self.words_per_step + state / 64];
        ((w >> (state % 64)) & 1) as u8
    }

    #[inline]
    fn set(&mut self, step: usize, state: usize) {
        self.bits[step * self.words_per_step + state / 64] |= 1 << (state % 64);
    }
}

/// Hard-decision block Viterbi decoder with a pluggable ACS adder.
#[derive(Debug, Clone)]
pub struct ViterbiDecoder<'a> {
    trellis: Trellis,
    adder: &'a AdderModel,
    word_width: u32,
}

impl<'a> ViterbiDecoder<'a> {
    pub fn new(code: &ConvCode, adder: &'a AdderModel, word_width: u32) -> Result<Self, ViterbiError> {
        if word_width == 0 || word_width > 31 {
            return Err(ViterbiError::InvalidWordWidth(word_width));
        }
        if adder.width() < word_width {
            return Err(ViterbiError::AdderTooNarrow {
                adder: adder.width(),
                word_width,
            });
        }
        if (code.rate_inverse() as u64) > u64::from(saturation_ceiling(word_width)) {
            return Err(ViterbiError::InvalidWordWidth(word_width));
        }
        Ok(ViterbiDecoder {
            trellis: Trellis::new(code),
            adder,
            word_width,
        })
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    /// Runs the forward ACS recursion, returning the decision matrix and the
    /// final (normalized) path metrics.
    pub fn forward(&self, received: &[u8]) -> Result<(DecisionMatrix, PathMetrics), ViterbiError> {
        let r = self.trellis.rate_inverse();
        if !received.len().is_multiple_of(r) {
            return Err(ViterbiError::Framing {
                len: received.len(),
                rate_inverse: r,
            });
        }
        let n = self.trellis.num_states();
        let steps = received.len() / r;
        let ceiling = saturation_ceiling(self.word_width);
        let mut decisions = DecisionMatrix::new(steps, n);
        let mut pms = PathMetrics::start(n, self.word_width);
        let mut next = vec![0u32; n];
        let mut bms = vec![0u32; 2 * n];
        let mut scratch = AcsScratch::new(n);

        for (step, chunk) in received.chunks_exact(r).enumerate() {
            let rx = chunk
                .iter()
                .enumerate()
                .fold(0u32, |acc, (j, &b)| acc | (u32::from(b & 1) << j));
            for (t, bm) in bms.iter_mut().enumerate() {
                *bm = (self.trellis.output(t / 2, (t % 2) as u8) ^ rx).count_ones();
            }
            scratch.run(&pms.0, &bms, &self.trellis, self.adder, ceiling, &mut next, |s, d| {
                if d == 1 {
                    decisions.set(step, s);
                }
            });
            std::mem::swap(&mut pms.0, &mut next);
            pms.normalize();
        }
        Ok((decisions, pms))
    }

    /// Decodes a received hard-bit stream. With `flushed`, traceback starts
    /// from state 0 and the `K-1` tail bits are dropped; otherwise it starts
    /// from the lowest-index minimum-metric state.
    pub fn decode(&self, received: &[u8], flushed: bool) -> Result<Vec<u8>, ViterbiError> {
        let (decisions, pms) = self.forward(received)?;
        let steps = decisions.steps();
        let tail = (self.trellis.constraint_length() - 1) as usize;
        if steps == 0 {
            return Ok(Vec::new());
        }
        if flushed && steps < tail {
            return Err(ViterbiError::Framing {
                len: received.len(),
                rate_inverse: self.trellis.rate_inverse(),
            });
        }
        let mut state = if flushed { 0 } else { pms.argmin() };
        let mut bits = vec![0u8; steps];
        for step in (0..steps).rev() {
            bits[step] = self.trellis.input_into(state);
            state = self.trellis.predecessor(state, usize::from(decisions.get(step, state)));
        }
        if flushed {
            bits.truncate(steps - tail);
        }
        Ok(bits)
    }
}

/// One-shot decode; see [`ViterbiDecoder::decode`].
pub fn viterbi_decode(
    code: &ConvCode,
    received: &[u8],
    adder: &AdderModel,
    word_width: u32,
    flushed: bool,
) -> Result<Vec<u8>, ViterbiError> {
    ViterbiDecoder::new(code, adder, word_width)?.decode(received, flushed)
}
