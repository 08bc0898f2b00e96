//! Error characterization of adder models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AdderError, AdderModel};

/// Exhaustive mode refuses to enumerate more than `2^26` operand pairs.
pub const EXHAUSTIVE_LIMIT_BITS: u32 = 26;

/// Pairs per work unit. Fixed so the reduction order never depends on the
/// number of workers.
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricsMode {
    Exhaustive,
    /// `count` pairs drawn uniformly; chunk `c` uses ChaCha stream `c` of `seed`.
    Sampled {
        count: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeLabel {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub name: String,
    pub width: u32,
    pub mode: ModeLabel,
    /// Mean absolute error as a percentage of the largest exact sum `2^(n+1) - 2`.
    pub mae_pct: f64,
    /// Percentage of operand pairs whose result is wrong.
    pub ep_pct: f64,
    pub wce: u64,
    pub mse: f64,
    /// Mean of `|err| / max(exact, 1)`, in percent.
    pub mre_pct: f64,
    pub sample_count: u64,
}

impl ErrorReport {
    /// Default MAE denominator for an `n`-bit adder.
    pub fn max_sum(width: u32) -> u64 {
        (1u64 << (width + 1)) - 2
    }

    /// MAE re-expressed against another percentage base, e.g. the full
    /// output range `2^(n+1) - 1`.
    pub fn mae_pct_over(&self, denominator: u64) -> f64 {
        self.mae_pct * Self::max_sum(self.width) as f64 / denominator as f64
    }

    /// WCE on the same percentage base as `mae_pct`.
    pub fn wce_pct(&self) -> f64 {
        100.0 * self.wce as f64 / Self::max_sum(self.width) as f64
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Partial {
    count: u64,
    mismatches: u64,
    abs_sum: u128,
    sq_sum: u128,
    wce: u64,
    rel_sum: f64,
}

impl Partial {
    #[inline]
    fn record(&mut self, exact: u32, approx: u32) {
        let d = u64::from(exact.abs_diff(approx));
        self.count += 1;
        if d != 0 {
            self.mismatches += 1;
            self.abs_sum += u128::from(d);
            self.sq_sum += u128::from(d * d);
            self.wce = self.wce.max(d);
            self.rel_sum += d as f64 / f64::from(exact.max(1));
        }
    }

    fn merge(mut self, o: Partial) -> Partial {
        self.count += o.count;
        self.mismatches += o.mismatches;
        self.abs_sum += o.abs_sum;
        self.sq_sum += o.sq_sum;
        self.wce = self.wce.max(o.wce);
        self.rel_sum += o.rel_sum;
        self
    }
}

fn run_chunk(model: &AdderModel, a: &[u32], b: &[u32], out: &mut [u32]) -> Partial {
    model.add_batch(a, b, out);
    let mut p = Partial::default();
    for i in 0..a.len() {
        p.record(a[i] + b[i], out[i]);
    }
    p
}

/// Computes MAE/EP/WCE/MSE/MRE for `model`.
///
/// Work is split into fixed-size chunks evaluated on the ambient rayon pool
/// and merged in chunk order, so the report is bit-identical for any number
/// of worker threads.
pub fn error_metrics(model: &AdderModel, mode: MetricsMode) -> Result<ErrorReport, AdderError> {
    let n = model.width();
    let mask = model.max_operand();
    let (total, label) = match mode {
        MetricsMode::Exhaustive => {
            if 2 * n > EXHAUSTIVE_LIMIT_BITS {
                return Err(AdderError::Capacity { width: n });
            }
            (1u64 << (2 * n), ModeLabel::Exhaustive)
        }
        MetricsMode::Sampled { count, .. } => {
            if count == 0 {
                return Err(AdderError::EmptySample);
            }
            (count, ModeLabel::Sampled)
        }
    };
    let chunks = total.div_ceil(CHUNK);

    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = (total - start).min(CHUNK) as usize;
            let mut a = vec![0u32; len];
            let mut b = vec![0u32; len];
            match mode {
                MetricsMode::Exhaustive => {
                    for (j, (x, y)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
                        let idx = start + j as u64;
                        *x = (idx >> n) as u32;
                        *y = (idx as u32) & mask;
                    }
                }
                MetricsMode::Sampled { seed, .. } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c);
                    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                        *x = rng.random::<u32>() & mask;
                        *y = rng.random::<u32>() & mask;
                    }
                }
            }
            let mut out = vec![0u32; len];
            run_chunk(model, &a, &b, &mut out)
        })
        .collect();
    let p = partials.into_iter().fold(Partial::default(), Partial::merge);

    let count = p.count as f64;
    Ok(ErrorReport {
        name: model.name().to_string(),
        width: n,
        mode: label,
        mae_pct: 100.0 * p.abs_sum as f64 / count / ErrorReport::max_sum(n) as f64,
        ep_pct: 100.0 * p.mismatches as f64 / count,
        wce: p.wce,
        mse: p.sq_sum as f64 / count,
        mre_pct: 100.0 * p.rel_sum / count,
        sample_count: p.count,
    })
}
