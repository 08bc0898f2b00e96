use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Waveform;

/// How the SNR axis is interpreted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrMode {
    /// Per-sample: `sigma^2 = P_sig / 10^(snr/10)`.
    #[default]
    PerSample,
    /// Energy per channel bit over noise density: `sigma^2 = P_sig * spb / (2 * 10^(snr/10))`.
    EbN0,
}

/// Noise variance for a signal of mean power `signal_power`.
pub fn noise_variance(signal_power: f64, snr_db: f64, mode: SnrMode, samples_per_bit: usize) -> f64 {
    let ratio = 10f64.powf(snr_db / 10.0);
    match mode {
        SnrMode::PerSample => signal_power / ratio,
        SnrMode::EbN0 => signal_power * samples_per_bit as f64 / (2.0 * ratio),
    }
}

/// Adds white Gaussian noise at `snr_db` (per-sample SNR against the
/// waveform's empirical power). Deterministic for a given `seed`.
pub fn awgn(wave: &Waveform, snr_db: f64, seed: u64) -> Waveform {
    awgn_with(wave, snr_db, SnrMode::PerSample, 1, seed)
}

pub fn awgn_with(wave: &Waveform, snr_db: f64, mode: SnrMode, samples_per_bit: usize, seed: u64) -> Waveform {
    let sigma = noise_variance(wave.mean_power(), snr_db, mode, samples_per_bit).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = wave
        .samples
        .iter()
        .map(|&s| {
            let z: f64 = StandardNormal.sample(&mut rng);
            s + sigma * z
        })
        .collect();
    Waveform {
        samples,
        sample_rate: wave.sample_rate,
        padding: wave.padding,
    }
}
