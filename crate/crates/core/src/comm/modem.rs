use std::borrow::Cow;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CommError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modulation {
    /// On-off keying: `1` is the carrier, `0` is silence.
    #[serde(rename = "BASK")]
    Bask,
    #[serde(rename = "BPSK")]
    Bpsk,
    /// Gray-mapped: 00→45°, 01→135°, 11→225°, 10→315°.
    #[serde(rename = "QPSK")]
    Qpsk,
}

impl Modulation {
    pub const ALL: [Modulation; 3] = [Modulation::Bask, Modulation::Bpsk, Modulation::Qpsk];

    pub fn as_str(self) -> &'static str {
        match self {
            Modulation::Bask => "BASK",
            Modulation::Bpsk => "BPSK",
            Modulation::Qpsk => "QPSK",
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modulation {
    type Err = CommError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BASK" => Ok(Modulation::Bask),
            "BPSK" => Ok(Modulation::Bpsk),
            "QPSK" => Ok(Modulation::Qpsk),
            _ => Err(CommError::UnknownModulation(s.to_string())),
        }
    }
}

/// Carrier and timing parameters shared by modulator and demodulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModemParams {
    pub samples_per_bit: usize,
    pub bitrate: f64,
    pub carrier_freq: f64,
    pub carrier_amplitude: f64,
}

impl Default for ModemParams {
    fn default() -> Self {
        ModemParams {
            samples_per_bit: 40,
            bitrate: 1000.0,
            carrier_freq: 1000.0,
            carrier_amplitude: 1.0,
        }
    }
}

impl ModemParams {
    pub fn sample_rate(&self) -> f64 {
        self.bitrate * self.samples_per_bit as f64
    }

    /// Samples per modulation symbol. QPSK symbols last two bit periods.
    pub fn samples_per_symbol(&self, scheme: Modulation) -> usize {
        self.samples_per_bit * scheme.bits_per_symbol()
    }

    #[inline]
    fn phase(&self, sample: usize) -> f64 {
        TAU * self.carrier_freq * sample as f64 / self.sample_rate()
    }
}

/// Reference oscillator. When every symbol spans a whole number of carrier
/// cycles the per-symbol table is reused instead of recomputing sin/cos.
struct Oscillator {
    per_symbol: usize,
    table: Option<Vec<(f64, f64)>>,
}

impl Oscillator {
    fn new(params: &ModemParams, per_symbol: usize) -> Self {
        let cycles = params.carrier_freq * per_symbol as f64 / params.sample_rate();
        let table = ((cycles - cycles.round()).abs() < 1e-9)
            .then(|| (0..per_symbol).map(|j| params.phase(j).sin_cos()).collect());
        Oscillator { per_symbol, table }
    }

    /// `(sin, cos)` of the carrier phase at sample `j` of symbol `k`.
    #[inline]
    fn at(&self, params: &ModemParams, k: usize, j: usize) -> (f64, f64) {
        match &self.table {
            Some(t) => t[j],
            None => params.phase(k * self.per_symbol + j).sin_cos(),
        }
    }
}

/// Real-valued sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    /// Zero bits appended by the modulator (QPSK with an odd bit count).
    pub padding: usize,
}

impl Waveform {
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }
}

pub fn modulate(scheme: Modulation, bits: &[u8], params: &ModemParams) -> Waveform {
    let amp = params.carrier_amplitude;
    let spb = params.samples_per_bit;
    let padding = usize::from(scheme == Modulation::Qpsk && bits.len() % 2 == 1);
    let bits: Cow<[u8]> = if padding == 1 {
        let mut v = bits.to_vec();
        v.push(0);
        Cow::Owned(v)
    } else {
        Cow::Borrowed(bits)
    };
    let sps = params.samples_per_symbol(scheme);
    let osc = Oscillator::new(params, sps);
    let mut samples = Vec::with_capacity(bits.len() / scheme.bits_per_symbol() * sps);
    match scheme {
        Modulation::Bask | Modulation::Bpsk => {
            for (k, &b) in bits.iter().enumerate() {
                let level = match (scheme, b & 1) {
                    (Modulation::Bask, 0) => 0.0,
                    (Modulation::Bpsk, 0) => -amp,
                    _ => amp,
                };
                samples.extend((0..spb).map(|i| level * osc.at(params, k, i).1));
            }
        }
        Modulation::Qpsk => {
            for (k, pair) in bits.chunks_exact(2).enumerate() {
                // in-phase sign from the second bit, quadrature from the first
                let i_sign = if pair[1] & 1 == 0 { 1.0 } else { -1.0 };
                let q_sign = if pair[0] & 1 == 0 { 1.0 } else { -1.0 };
                samples.extend((0..sps).map(|j| {
                    let (sin, cos) = osc.at(params, k, j);
                    amp * FRAC_1_SQRT_2 * (i_sign * cos - q_sign * sin)
                }));
            }
        }
    }
    Waveform {
        samples,
        sample_rate: params.sample_rate(),
        padding,
    }
}

/// Coherent correlation receiver; returns hard bits with modulator padding
/// removed.
pub fn demodulate(scheme: Modulation, wave: &Waveform, params: &ModemParams) -> Result<Vec<u8>, CommError> {
    let sps = params.samples_per_symbol(scheme);
    if sps == 0 || !wave.samples.len().is_multiple_of(sps) {
        return Err(CommError::WaveFraming {
            samples: wave.samples.len(),
            per_symbol: sps,
        });
    }
    let amp = params.carrier_amplitude;
    let osc = Oscillator::new(params, sps);
    let mut bits = Vec::with_capacity(wave.samples.len() / sps * scheme.bits_per_symbol());
    for (k, sym) in wave.samples.chunks_exact(sps).enumerate() {
        let mut in_phase = 0.0;
        let mut quad = 0.0;
        let mut energy = 0.0;
        for (j, &r) in sym.iter().enumerate() {
            let (s, c) = osc.at(params, k, j);
            in_phase += r * c;
            quad -= r * s;
            energy += c * c;
        }
        match scheme {
            Modulation::Bask => bits.push(u8::from(in_phase > 0.5 * amp * energy)),
            Modulation::Bpsk => bits.push(u8::from(in_phase > 0.0)),
            Modulation::Qpsk => {
                bits.push(u8::from(quad < 0.0));
                bits.push(u8::from(in_phase < 0.0));
            }
        }
    }
    bits.truncate(bits.len().saturating_sub(wave.padding));
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModemParams {
        ModemParams::default()
    }

    #[test]
    fn bpsk_is_antipodal() {
        let w = modulate(Modulation::Bpsk, &[1, 0], &params());
        assert_eq!(w.samples.len(), 80);
        for i in 0..40 {
            assert!((w.samples[i] + w.samples[40 + i]).abs() < 1e-12);
        }
        assert_eq!(w.sample_rate, 40_000.0);
    }

    #[test]
    fn bask_zero_is_silent() {
        let w = modulate(Modulation::Bask, &[0], &params());
        assert_eq!(w.samples, vec![0.0; 40]);
    }

    #[test]
    fn qpsk_constant_envelope() {
        let p = params();
        let bits = [0, 0, 0, 1, 1, 1, 1, 0];
        let w = modulate(Modulation::Qpsk, &bits, &p);
        let phases = [45.0f64, 135.0, 225.0, 315.0];
        for (k, deg) in phases.iter().enumerate() {
            for j in 0..80 {
                let n = k * 80 + j;
                let expected = (p.phase(n) + deg.to_radians()).cos();
                assert!((w.samples[n] - expected).abs() < 1e-9, "symbol {k} sample {j}");
            }
        }
    }

    #[test]
    fn noiseless_inverse_all_schemes() {
        let bits: Vec<u8> = (0..101).map(|i| ((i * 7 + i / 3) % 2) as u8).collect();
        for scheme in Modulation::ALL {
            let w = modulate(scheme, &bits, &params());
            assert_eq!(demodulate(scheme, &w, &params()).unwrap(), bits, "{scheme}");
        }
        let w = modulate(Modulation::Qpsk, &bits, &params());
        assert_eq!(w.padding, 1);
    }

    #[test]
    fn non_integer_cycles_still_invert() {
        let p = ModemParams {
            carrier_freq: 1370.0,
            ..params()
        };
        let bits: Vec<u8> = (0..64).map(|i| ((i * 5) % 3 % 2) as u8).collect();
        for scheme in Modulation::ALL {
            let w = modulate(scheme, &bits, &p);
            assert_eq!(demodulate(scheme, &w, &p).unwrap(), bits, "{scheme}");
        }
    }

    #[test]
    fn framing_error() {
        let w = Waveform {
            samples: vec![0.0; 41],
            sample_rate: 40_000.0,
            padding: 0,
        };
        assert!(matches!(
            demodulate(Modulation::Bpsk, &w, &params()),
            Err(CommError::WaveFraming {
                samples: 41,
                per_symbol: 40
            })
        ));
    }

    #[test]
    fn parse_names() {
        assert_eq!("qpsk".parse::<Modulation>().unwrap(), Modulation::Qpsk);
        assert!("16QAM".parse::<Modulation>().is_err());
    }
}
