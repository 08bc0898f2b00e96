use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::adder::AdderModel;
use crate::seed::derive_seed;
use crate::viterbi::{ConvCode, ViterbiDecoder};

use super::{awgn_with, demodulate, modulate, CommError, HuffmanCodebook, ModemParams, Modulation, SnrMode};

/// A sweep row is flagged corrupt when fewer than this fraction of source
/// characters survive decoding in place...
pub const CORRUPTION_MATCH_THRESHOLD: f64 = 0.01;

/// ...or when the decoded bits are this close to (or worse than) a coin flip.
pub const CORRUPTION_BER: f64 = 0.45;

/// Full parameter set of the simulated link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Schemes to sweep. Accepts `"all"`, a single name, or a list.
    #[serde(deserialize_with = "modulation_set")]
    pub modulation: Vec<Modulation>,
    pub samples_per_bit: usize,
    pub bitrate: f64,
    pub carrier_freq: f64,
    pub carrier_amplitude: f64,
    pub snr_db_range: Vec<f64>,
    pub snr_mode: SnrMode,
    pub code: ConvCode,
    /// Turning this off sends the source bits uncoded (no Viterbi stage).
    pub channel_coding: bool,
    pub decoder_word_width: u32,
    pub runs_per_snr: usize,
    pub master_seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            modulation: Modulation::ALL.to_vec(),
            samples_per_bit: 40,
            bitrate: 1000.0,
            carrier_freq: 1000.0,
            carrier_amplitude: 1.0,
            snr_db_range: (-15..=10).map(f64::from).collect(),
            snr_mode: SnrMode::PerSample,
            code: ConvCode::default(),
            channel_coding: true,
            decoder_word_width: 12,
            runs_per_snr: 12,
            master_seed: None,
        }
    }
}

fn modulation_set<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Modulation>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        One(String),
        Many(Vec<String>),
    }
    let names = match Repr::deserialize(de)? {
        Repr::One(s) if s.eq_ignore_ascii_case("all") => return Ok(Modulation::ALL.to_vec()),
        Repr::One(s) => s.split(',').map(str::to_string).collect(),
        Repr::Many(v) => v,
    };
    names
        .iter()
        .map(|n| n.parse().map_err(serde::de::Error::custom))
        .collect()
}

impl PipelineConfig {
    pub fn modem(&self) -> ModemParams {
        ModemParams {
            samples_per_bit: self.samples_per_bit,
            bitrate: self.bitrate,
            carrier_freq: self.carrier_freq,
            carrier_amplitude: self.carrier_amplitude,
        }
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), CommError> {
        let mut problems = Vec::new();
        if self.modulation.is_empty() {
            problems.push("modulation: at least one scheme required".to_string());
        }
        if self.samples_per_bit < 2 {
            problems.push(format!("samples_per_bit: {} < 2", self.samples_per_bit));
        }
        for (name, v) in [
            ("bitrate", self.bitrate),
            ("carrier_freq", self.carrier_freq),
            ("carrier_amplitude", self.carrier_amplitude),
        ] {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{name}: must be finite and positive, got {v}"));
            }
        }
        if self.bitrate > 0.0 && self.carrier_freq >= 0.5 * self.modem().sample_rate() {
            problems.push(format!(
                "carrier_freq: {} Hz is at or above Nyquist for {} samples/s",
                self.carrier_freq,
                self.modem().sample_rate()
            ));
        }
        if self.snr_db_range.is_empty() {
            problems.push("snr_db_range: empty".to_string());
        }
        if let Some(bad) = self.snr_db_range.iter().find(|v| !v.is_finite()) {
            problems.push(format!("snr_db_range: non-finite value {bad}"));
        }
        if self.runs_per_snr < 1 {
            problems.push("runs_per_snr: must be at least 1".to_string());
        }
        if !(1..=crate::adder::MAX_WIDTH).contains(&self.decoder_word_width) {
            problems.push(format!(
                "decoder_word_width: {} outside 1..={}",
                self.decoder_word_width,
                crate::adder::MAX_WIDTH
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CommError::InvalidConfig(problems))
        }
    }
}

/// One BER measurement, averaged over `runs` independent channel
/// realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerResult {
    pub adder: String,
    pub modulation: Modulation,
    pub snr_db: f64,
    pub ber: f64,
    /// Standard error of `ber` across runs (0 for a single run).
    pub ber_std_err: f64,
    /// Source bits compared, summed over runs.
    pub bits_compared: u64,
    pub runs: usize,
    /// Mean fraction of source characters recovered in place.
    pub symbol_match: f64,
    pub corrupt: bool,
}

/// Source text turned into the bitstreams every run shares.
#[derive(Debug, Clone)]
pub struct PreparedSource {
    pub text: String,
    pub codebook: HuffmanCodebook,
    pub source_bits: Vec<u8>,
    pub channel_bits: Vec<u8>,
}

impl PreparedSource {
    pub fn new(cfg: &PipelineConfig, text: &str) -> Result<Self, CommError> {
        if text.is_empty() {
            return Err(CommError::EmptyText);
        }
        let codebook = HuffmanCodebook::from_text(text)?;
        let source_bits = codebook.encode(text)?;
        let channel_bits = if cfg.channel_coding {
            cfg.code.encode(&source_bits, true)
        } else {
            source_bits.clone()
        };
        Ok(PreparedSource {
            text: text.to_string(),
            codebook,
            source_bits,
            channel_bits,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RunStats {
    bit_errors: u64,
    bits: u64,
    symbol_match: f64,
}

fn channel(
    cfg: &PipelineConfig,
    wave: &super::Waveform,
    scheme: Modulation,
    snr_db: f64,
    seed: u64,
) -> Result<Vec<u8>, CommError> {
    let noisy = awgn_with(wave, snr_db, cfg.snr_mode, cfg.samples_per_bit, seed);
    demodulate(scheme, &noisy, &cfg.modem())
}

fn receive(
    cfg: &PipelineConfig,
    src: &PreparedSource,
    rx: &[u8],
    decoder: Option<&ViterbiDecoder>,
) -> Result<RunStats, CommError> {
    let decoded = match decoder {
        Some(d) => d.decode(rx, true)?,
        None => rx.to_vec(),
    };
    debug_assert_eq!(decoded.len(), src.source_bits.len());
    let _ = cfg;
    let bit_errors = decoded.iter().zip(&src.source_bits).filter(|(a, b)| a != b).count() as u64
        + src.source_bits.len().abs_diff(decoded.len()) as u64;
    let text = src.codebook.decode(&decoded).text;
    let total = src.text.chars().count();
    let matched = text.chars().zip(src.text.chars()).filter(|(a, b)| a == b).count();
    Ok(RunStats {
        bit_errors,
        bits: src.source_bits.len() as u64,
        symbol_match: matched as f64 / total as f64,
    })
}

fn decoder_for<'a>(cfg: &PipelineConfig, adder: &'a AdderModel) -> Result<Option<ViterbiDecoder<'a>>, CommError> {
    if cfg.channel_coding {
        Ok(Some(ViterbiDecoder::new(&cfg.code, adder, cfg.decoder_word_width)?))
    } else {
        Ok(None)
    }
}

fn aggregate(adder: &str, scheme: Modulation, snr_db: f64, runs: &[RunStats]) -> BerResult {
    let n = runs.len() as f64;
    let bers: Vec<f64> = runs.iter().map(|r| r.bit_errors as f64 / r.bits as f64).collect();
    let mean = bers.iter().sum::<f64>() / n;
    let std_err = if runs.len() > 1 {
        let var = bers.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let symbol_match = runs.iter().map(|r| r.symbol_match).sum::<f64>() / n;
    BerResult {
        adder: adder.to_string(),
        modulation: scheme,
        snr_db,
        ber: mean,
        ber_std_err: std_err,
        bits_compared: runs.iter().map(|r| r.bits).sum(),
        runs: runs.len(),
        symbol_match,
        corrupt: symbol_match < CORRUPTION_MATCH_THRESHOLD || mean >= CORRUPTION_BER,
    }
}

/// Single end-to-end run: Huffman → convolutional encode → modulate → AWGN →
/// demodulate → Viterbi (through `adder`) → Huffman decode. BER compares the
/// decoder output with the Huffman-coded source bits.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    text: &str,
    scheme: Modulation,
    snr_db: f64,
    adder: &AdderModel,
    seed: u64,
) -> Result<BerResult, CommError> {
    cfg.validate()?;
    let src = PreparedSource::new(cfg, text)?;
    let decoder = decoder_for(cfg, adder)?;
    let wave = modulate(scheme, &src.channel_bits, &cfg.modem());
    let rx = channel(cfg, &wave, scheme, snr_db, seed)?;
    let stats = receive(cfg, &src, &rx, decoder.as_ref())?;
    Ok(aggregate(adder.name(), scheme, snr_db, &[stats]))
}

/// Seed of one Monte Carlo cell. Independent of the adder, so every adder
/// sees the same noise realizations.
pub fn run_seed(master: u64, scheme: Modulation, snr_index: usize, run: usize) -> u64 {
    derive_seed(master, &[scheme as u64, snr_index as u64, run as u64])
}

/// BER for every (adder, modulation, SNR), each averaged over
/// `runs_per_snr` runs. Rows are ordered adder-major, then modulation, then
/// SNR. Runs execute on the ambient rayon pool; output is identical for any
/// worker count.
pub fn ber_sweep(cfg: &PipelineConfig, adders: &[AdderModel], corpus: &str) -> Result<Vec<BerResult>, CommError> {
    cfg.validate()?;
    let src = PreparedSource::new(cfg, corpus)?;
    let decoders = adders
        .iter()
        .map(|a| decoder_for(cfg, a))
        .collect::<Result<Vec<_>, _>>()?;
    let master = cfg.master_seed.unwrap_or(0);
    let params = cfg.modem();
    let waves: Vec<_> = cfg
        .modulation
        .iter()
        .map(|&m| modulate(m, &src.channel_bits, &params))
        .collect();

    let runs = cfg.runs_per_snr;
    let cells: Vec<(usize, usize, usize)> = (0..cfg.modulation.len())
        .flat_map(|m| (0..cfg.snr_db_range.len()).flat_map(move |s| (0..runs).map(move |r| (m, s, r))))
        .collect();

    let per_cell: Vec<Vec<RunStats>> = cells
        .par_iter()
        .map(|&(m, s, r)| {
            let scheme = cfg.modulation[m];
            let snr = cfg.snr_db_range[s];
            let rx = channel(cfg, &waves[m], scheme, snr, run_seed(master, scheme, s, r))?;
            decoders
                .iter()
                .map(|d| receive(cfg, &src, &rx, d.as_ref()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let n_snr = cfg.snr_db_range.len();
    let mut out = Vec::with_capacity(adders.len() * cfg.modulation.len() * n_snr);
    for (ai, adder) in adders.iter().enumerate() {
        for (m, &scheme) in cfg.modulation.iter().enumerate() {
            for (s, &snr) in cfg.snr_db_range.iter().enumerate() {
                let base = (m * n_snr + s) * runs;
                let stats: Vec<RunStats> = per_cell[base..base + runs].iter().map(|c| c[ai]).collect();
                out.push(aggregate(adder.name(), scheme, snr, &stats));
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct BerCsvRow<'a> {
    adder: &'a str,
    modulation: Modulation,
    snr_db: f64,
    ber: f64,
    bits_compared: u64,
    runs: usize,
    corrupt_flag: bool,
}

/// Writes `adder,modulation,snr_db,ber,bits_compared,runs,corrupt_flag`.
pub fn write_ber_csv<W: Write>(rows: &[BerResult], out: W) -> Result<(), CommError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(BerCsvRow {
            adder: &r.adder,
            modulation: r.modulation,
            snr_db: r.snr_db,
            ber: r.ber,
            bits_compared: r.bits_compared,
            runs: r.runs,
            corrupt_flag: r.corrupt,
        })?;
    }
    w.flush().map_err(|e| CommError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "the quick brown fox jumps over the lazy dog while the cat sleeps";

    fn quick_cfg() -> PipelineConfig {
        PipelineConfig {
            snr_db_range: vec![-10.0, 0.0, 10.0],
            runs_per_snr: 2,
            master_seed: Some(7),
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn defaults_cover_26_snr_points() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.snr_db_range.len(), 26);
        assert_eq!(cfg.snr_db_range[0], -15.0);
        assert_eq!(cfg.snr_db_range[25], 10.0);
        cfg.validate().unwrap();
    }

    #[test]
    fn validation_lists_every_problem() {
        let cfg = PipelineConfig {
            samples_per_bit: 1,
            runs_per_snr: 0,
            snr_db_range: vec![f64::NAN],
            ..PipelineConfig::default()
        };
        match cfg.validate() {
            Err(CommError::InvalidConfig(p)) => assert!(p.len() >= 3, "{p:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_json_forms() {
        let cfg: PipelineConfig = serde_json::from_str(r#"{"modulation": "all"}"#).unwrap();
        assert_eq!(cfg.modulation.len(), 3);
        let cfg: PipelineConfig = serde_json::from_str(r#"{"modulation": "BPSK"}"#).unwrap();
        assert_eq!(cfg.modulation, vec![Modulation::Bpsk]);
        let cfg: PipelineConfig = serde_json::from_str(
            r#"{"modulation": ["QPSK", "BASK"], "code": {"constraint_length": 5, "generators_octal": ["23", "35"]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.modulation, vec![Modulation::Qpsk, Modulation::Bask]);
        assert_eq!(cfg.code.constraint_length(), 5);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn high_snr_is_error_free() {
        let cfg = quick_cfg();
        let adder = AdderModel::exact(12).unwrap();
        for scheme in Modulation::ALL {
            let r = run_pipeline(&cfg, TEXT, scheme, 100.0, &adder, 3).unwrap();
            assert_eq!(r.ber, 0.0, "{scheme}");
            assert_eq!(r.symbol_match, 1.0);
            assert!(!r.corrupt);
        }
    }

    #[test]
    fn empty_text_rejected() {
        let adder = AdderModel::exact(12).unwrap();
        assert!(matches!(
            run_pipeline(&quick_cfg(), "", Modulation::Bpsk, 0.0, &adder, 1),
            Err(CommError::EmptyText)
        ));
    }

    #[test]
    fn sweep_shape_and_order() {
        let cfg = quick_cfg();
        let adders = vec![
            AdderModel::exact(12).unwrap(),
            AdderModel::from_spec("lower-or:12:2").unwrap(),
        ];
        let rows = ber_sweep(&cfg, &adders, TEXT).unwrap();
        assert_eq!(rows.len(), 2 * 3 * 3);
        assert_eq!(rows[0].adder, "exact12");
        assert_eq!(rows[0].modulation, Modulation::Bask);
        assert_eq!(rows[9].adder, "loa12_k2");
        assert!(rows.iter().all(|r| r.runs == 2 && r.bits_compared > 0));
        let mut buf = Vec::new();
        write_ber_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("adder,modulation,snr_db,ber,bits_compared,runs,corrupt_flag\n"));
        assert_eq!(text.lines().count(), 19);
    }

    #[test]
    fn very_aggressive_adder_corrupts() {
        let cfg = PipelineConfig {
            snr_db_range: vec![10.0],
            runs_per_snr: 1,
            modulation: vec![Modulation::Bpsk],
            ..PipelineConfig::default()
        };
        let trunc = AdderModel::from_spec("truncated:12:12").unwrap();
        let rows = ber_sweep(&cfg, &[trunc], TEXT).unwrap();
        assert!(rows[0].ber >= CORRUPTION_BER, "{:?}", rows[0]);
        assert!(rows[0].corrupt);
    }
}
