use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use approxvit::comm::{ber_sweep, write_ber_csv};
use approxvit::{Modulation, PipelineConfig};
use serde_json::json;

use crate::manifest::{manifest_path, RunManifest};
use crate::{adders, emit, read_text, Global, UsageError};

#[derive(clap::Args)]
pub struct Args {
    /// Pipeline config (JSON). A manifest from an earlier run also works.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Source text to transmit.
    #[arg(long)]
    corpus: PathBuf,
    /// Decoder adders (see adder-metrics). Defaults to an exact adder of the
    /// decoder word width.
    #[arg(long = "adder", alias = "adders", value_name = "SPEC")]
    adders: Vec<String>,
    /// BASK, BPSK, QPSK, a comma list, or all.
    #[arg(long)]
    modulation: Option<String>,
    /// Runs averaged per SNR point.
    #[arg(long)]
    runs: Option<usize>,
    /// SNR grid as start:stop[:step] in dB, inclusive.
    #[arg(long, value_name = "RANGE", allow_hyphen_values = true)]
    snr: Option<String>,
}

fn parse_modulations(s: &str) -> Result<Vec<Modulation>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Modulation::ALL.to_vec());
    }
    s.split(',')
        .map(|m| m.parse().map_err(|e| UsageError(format!("{e}")).into()))
        .collect()
}

fn parse_snr(s: &str) -> Result<Vec<f64>> {
    let bad = || UsageError(format!("--snr expects start:stop[:step], got {s:?}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = match parts.as_slice() {
        [a, b] => (*a, *b, 1.0),
        [a, b, c] if *c > 0.0 => (*a, *b, *c),
        _ => return Err(bad().into()),
    };
    let n = ((stop - start) / step + 1e-9).floor();
    if n.is_nan() || n < 0.0 {
        return Err(bad().into());
    }
    Ok((0..=n as usize).map(|i| start + step * i as f64).collect())
}

fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = read_text(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    // a manifest carries the resolved pipeline under config.pipeline
    let value = match value.pointer("/config/pipeline") {
        Some(inner) if value.get("tool").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(value).with_context(|| format!("parsing {}", path.display()))
}

pub fn run(g: &Global, args: Args) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(m) = &args.modulation {
        cfg.modulation = parse_modulations(m)?;
    }
    if let Some(r) = args.runs {
        cfg.runs_per_snr = r;
    }
    if let Some(s) = &args.snr {
        cfg.snr_db_range = parse_snr(s)?;
    }
    cfg.master_seed = Some(g.seed_or(cfg.master_seed));
    cfg.validate()?;

    let specs = if args.adders.is_empty() {
        vec![format!("exact:{}", cfg.decoder_word_width)]
    } else {
        args.adders.clone()
    };
    let resolved = adders::resolve(&specs)?;
    let corpus = read_text(&args.corpus)?;
    let rows = ber_sweep(&cfg, &resolved.models, &corpus)?;

    let mut buf = Vec::new();
    write_ber_csv(&rows, &mut buf)?;
    emit(g.out.as_deref(), &buf)?;

    if let Some(out) = &g.out {
        let config = json!({
            "pipeline": cfg,
            "adders": resolved.models.iter().map(|m| m.name()).collect::<Vec<_>>(),
        });
        let mut manifest = RunManifest::new("ber-sweep", config, cfg.master_seed, g.jobs);
        manifest.add_input(&args.corpus)?;
        if let Some(c) = &args.config {
            manifest.add_input(c)?;
        }
        for f in &resolved.files {
            manifest.add_input(f)?;
        }
        manifest.outputs.push(out.display().to_string());
        manifest.write(&manifest_path(out))?;
    }
    Ok(())
}
