use std::fs;

use anyhow::{Context, Result};
use approxvit::adder::{error_metrics, EXHAUSTIVE_LIMIT_BITS};
use approxvit::MetricsMode;
use clap::ValueEnum;
use serde_json::json;

use crate::manifest::RunManifest;
use crate::{adders, emit, Global};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    /// Exhaustive when 2n fits the enumeration limit, sampled otherwise.
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(clap::Args)]
pub struct Args {
    /// Adder specs: exact:N, lower-or:N:K, truncated:N:K, a .net file or a
    /// directory of them. Repeatable or comma separated.
    #[arg(long = "builtin", alias = "adder", value_name = "SPEC")]
    builtin: Vec<String>,
    /// Directory of gate-level netlists (*.net).
    #[arg(long)]
    netlist_dir: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    /// Operand pairs drawn in sampled mode.
    #[arg(long, default_value_t = 1 << 20)]
    samples: u64,
}

pub fn run(g: &Global, args: Args) -> Result<()> {
    let specs: Vec<String> = args.builtin.iter().chain(&args.netlist_dir).cloned().collect();
    let resolved = adders::resolve(&specs)?;
    let sampled = |w: u32| match args.mode {
        Mode::Exhaustive => false,
        Mode::Sampled => true,
        Mode::Auto => 2 * w > EXHAUSTIVE_LIMIT_BITS,
    };
    let seed = resolved
        .models
        .iter()
        .any(|m| sampled(m.width()))
        .then(|| g.seed_or(None));

    let mut reports = Vec::new();
    for m in &resolved.models {
        let mode = match seed {
            Some(seed) if sampled(m.width()) => MetricsMode::Sampled {
                count: args.samples,
                seed,
            },
            _ => MetricsMode::Exhaustive,
        };
        reports.push(error_metrics(m, mode).with_context(|| format!("adder {}", m.name()))?);
    }

    let Some(dir) = &g.out else {
        let mut text = serde_json::to_string_pretty(&reports)?;
        text.push('\n');
        return emit(None, text.as_bytes());
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let config = json!({
        "adders": resolved.models.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "mode": format!("{:?}", args.mode).to_lowercase(),
        "samples": args.samples,
    });
    let mut manifest = RunManifest::new("adder-metrics", config, seed, g.jobs);
    for f in &resolved.files {
        manifest.add_input(f)?;
    }
    for r in &reports {
        let path = dir.join(format!("{}.json", r.name));
        let mut text = serde_json::to_string_pretty(r)?;
        text.push('\n');
        emit(Some(&path), text.as_bytes())?;
        manifest.outputs.push(path.display().to_string());
    }
    manifest.write(&dir.join("manifest.json"))
}
