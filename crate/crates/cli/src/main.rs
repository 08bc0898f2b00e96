mod adders;
mod dse;
mod manifest;
mod metrics;
mod pos;
mod sweep;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "approxvit", version, about = "Approximate-adder Viterbi decoder workbench")]
struct Cli {
    /// Master seed for every random draw. Generated and printed when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (directory for adder-metrics). Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error metrics (MAE, EP, WCE, MSE, MRE) of one or more adders.
    AdderMetrics(metrics::Args),
    /// BER against SNR for each adder and modulation.
    BerSweep(sweep::Args),
    /// Tag sentences with the HMM tagger through each adder.
    PosTag(pos::Args),
    /// Pareto front, budget filter and savings over accuracy/area/power.
    Dse(dse::Args),
}

/// Options shared by all subcommands.
pub struct Global {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Global {
    /// The explicit seed, else `fallback`, else a fresh one (announced on
    /// stderr so the run can be repeated).
    pub fn seed_or(&self, fallback: Option<u64>) -> u64 {
        self.seed.or(fallback).unwrap_or_else(|| {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            s
        })
    }
}

/// Bad invocation rather than a failed run; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Writes `bytes` to `out`, or stdout when there is no path.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("starting worker pool")?;
    }
    let global = Global {
        seed: cli.seed,
        jobs: cli.jobs,
        out: cli.out,
    };
    match cli.command {
        Command::AdderMetrics(a) => metrics::run(&global, a),
        Command::BerSweep(a) => sweep::run(&global, a),
        Command::PosTag(a) => pos::run(&global, a),
        Command::Dse(a) => dse::run(&global, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
