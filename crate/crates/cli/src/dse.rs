use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use approxvit::dse::{
    build_report, filter_budget, join_points, load_accuracy, load_costs, pareto_front, write_report_csv,
    write_report_json, Budget,
};
use approxvit::AccuracyMetric;
use clap::ValueEnum;
use serde_json::json;

use crate::manifest::{manifest_path, RunManifest};
use crate::{emit, Global};

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
pub struct Args {
    /// Accuracy table: a ber-sweep CSV or adder,accuracy_pct rows.
    #[arg(long)]
    accuracy: PathBuf,
    /// Cost table: adder,width,area_um2,power_uW[,mae_pct,ep_pct].
    #[arg(long)]
    costs: PathBuf,
    /// ber or accuracy. Inferred from the accuracy header when absent.
    #[arg(long)]
    metric: Option<String>,
    /// Adder the savings columns are measured against.
    #[arg(long)]
    baseline: Option<String>,
    /// Only use accuracy rows of this modulation.
    #[arg(long)]
    modulation: Option<String>,
    #[arg(long)]
    max_ber: Option<f64>,
    #[arg(long = "min-accuracy")]
    min_accuracy_pct: Option<f64>,
    #[arg(long)]
    max_area: Option<f64>,
    #[arg(long)]
    max_power: Option<f64>,
    /// Budget limits admit equality.
    #[arg(long)]
    inclusive: bool,
    /// Keep corrupt adders when applying a budget.
    #[arg(long)]
    include_corrupt: bool,
    /// Report format; inferred from the --out extension when absent.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn infer_metric(path: &Path) -> Result<AccuracyMetric> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let has_ber = rdr.headers()?.iter().any(|h| h.trim() == "ber");
    Ok(if has_ber {
        AccuracyMetric::Ber
    } else {
        AccuracyMetric::AccuracyPct
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).with_context(|| format!("reading {}", path.display()))
}

pub fn run(g: &Global, args: Args) -> Result<()> {
    let costs = load_costs(open(&args.costs)?).with_context(|| format!("{}", args.costs.display()))?;
    let metric = match &args.metric {
        Some(m) => m.parse()?,
        None => infer_metric(&args.accuracy)?,
    };
    let acc = load_accuracy(open(&args.accuracy)?, metric).with_context(|| format!("{}", args.accuracy.display()))?;
    let joined = join_points(&acc, &costs, metric, args.modulation.as_deref())?;
    if !joined.skipped.is_empty() {
        eprintln!("warning: no cost record for {}", joined.skipped.join(", "));
    }
    let points = joined.points;
    let front = pareto_front(&points)?;

    let budget = Budget {
        max_ber: args.max_ber,
        min_accuracy_pct: args.min_accuracy_pct,
        max_area: args.max_area,
        max_power: args.max_power,
        inclusive: args.inclusive,
        include_corrupt: args.include_corrupt,
    };
    let constrained = args.max_ber.is_some()
        || args.min_accuracy_pct.is_some()
        || args.max_area.is_some()
        || args.max_power.is_some();
    let mut rows = build_report(&points, &front, args.baseline.as_deref())?;
    if constrained {
        let keep: Vec<String> = filter_budget(&points, &budget)?.into_iter().map(|p| p.adder).collect();
        rows.retain(|r| keep.contains(&r.adder));
    }
    eprintln!(
        "{} points, {} corrupt, {} on the Pareto front{}",
        points.len(),
        points.iter().filter(|p| p.corrupt).count(),
        front.len(),
        if constrained {
            format!(", {} within budget", rows.len())
        } else {
            String::new()
        }
    );

    let format = args.format.unwrap_or_else(|| match &g.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
        _ => Format::Csv,
    });
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_report_csv(&rows, &mut buf)?,
        Format::Json => write_report_json(&rows, &mut buf)?,
    }
    emit(g.out.as_deref(), &buf)?;

    if let Some(out) = &g.out {
        let config = json!({
            "metric": metric,
            "baseline": args.baseline,
            "modulation": args.modulation,
            "budget": constrained.then_some(&budget),
            "format": format!("{format:?}").to_lowercase(),
        });
        let mut manifest = RunManifest::new("dse", config, None, g.jobs);
        manifest.add_input(&args.accuracy)?;
        manifest.add_input(&args.costs)?;
        manifest.outputs.push(out.display().to_string());
        manifest.write(&manifest_path(out))?;
    }
    Ok(())
}
