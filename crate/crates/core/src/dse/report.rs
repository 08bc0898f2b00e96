use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{savings_report, AccuracyMetric, DesignPoint, DseError, ParetoFront};

/// One line of an exploration report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub adder: String,
    pub metric: AccuracyMetric,
    pub accuracy: f64,
    pub area_um2: f64,
    #[serde(rename = "power_uW")]
    pub power_uw: f64,
    pub corrupt_flag: bool,
    pub pareto: bool,
    /// Savings against the baseline, when one was given.
    pub area_saving_pct: Option<f64>,
    pub power_saving_pct: Option<f64>,
    pub accuracy_delta: Option<f64>,
}

/// All points with their front membership (and savings against
/// `baseline`), stably sorted by (accuracy, power, area) with accuracy
/// best-first.
pub fn build_report(
    points: &[DesignPoint],
    front: &ParetoFront,
    baseline: Option<&str>,
) -> Result<Vec<ReportRow>, DseError> {
    let savings = baseline.map(|b| savings_report(points, b)).transpose()?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (p, q) = (&points[a], &points[b]);
        p.oriented_accuracy()
            .total_cmp(&q.oriented_accuracy())
            .then(p.power_uw.total_cmp(&q.power_uw))
            .then(p.area_um2.total_cmp(&q.area_um2))
    });
    Ok(order
        .into_iter()
        .map(|i| {
            let p = &points[i];
            let s = savings.as_ref().map(|s| &s[i]);
            ReportRow {
                adder: p.adder.clone(),
                metric: p.metric,
                accuracy: p.accuracy,
                area_um2: p.area_um2,
                power_uw: p.power_uw,
                corrupt_flag: p.corrupt,
                pareto: front.indices().contains(&i),
                area_saving_pct: s.map(|s| s.area_saving_pct),
                power_saving_pct: s.map(|s| s.power_saving_pct),
                accuracy_delta: s.map(|s| s.accuracy_delta),
            }
        })
        .collect())
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<(), DseError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<ReportRow>, DseError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(DseError::from)
}

pub fn write_report_json<W: Write>(rows: &[ReportRow], mut out: W) -> Result<(), DseError> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    out.write_all(b"\n")?;
    Ok(())
}
