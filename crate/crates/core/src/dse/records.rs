use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{AccuracyMetric, DesignPoint, DseError};

/// Synthesis results for one adder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub adder: String,
    pub width: u32,
    pub area_um2: f64,
    pub power_uw: f64,
    pub mae_pct: Option<f64>,
    pub ep_pct: Option<f64>,
}

/// One accuracy measurement (a BER sweep row or a tagging result).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRecord {
    pub adder: String,
    pub modulation: Option<String>,
    pub snr_db: Option<f64>,
    pub value: f64,
    pub corrupt: bool,
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn new(headers: &csv::StringRecord) -> Self {
        Columns {
            index: headers
                .iter()
                .enumerate()
                .map(|(i, h)| (h.trim().to_string(), i))
                .collect(),
        }
    }

    fn required(&self, name: &str) -> Result<usize, DseError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DseError::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input)
}

fn row_number(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn cell(rec: &csv::StringRecord, col: usize) -> Result<&str, DseError> {
    rec.get(col).ok_or_else(|| DseError::Parse {
        row: row_number(rec),
        message: format!("missing field {col}"),
    })
}

fn number<T: std::str::FromStr>(rec: &csv::StringRecord, col: usize, name: &str) -> Result<T, DseError> {
    let s = cell(rec, col)?;
    s.parse().map_err(|_| DseError::Parse {
        row: row_number(rec),
        message: format!("{name}: {s:?} is not a number"),
    })
}

fn optional_number(rec: &csv::StringRecord, col: Option<usize>, name: &str) -> Result<Option<f64>, DseError> {
    match col.and_then(|c| rec.get(c).map(|s| (c, s))) {
        Some((c, s)) if !s.is_empty() => number(rec, c, name).map(Some),
        _ => Ok(None),
    }
}

fn flag(rec: &csv::StringRecord, col: usize) -> Result<bool, DseError> {
    match cell(rec, col)?.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" | "" => Ok(false),
        other => Err(DseError::Parse {
            row: row_number(rec),
            message: format!("corrupt_flag: {other:?} is not a boolean"),
        }),
    }
}

/// Reads `adder,width,area_um2,power_uW[,mae_pct,ep_pct]`. Lines starting
/// with `#` are ignored.
pub fn load_costs<R: Read>(input: R) -> Result<Vec<CostRecord>, DseError> {
    let mut rdr = reader(input);
    let cols = Columns::new(rdr.headers()?);
    let adder = cols.required("adder")?;
    let width = cols.required("width")?;
    let area = cols.required("area_um2")?;
    let power = cols.required("power_uW")?;
    let (mae, ep) = (cols.optional("mae_pct"), cols.optional("ep_pct"));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = row_number(&rec);
        let r = CostRecord {
            adder: cell(&rec, adder)?.to_string(),
            width: number(&rec, width, "width")?,
            area_um2: number(&rec, area, "area_um2")?,
            power_uw: number(&rec, power, "power_uW")?,
            mae_pct: optional_number(&rec, mae, "mae_pct")?,
            ep_pct: optional_number(&rec, ep, "ep_pct")?,
        };
        if !(r.area_um2.is_finite() && r.area_um2 > 0.0 && r.power_uw.is_finite() && r.power_uw > 0.0) {
            return Err(DseError::Parse {
                row,
                message: "area and power must be positive".to_string(),
            });
        }
        if !seen.insert(r.adder.clone()) {
            return Err(DseError::DuplicateAdder { row, adder: r.adder });
        }
        out.push(r);
    }
    Ok(out)
}

/// Reads `adder,[modulation],[snr_db],<metric column>,[corrupt_flag]`, where
/// the metric column is `ber` or `accuracy_pct`. A BER sweep CSV qualifies.
pub fn load_accuracy<R: Read>(input: R, metric: AccuracyMetric) -> Result<Vec<AccuracyRecord>, DseError> {
    let mut rdr = reader(input);
    let cols = Columns::new(rdr.headers()?);
    let adder = cols.required("adder")?;
    let value = cols.required(metric.column())?;
    let modulation = cols.optional("modulation");
    let snr = cols.optional("snr_db");
    let corrupt = cols.optional("corrupt_flag");
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.push(AccuracyRecord {
            adder: cell(&rec, adder)?.to_string(),
            modulation: modulation.map(|c| cell(&rec, c).map(str::to_string)).transpose()?,
            snr_db: optional_number(&rec, snr, "snr_db")?,
            value: number(&rec, value, metric.column())?,
            corrupt: corrupt.map_or(Ok(false), |c| flag(&rec, c))?,
        });
    }
    Ok(out)
}

/// Result of [`join_points`]: the joined points plus accuracy rows whose
/// adder had no cost record.
#[derive(Debug, Clone, PartialEq)]
pub struct Joined {
    pub points: Vec<DesignPoint>,
    pub skipped: Vec<String>,
}

/// Inner join on adder name. Multiple accuracy rows per adder (one per SNR,
/// say) are averaged; the adder is corrupt only if every row is. With
/// `modulation` set, rows for other schemes are dropped first. Points come
/// out in cost-file order.
pub fn join_points(
    accuracy: &[AccuracyRecord],
    costs: &[CostRecord],
    metric: AccuracyMetric,
    modulation: Option<&str>,
) -> Result<Joined, DseError> {
    let mut groups: BTreeMap<&str, (f64, usize, usize)> = BTreeMap::new();
    for r in accuracy {
        if let (Some(want), Some(have)) = (modulation, &r.modulation) {
            if !want.eq_ignore_ascii_case(have) {
                continue;
            }
        }
        let g = groups.entry(&r.adder).or_default();
        g.0 += r.value;
        g.1 += 1;
        g.2 += usize::from(r.corrupt);
    }
    let known: HashSet<&str> = costs.iter().map(|c| c.adder.as_str()).collect();
    let skipped: Vec<String> = groups
        .keys()
        .filter(|a| !known.contains(*a))
        .map(|a| a.to_string())
        .collect();
    let points: Vec<DesignPoint> = costs
        .iter()
        .filter_map(|c| {
            groups.get(c.adder.as_str()).map(|&(sum, n, bad)| DesignPoint {
                adder: c.adder.clone(),
                metric,
                accuracy: sum / n as f64,
                area_um2: c.area_um2,
                power_uw: c.power_uw,
                corrupt: bad == n,
            })
        })
        .collect();
    if points.is_empty() {
        return Err(DseError::EmptyJoin { skipped });
    }
    Ok(Joined { points, skipped })
}
