//! Design-space exploration over (accuracy, area, power).

mod pareto;
mod records;
mod report;

pub use pareto::{dominates, filter_budget, non_dominated, pareto_front, savings_report, Budget, ParetoFront, Savings};
pub use records::{join_points, load_accuracy, load_costs, AccuracyRecord, CostRecord, Joined};
pub use report::{build_report, read_report_csv, write_report_csv, write_report_json, ReportRow};

use serde::{Deserialize, Serialize};

/// Which accuracy figure a design point carries. BER is minimized,
/// tagging accuracy maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMetric {
    Ber,
    AccuracyPct,
}

impl AccuracyMetric {
    /// CSV column holding this metric.
    pub fn column(self) -> &'static str {
        match self {
            AccuracyMetric::Ber => "ber",
            AccuracyMetric::AccuracyPct => "accuracy_pct",
        }
    }
}

impl std::str::FromStr for AccuracyMetric {
    type Err = DseError;

    fn from_str(s: &str) -> Result<Self, DseError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ber" => Ok(AccuracyMetric::Ber),
            "accuracy" | "accuracy_pct" => Ok(AccuracyMetric::AccuracyPct),
            _ => Err(DseError::UnknownMetric(s.to_string())),
        }
    }
}

/// One adder placed in the design space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub adder: String,
    pub metric: AccuracyMetric,
    pub accuracy: f64,
    pub area_um2: f64,
    pub power_uw: f64,
    pub corrupt: bool,
}

impl DesignPoint {
    /// Accuracy oriented so that smaller is better.
    pub fn oriented_accuracy(&self) -> f64 {
        match self.metric {
            AccuracyMetric::Ber => self.accuracy,
            AccuracyMetric::AccuracyPct => -self.accuracy,
        }
    }

    /// (accuracy, area, power), all minimized.
    pub fn objectives(&self) -> [f64; 3] {
        [self.oriented_accuracy(), self.area_um2, self.power_uw]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DseError {
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("row {row}: duplicate adder {adder:?}")]
    DuplicateAdder { row: usize, adder: String },
    #[error("no accuracy row matched a cost record (skipped: {})", .skipped.join(", "))]
    EmptyJoin { skipped: Vec<String> },
    #[error("no design points")]
    Empty,
    #[error("design points mix BER and tagging accuracy")]
    MixedMetrics,
    #[error("adder {0}: non-finite objective")]
    NonFinite(String),
    #[error("a budget needs at least one constraint")]
    NoConstraint,
    #[error("{0}")]
    MetricMismatch(String),
    #[error("unknown metric {0:?} (expected ber or accuracy)")]
    UnknownMetric(String),
    #[error("baseline adder {0:?} not among the design points")]
    UnknownBaseline(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
