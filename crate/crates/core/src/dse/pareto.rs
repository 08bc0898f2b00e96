use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{AccuracyMetric, DesignPoint, DseError};

/// `p` dominates `q`: no worse in every objective, better in at least one.
pub fn dominates(p: &[f64; 3], q: &[f64; 3]) -> bool {
    p.iter().zip(q).all(|(a, b)| a <= b) && p.iter().zip(q).any(|(a, b)| a < b)
}

fn lex(a: &[f64; 3], b: &[f64; 3]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Indices (ascending) of the non-dominated vectors. Identical vectors do
/// not dominate each other, so duplicates on the front are all kept.
///
/// After a lexicographic sort every dominator precedes the point it
/// dominates, and a dominated point is always dominated by some front
/// member, so each point is only checked against the front built so far.
pub fn non_dominated(objs: &[[f64; 3]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objs.len()).collect();
    order.sort_by(|&a, &b| lex(&objs[a], &objs[b]));
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        if !front.iter().any(|&f| dominates(&objs[f], &objs[i])) {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

/// Non-dominated subset of a design space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    indices: Vec<usize>,
    points: Vec<DesignPoint>,
}

impl ParetoFront {
    /// Positions of the members in the input slice.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn points(&self) -> &[DesignPoint] {
        &self.points
    }

    pub fn contains(&self, adder: &str) -> bool {
        self.points.iter().any(|p| p.adder == adder)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_points(points: &[DesignPoint]) -> Result<AccuracyMetric, DseError> {
    let first = points.first().ok_or(DseError::Empty)?.metric;
    for p in points {
        if p.metric != first {
            return Err(DseError::MixedMetrics);
        }
        if !p.objectives().iter().all(|v| v.is_finite()) {
            return Err(DseError::NonFinite(p.adder.clone()));
        }
    }
    Ok(first)
}

/// Pareto front over (accuracy, area, power). Corrupt points never join
/// the front.
pub fn pareto_front(points: &[DesignPoint]) -> Result<ParetoFront, DseError> {
    check_points(points)?;
    let eligible: Vec<usize> = (0..points.len()).filter(|&i| !points[i].corrupt).collect();
    let objs: Vec<[f64; 3]> = eligible.iter().map(|&i| points[i].objectives()).collect();
    let indices: Vec<usize> = non_dominated(&objs).into_iter().map(|k| eligible[k]).collect();
    Ok(ParetoFront {
        points: indices.iter().map(|&i| points[i].clone()).collect(),
        indices,
    })
}

/// Budget constraints. Comparisons are strict unless `inclusive`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_ber: Option<f64>,
    pub min_accuracy_pct: Option<f64>,
    pub max_area: Option<f64>,
    pub max_power: Option<f64>,
    pub inclusive: bool,
    /// Keep corrupt points (for listing what fits a hardware budget alone).
    pub include_corrupt: bool,
}

impl Budget {
    fn is_empty(&self) -> bool {
        self.max_ber.is_none() && self.min_accuracy_pct.is_none() && self.max_area.is_none() && self.max_power.is_none()
    }

    fn below(&self, value: f64, limit: Option<f64>) -> bool {
        match limit {
            None => true,
            Some(l) if self.inclusive => value <= l,
            Some(l) => value < l,
        }
    }

    pub fn admits(&self, p: &DesignPoint) -> bool {
        (self.include_corrupt || !p.corrupt)
            && self.below(p.accuracy, self.max_ber)
            && self.below(-p.accuracy, self.min_accuracy_pct.map(|m| -m))
            && self.below(p.area_um2, self.max_area)
            && self.below(p.power_uw, self.max_power)
    }
}

/// Points satisfying every constraint in `budget`, in input order.
pub fn filter_budget(points: &[DesignPoint], budget: &Budget) -> Result<Vec<DesignPoint>, DseError> {
    if budget.is_empty() {
        return Err(DseError::NoConstraint);
    }
    if let Some(p) = points.first() {
        let bad = match p.metric {
            AccuracyMetric::Ber => budget
                .min_accuracy_pct
                .is_some()
                .then_some("min_accuracy_pct on BER points"),
            AccuracyMetric::AccuracyPct => budget.max_ber.is_some().then_some("max_ber on accuracy points"),
        };
        if let Some(msg) = bad {
            return Err(DseError::MetricMismatch(msg.to_string()));
        }
    }
    Ok(points.iter().filter(|p| budget.admits(p)).cloned().collect())
}

/// Savings of one adder relative to a baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    pub adder: String,
    pub area_saving_pct: f64,
    pub power_saving_pct: f64,
    /// `accuracy - baseline accuracy`, in the metric's own units.
    pub accuracy_delta: f64,
}

pub fn savings_report(points: &[DesignPoint], baseline: &str) -> Result<Vec<Savings>, DseError> {
    let base = points
        .iter()
        .find(|p| p.adder == baseline)
        .ok_or_else(|| DseError::UnknownBaseline(baseline.to_string()))?;
    Ok(points
        .iter()
        .map(|p| Savings {
            adder: p.adder.clone(),
            area_saving_pct: 100.0 * (base.area_um2 - p.area_um2) / base.area_um2,
            power_saving_pct: 100.0 * (base.power_uw - p.power_uw) / base.power_uw,
            accuracy_delta: p.accuracy - base.accuracy,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(name: &str, acc: f64, area: f64, power: f64) -> DesignPoint {
        DesignPoint {
            adder: name.into(),
            metric: AccuracyMetric::Ber,
            accuracy: acc,
            area_um2: area,
            power_uw: power,
            corrupt: false,
        }
    }

    #[test]
    fn small_fronts() {
        let f = pareto_front(&[pt("a", 1.0, 1.0, 1.0), pt("b", 2.0, 2.0, 2.0)]).unwrap();
        assert_eq!(f.indices(), &[0]);
        let f = pareto_front(&[pt("a", 1.0, 2.0, 5.0), pt("b", 2.0, 1.0, 5.0)]).unwrap();
        assert_eq!(f.len(), 2);
        let f = pareto_front(&[pt("a", 1.0, 1.0, 1.0), pt("b", 1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn corrupt_points_excluded() {
        let mut bad = pt("bad", 0.0, 0.0, 0.0);
        bad.corrupt = true;
        let f = pareto_front(&[bad, pt("ok", 1.0, 1.0, 1.0)]).unwrap();
        assert_eq!(f.indices(), &[1]);
    }

    #[test]
    fn accuracy_is_maximized() {
        let mut a = pt("a", 90.0, 1.0, 1.0);
        let mut b = pt("b", 80.0, 1.0, 1.0);
        a.metric = AccuracyMetric::AccuracyPct;
        b.metric = AccuracyMetric::AccuracyPct;
        let f = pareto_front(&[b.clone(), a.clone()]).unwrap();
        assert_eq!(f.indices(), &[1]);
        assert!(matches!(
            pareto_front(&[a, pt("c", 0.1, 1.0, 1.0)]),
            Err(DseError::MixedMetrics)
        ));
        assert!(matches!(pareto_front(&[]), Err(DseError::Empty)));
    }

    #[test]
    fn budget_rules() {
        let pts = [pt("a", 0.1, 100.0, 50.0), pt("b", 0.2, 80.0, 40.0)];
        assert!(matches!(
            filter_budget(&pts, &Budget::default()),
            Err(DseError::NoConstraint)
        ));
        let strict = Budget {
            max_ber: Some(0.2),
            ..Budget::default()
        };
        assert_eq!(filter_budget(&pts, &strict).unwrap().len(), 1);
        let incl = Budget {
            inclusive: true,
            ..strict.clone()
        };
        assert_eq!(filter_budget(&pts, &incl).unwrap().len(), 2);
        let none = Budget {
            max_power: Some(1.0),
            ..Budget::default()
        };
        assert!(filter_budget(&pts, &none).unwrap().is_empty());
        let wrong = Budget {
            min_accuracy_pct: Some(50.0),
            ..Budget::default()
        };
        assert!(matches!(filter_budget(&pts, &wrong), Err(DseError::MetricMismatch(_))));
    }

    #[test]
    fn savings_arithmetic() {
        let pts = [pt("base", 0.1, 100.0, 200.0), pt("x", 0.12, 78.5, 150.0)];
        let s = savings_report(&pts, "base").unwrap();
        assert_eq!(s[0].area_saving_pct, 0.0);
        assert!((s[1].area_saving_pct - 21.5).abs() < 1e-12);
        assert!((s[1].power_saving_pct - 25.0).abs() < 1e-12);
        assert!((s[1].accuracy_delta - 0.02).abs() < 1e-12);
        assert!(matches!(
            savings_report(&pts, "nope"),
            Err(DseError::UnknownBaseline(_))
        ));
    }
}
