//! Accuracy, equalized odds difference and disparate impact.
//!
//! Group 1 is privileged, group 0 unprivileged. Rates with an empty
//! denominator are never replaced by 0 or 1: the metric is reported as
//! [`Metric::Undefined`] with a reason naming the empty cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Class;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("both groups required: no samples in the {0} group")]
    MissingGroup(&'static str),
    #[error("value at index {index} is {value}, expected 0 or 1")]
    NotBinary { index: usize, value: u8 },
}

/// A metric value that may be undefined because of an empty denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Defined(f64),
    Undefined(String),
}

impl Metric {
    pub fn value(&self) -> Option<f64> {
        match self {
            Metric::Defined(v) => Some(*v),
            Metric::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Metric::Defined(_))
    }

    fn map(&self, f: impl FnOnce(f64) -> f64) -> Metric {
        match self {
            Metric::Defined(v) => Metric::Defined(f(*v)),
            Metric::Undefined(r) => Metric::Undefined(r.clone()),
        }
    }
}

/// Confusion counts for one group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Confusion {
    pub fn n(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn add(&mut self, y_true: Class, y_pred: Class) {
        match (y_true, y_pred) {
            (1, 1) => self.tp += 1,
            (0, 1) => self.fp += 1,
            (0, 0) => self.tn += 1,
            _ => self.fn_ += 1,
        }
    }

    pub fn tpr(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fpr(&self) -> Option<f64> {
        ratio(self.fp, self.fp + self.tn)
    }

    /// Share of predictions that are class 1.
    pub fn positive_rate(&self) -> Option<f64> {
        ratio(self.tp + self.fp, self.n())
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfusion {
    pub privileged: Confusion,
    pub unprivileged: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub eod: Metric,
    pub di: Metric,
    /// `|1 - DI|`, distance of disparate impact from parity.
    pub di_distance: Metric,
    pub group_confusion: GroupConfusion,
    pub n_samples: usize,
    pub warnings: Vec<String>,
}

fn check_binary(values: &[u8]) -> Result<(), MetricsError> {
    match values.iter().position(|&v| v > 1) {
        Some(index) => Err(MetricsError::NotBinary { index, value: values[index] }),
        None => Ok(()),
    }
}

fn check_lengths(y_true: &[Class], y_pred: &[Class], group: Option<&[u8]>) -> Result<(), MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch(format!("{} labels, {} predictions", y_true.len(), y_pred.len())));
    }
    if let Some(g) = group {
        if g.len() != y_pred.len() {
            return Err(MetricsError::LengthMismatch(format!("{} predictions, {} group entries", y_pred.len(), g.len())));
        }
        check_binary(g)?;
    }
    if y_true.is_empty() {
        return Err(MetricsError::Empty);
    }
    check_binary(y_true)?;
    check_binary(y_pred)
}

pub fn accuracy(y_true: &[Class], y_pred: &[Class]) -> Result<f64, MetricsError> {
    check_lengths(y_true, y_pred, None)?;
    let correct = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(correct as f64 / y_true.len() as f64)
}

pub fn group_confusion(y_true: &[Class], y_pred: &[Class], group: &[u8]) -> Result<GroupConfusion, MetricsError> {
    check_lengths(y_true, y_pred, Some(group))?;
    let mut gc = GroupConfusion::default();
    for ((&t, &p), &g) in y_true.iter().zip(y_pred).zip(group) {
        let c = if g == 1 { &mut gc.privileged } else { &mut gc.unprivileged };
        c.add(t, p);
    }
    Ok(gc)
}

/// Equalized odds difference from precomputed counts.
pub fn eod_from_confusion(gc: &GroupConfusion) -> Metric {
    let cells = [
        (gc.unprivileged.tpr(), "TPR of the unprivileged group (no positive labels)"),
        (gc.privileged.tpr(), "TPR of the privileged group (no positive labels)"),
        (gc.unprivileged.fpr(), "FPR of the unprivileged group (no negative labels)"),
        (gc.privileged.fpr(), "FPR of the privileged group (no negative labels)"),
    ];
    let missing: Vec<&str> = cells.iter().filter(|(v, _)| v.is_none()).map(|(_, n)| *n).collect();
    if !missing.is_empty() {
        return Metric::Undefined(format!("EOD undefined: {}", missing.join("; ")));
    }
    let [tu, tp, fu, fp] = cells.map(|(v, _)| v.unwrap());
    Metric::Defined(((tu - tp).abs() + (fu - fp).abs()) / 2.0)
}

/// Disparate impact from precomputed counts. Both groups must be nonempty.
pub fn di_from_confusion(gc: &GroupConfusion) -> Result<Metric, MetricsError> {
    let unpriv = gc.unprivileged.positive_rate().ok_or(MetricsError::MissingGroup("unprivileged"))?;
    let priv_ = gc.privileged.positive_rate().ok_or(MetricsError::MissingGroup("privileged"))?;
    if priv_ == 0.0 {
        return Ok(Metric::Undefined(
            "DI undefined: the privileged group has no favorable predictions (division by zero)".into(),
        ));
    }
    Ok(Metric::Defined(unpriv / priv_))
}

pub fn equalized_odds_difference(y_true: &[Class], y_pred: &[Class], group: &[u8]) -> Result<Metric, MetricsError> {
    Ok(eod_from_confusion(&group_confusion(y_true, y_pred, group)?))
}

pub fn disparate_impact(y_pred: &[Class], group: &[u8]) -> Result<Metric, MetricsError> {
    // Labels do not enter DI; reuse the predictions as stand-in labels.
    di_from_confusion(&group_confusion(y_pred, y_pred, group)?)
}

pub fn full_report(y_true: &[Class], y_pred: &[Class], group: &[u8]) -> Result<MetricsReport, MetricsError> {
    let gc = group_confusion(y_true, y_pred, group)?;
    if gc.privileged.n() == 0 {
        return Err(MetricsError::MissingGroup("privileged"));
    }
    if gc.unprivileged.n() == 0 {
        return Err(MetricsError::MissingGroup("unprivileged"));
    }
    let eod = eod_from_confusion(&gc);
    let di = di_from_confusion(&gc)?;
    let warnings = [&eod, &di]
        .iter()
        .filter_map(|m| match m {
            Metric::Undefined(r) => Some(r.clone()),
            Metric::Defined(_) => None,
        })
        .collect();
    let correct = gc.privileged.tp + gc.privileged.tn + gc.unprivileged.tp + gc.unprivileged.tn;
    Ok(MetricsReport {
        accuracy: correct as f64 / y_true.len() as f64,
        di_distance: di.map(|v| (1.0 - v).abs()),
        eod,
        di,
        group_confusion: gc,
        n_samples: y_true.len(),
        warnings,
    })
}
