//! Group-specific decision thresholds chosen to minimise equalized odds
//! difference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{eod_from_confusion, Confusion, GroupConfusion, Metric};
use crate::Class;

/// Grid resolution: thresholds are `i / GRID_STEPS` for `i in 0..=GRID_STEPS`.
pub const GRID_STEPS: usize = 100;

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("both groups required: no samples in the {0} group")]
    MissingGroup(&'static str),
    #[error("score at index {0} is outside [0, 1]")]
    ScoreOutOfRange(usize),
    #[error("value at index {0} is not 0 or 1")]
    NotBinary(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub threshold_privileged: f64,
    pub threshold_unprivileged: f64,
    /// EOD of the thresholded predictions on the fitting data; `None` when
    /// EOD is undefined there.
    pub objective_achieved: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn grid_value(i: usize) -> f64 {
    i as f64 / GRID_STEPS as f64
}

/// Predict 1 iff the score reaches the threshold of the sample's group.
pub fn apply_threshold_policy(policy: &ThresholdPolicy, scores: &[f64], group: &[u8]) -> Vec<Class> {
    assert_eq!(scores.len(), group.len(), "one group entry per score");
    scores
        .iter()
        .zip(group)
        .map(|(&s, &g)| {
            let t = if g == 1 { policy.threshold_privileged } else { policy.threshold_unprivileged };
            Class::from(s >= t)
        })
        .collect()
}

/// Exhaustive search over the threshold grid for each group.
///
/// Candidates are ranked by lower EOD, then higher accuracy, then smaller
/// `|t_priv - t_unpriv|`, then smaller `(t_priv, t_unpriv)`
/// lexicographically. If EOD is undefined on the fitting data the policy
/// falls back to 0.5 for both groups.
pub fn fit_threshold_policy(scores: &[f64], y_true: &[Class], group: &[u8]) -> Result<ThresholdPolicy, ThresholdError> {
    if scores.len() != y_true.len() || scores.len() != group.len() {
        return Err(ThresholdError::LengthMismatch(format!(
            "{} scores, {} labels, {} group entries",
            scores.len(),
            y_true.len(),
            group.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| !(0.0..=1.0).contains(s)) {
        return Err(ThresholdError::ScoreOutOfRange(i));
    }
    if let Some(i) = y_true.iter().zip(group).position(|(&y, &g)| y > 1 || g > 1) {
        return Err(ThresholdError::NotBinary(i));
    }
    if !group.contains(&1) {
        return Err(ThresholdError::MissingGroup("privileged"));
    }
    if !group.contains(&0) {
        return Err(ThresholdError::MissingGroup("unprivileged"));
    }

    // Confusion counts per group at every grid threshold.
    let per_group = |g: u8| -> Vec<Confusion> {
        (0..=GRID_STEPS)
            .map(|i| {
                let t = grid_value(i);
                let mut c = Confusion::default();
                for ((&s, &y), _) in scores.iter().zip(y_true).zip(group).filter(|(_, &gg)| gg == g) {
                    c.add(y, Class::from(s >= t));
                }
                c
            })
            .collect()
    };
    let privileged = per_group(1);
    let unprivileged = per_group(0);

    let probe = GroupConfusion { privileged: privileged[0], unprivileged: unprivileged[0] };
    if let Metric::Undefined(reason) = eod_from_confusion(&probe) {
        return Ok(ThresholdPolicy {
            threshold_privileged: 0.5,
            threshold_unprivileged: 0.5,
            objective_achieved: None,
            warnings: vec![format!("{reason}; falling back to thresholds 0.5/0.5")],
        });
    }

    // (eod key, correct, gap, i, j); the first candidate wins remaining ties,
    // which makes the final tie-break lexicographic in (i, j).
    let mut best: Option<(u128, u64, usize, usize, usize)> = None;
    for (i, cp) in privileged.iter().enumerate() {
        for (j, cu) in unprivileged.iter().enumerate() {
            let key = eod_key(cp, cu);
            let correct = cp.tp + cp.tn + cu.tp + cu.tn;
            let gap = i.abs_diff(j);
            let better = match best {
                None => true,
                Some((bk, bc, bg, _, _)) => key < bk || (key == bk && (correct > bc || (correct == bc && gap < bg))),
            };
            if better {
                best = Some((key, correct, gap, i, j));
            }
        }
    }
    let (_, _, _, i, j) = best.expect("grid is nonempty");
    let gc = GroupConfusion { privileged: privileged[i], unprivileged: unprivileged[j] };
    Ok(ThresholdPolicy {
        threshold_privileged: grid_value(i),
        threshold_unprivileged: grid_value(j),
        objective_achieved: eod_from_confusion(&gc).value(),
        warnings: Vec::new(),
    })
}

/// Integer that orders grid candidates exactly as their EOD does.
///
/// With label counts fixed per group, `2 * EOD = n1 / d1 + n2 / d2` where
/// `d1 = P_u * P_p` and `d2 = N_u * N_p` do not depend on the thresholds, so
/// `n1 * d2 + n2 * d1` is EOD times a constant. Comparing it avoids
/// rounding making mathematically equal EODs unequal.
fn eod_key(cp: &Confusion, cu: &Confusion) -> u128 {
    let (pos_p, pos_u) = ((cp.tp + cp.fn_) as u128, (cu.tp + cu.fn_) as u128);
    let (neg_p, neg_u) = ((cp.fp + cp.tn) as u128, (cu.fp + cu.tn) as u128);
    let n1 = (cu.tp as u128 * pos_p).abs_diff(cp.tp as u128 * pos_u);
    let n2 = (cu.fp as u128 * neg_p).abs_diff(cp.fp as u128 * neg_u);
    n1 * (neg_u * neg_p) + n2 * (pos_u * pos_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::equalized_odds_difference;

    fn policy(tp: f64, tu: f64) -> ThresholdPolicy {
        ThresholdPolicy { threshold_privileged: tp, threshold_unprivileged: tu, objective_achieved: None, warnings: vec![] }
    }

    #[test]
    fn half_thresholds_are_a_plain_cut() {
        let scores = [0.2, 0.5, 0.7, 0.49];
        assert_eq!(apply_threshold_policy(&policy(0.5, 0.5), &scores, &[0, 1, 0, 1]), vec![0, 1, 1, 0]);
    }

    #[test]
    fn score_at_threshold_is_positive() {
        assert_eq!(apply_threshold_policy(&policy(0.3, 0.7), &[0.3, 0.7], &[1, 0]), vec![1, 1]);
    }

    #[test]
    fn separable_scores_reach_zero_eod_and_full_accuracy() {
        let scores = [0.1, 0.2, 0.8, 0.9, 0.1, 0.2, 0.8, 0.9];
        let y = [0, 0, 1, 1, 0, 0, 1, 1];
        let g = [1, 1, 1, 1, 0, 0, 0, 0];
        let p = fit_threshold_policy(&scores, &y, &g).unwrap();
        assert_eq!(p.objective_achieved, Some(0.0));
        let pred = apply_threshold_policy(&p, &scores, &g);
        assert_eq!(pred, y);
        // Equal accuracy everywhere in (0.2, 0.8]; the gap and lexicographic
        // tie-breaks pick the smallest equal pair.
        assert_eq!((p.threshold_privileged, p.threshold_unprivileged), (0.21, 0.21));
    }

    #[test]
    fn constant_scores_choose_all_or_nothing() {
        let scores = [0.7; 6];
        let y = [1, 0, 1, 1, 0, 0];
        let g = [1, 1, 1, 0, 0, 0];
        let p = fit_threshold_policy(&scores, &y, &g).unwrap();
        // Every cell is all-positive (t <= 0.7) or all-negative per group.
        // EOD 0 needs both groups on the same side; all-positive and
        // all-negative each get 3/6 right, so the gap tie-break prefers
        // equal thresholds and the lexicographic rule picks (0, 0).
        assert_eq!(p.objective_achieved, Some(0.0));
        assert_eq!((p.threshold_privileged, p.threshold_unprivileged), (0.0, 0.0));
    }

    #[test]
    fn fitted_eod_never_worse_than_half_cut() {
        let scores = [0.1, 0.4, 0.55, 0.6, 0.9, 0.3, 0.45, 0.52, 0.7, 0.95];
        let y = [0, 0, 1, 1, 1, 0, 1, 0, 1, 1];
        let g = [1, 1, 1, 1, 1, 0, 0, 0, 0, 0];
        let p = fit_threshold_policy(&scores, &y, &g).unwrap();
        let plain = apply_threshold_policy(&policy(0.5, 0.5), &scores, &g);
        let plain_eod = equalized_odds_difference(&y, &plain, &g).unwrap().value().unwrap();
        assert!(p.objective_achieved.unwrap() <= plain_eod);
    }

    #[test]
    fn undefined_eod_falls_back() {
        // No positive labels at all.
        let p = fit_threshold_policy(&[0.2, 0.8, 0.4], &[0, 0, 0], &[1, 0, 0]).unwrap();
        assert_eq!((p.threshold_privileged, p.threshold_unprivileged), (0.5, 0.5));
        assert_eq!(p.objective_achieved, None);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn input_validation() {
        assert_eq!(fit_threshold_policy(&[0.5], &[1], &[1]).unwrap_err(), ThresholdError::MissingGroup("unprivileged"));
        assert_eq!(fit_threshold_policy(&[1.5, 0.1], &[1, 0], &[1, 0]).unwrap_err(), ThresholdError::ScoreOutOfRange(0));
        assert!(matches!(fit_threshold_policy(&[0.5], &[1, 0], &[1]), Err(ThresholdError::LengthMismatch(_))));
    }

    #[test]
    fn lowering_threshold_raises_positive_rate() {
        let scores: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37) % 1.0).collect();
        let group = vec![0u8; 50];
        let mut last = 0;
        for i in (0..=GRID_STEPS).rev() {
            let pos = apply_threshold_policy(&policy(0.5, grid_value(i)), &scores, &group).iter().filter(|&&c| c == 1).count();
            assert!(pos >= last);
            last = pos;
        }
    }
}
