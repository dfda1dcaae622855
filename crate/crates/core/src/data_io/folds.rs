use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::DataError;
use crate::rng::{self, tag};
use crate::Class;

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

fn check(n_rows: usize, k: usize) -> Result<(), DataError> {
    if k < 2 {
        return Err(DataError::Folds(format!("k = {k}, need at least 2")));
    }
    if k > n_rows {
        return Err(DataError::Folds(format!("k = {k} exceeds the number of rows ({n_rows})")));
    }
    Ok(())
}

/// Seeded shuffle followed by round-robin assignment.
pub fn make_folds(n_rows: usize, k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    check(n_rows, k)?;
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut rng::stream(seed, &[tag::FOLDS]));
    let mut assignments = vec![0; n_rows];
    for (pos, &row) in order.iter().enumerate() {
        assignments[row] = pos % k;
    }
    Ok(FoldPlan { k, seed, assignments })
}

/// Like [`make_folds`] but deals each class out separately, so class
/// proportions are near-equal across folds.
pub fn make_stratified_folds(labels: &[Class], k: usize, seed: u64) -> Result<FoldPlan, DataError> {
    check(labels.len(), k)?;
    let mut assignments = vec![0; labels.len()];
    let mut pos = 0;
    for class in 0..=1u8 {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng::stream(seed, &[tag::FOLDS, u64::from(class) + 1]));
        for row in rows {
            assignments[row] = pos % k;
            pos += 1;
        }
    }
    Ok(FoldPlan { k, seed, assignments })
}
