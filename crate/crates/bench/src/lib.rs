//! Shared inputs for the criterion benchmarks.

use fairtree::Dataset;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// `n` rows of `d` features. Feature 0 is a 0/1 protected attribute; the
/// label depends on the first two other features plus noise, with a shift
/// against the unprivileged group.
pub fn dataset(n: usize, d: usize, seed: u64) -> Dataset {
    assert!(d >= 3, "need the protected feature and two signal features");
    let mut r = StdRng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
        row[0] = f64::from(u8::from(r.random_bool(0.6)));
        let score = row[1] + 0.5 * row[2] + 0.3 * row[0] + r.random_range(-0.5..0.5);
        labels.push(u8::from(score > 0.2));
        rows.push(row);
    }
    Dataset::from_rows(rows, labels).expect("well-formed rows")
}

#[cfg(test)]
mod tests {
    #[test]
    fn dataset_has_both_groups_and_classes() {
        let d = super::dataset(500, 5, 1);
        assert_eq!((d.n_rows(), d.n_features()), (500, 5));
        assert!(d.column(0).contains(&0.0) && d.column(0).contains(&1.0));
        assert!(d.labels().contains(&0) && d.labels().contains(&1));
    }
}
