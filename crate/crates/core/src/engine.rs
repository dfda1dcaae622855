//! Fairness-adjusted probabilistic tree traversal.
//!
//! At every internal node the walk leaves the deterministic branch with a
//! flip probability that decays linearly with the distance between the
//! sample's feature value and the node threshold:
//!
//! ```text
//! p = clamp(p_max - |x[f] - t| / scale, 0, p_max)
//! ```
//!
//! When the node splits on the protected feature, the sample is
//! unprivileged and its deterministic child has an unfavorable training
//! majority, the probability is boosted to `min(alpha * p, 0.5)`.
//!
//! Class probabilities are estimated from `S` independent walks
//! ([`simulate`], [`predict_fair`]) or computed exactly by enumerating every
//! root-to-leaf path ([`exact_path_distribution`]).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{self, tag};
use crate::tree::{vote, DecisionTree, Forest, Node};
use crate::Class;

/// Paths deeper than this are not enumerated by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

/// Cap on the boosted flip probability.
pub const MAX_ADJUSTED_FLIP: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("invalid FairTTTS config: {0}")]
    InvalidConfig(String),
    #[error("invalid fairness spec: {0}")]
    InvalidSpec(String),
    #[error("sample has {got} features, model expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("enumeration limit exceeded: tree depth {depth} > limit {limit}")]
    EnumerationLimitExceeded { depth: usize, limit: usize },
}

/// Which feature is protected and which values/classes count as
/// privileged/favorable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairnessSpec {
    pub protected_feature: usize,
    pub privileged_value: f64,
    pub unprivileged_value: f64,
    pub favorable_class: Class,
    pub unfavorable_class: Class,
}

impl FairnessSpec {
    /// Binarised protected feature (privileged = 1, unprivileged = 0) with
    /// favorable class 1.
    pub fn new(protected_feature: usize) -> Self {
        Self {
            protected_feature,
            privileged_value: 1.0,
            unprivileged_value: 0.0,
            favorable_class: 1,
            unfavorable_class: 0,
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<(), EngineError> {
        if self.protected_feature >= n_features {
            return Err(EngineError::InvalidSpec(format!(
                "protected feature {} is out of range for {n_features} features",
                self.protected_feature
            )));
        }
        if self.favorable_class == self.unfavorable_class || self.favorable_class > 1 || self.unfavorable_class > 1 {
            return Err(EngineError::InvalidSpec("favorable and unfavorable classes must be 0 and 1 in some order".into()));
        }
        if self.privileged_value == self.unprivileged_value {
            return Err(EngineError::InvalidSpec("privileged and unprivileged values coincide".into()));
        }
        Ok(())
    }

    pub fn is_unprivileged(&self, sample: &[f64]) -> bool {
        sample[self.protected_feature] == self.unprivileged_value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairTTTSConfig {
    /// Number of Monte Carlo walks `S`.
    pub n_simulations: usize,
    pub p_max: f64,
    /// Fairness adjustment factor.
    pub alpha: f64,
    pub rng_seed: u64,
}

impl Default for FairTTTSConfig {
    fn default() -> Self {
        Self { n_simulations: 100, p_max: 0.1, alpha: 9.0, rng_seed: 0 }
    }
}

impl FairTTTSConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n_simulations == 0 {
            return Err(EngineError::InvalidConfig("n_simulations must be at least 1".into()));
        }
        if !(0.0..=MAX_ADJUSTED_FLIP).contains(&self.p_max) {
            return Err(EngineError::InvalidConfig(format!("p_max = {} is outside [0, 0.5]", self.p_max)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(EngineError::InvalidConfig(format!("alpha = {} must be finite and >= 0", self.alpha)));
        }
        Ok(())
    }
}

/// How per-tree walks are combined in a forest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Each simulation walks every tree once and takes the majority vote
    /// (ties to class 0); the distribution is over the `S` votes.
    #[default]
    Vote,
    /// Mean of the per-tree simulated distributions.
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionDistribution {
    pub probs: [f64; 2],
    /// 0 when the distribution was computed exactly.
    pub n_simulations_used: usize,
}

impl PredictionDistribution {
    /// Empirical distribution of `positives` out of `total` outcomes.
    pub fn from_counts(positives: usize, total: usize) -> Self {
        let p1 = positives as f64 / total as f64;
        let p0 = (total - positives) as f64 / total as f64;
        Self { probs: [p0, p1], n_simulations_used: total }
    }

    pub fn one_hot(class: Class) -> Self {
        let mut probs = [0.0, 0.0];
        probs[class as usize] = 1.0;
        Self { probs, n_simulations_used: 0 }
    }

    /// Most probable class; ties go to class 0.
    pub fn argmax(&self) -> Class {
        Class::from(self.probs[1] > self.probs[0])
    }
}

/// Child the standard traversal takes at `node`. Panics on a leaf.
#[inline]
fn deterministic_child(node: &Node, sample: &[f64]) -> (usize, usize, Class) {
    match *node {
        Node::Internal { feature_index, threshold, left, right, left_majority, right_majority, .. } => {
            if sample[feature_index] <= threshold {
                (left, right, left_majority)
            } else {
                (right, left, right_majority)
            }
        }
        Node::Leaf { .. } => panic!("deterministic_child called on a leaf"),
    }
}

/// Distance-based flip probability at an internal node; 0 at a leaf.
pub fn flip_probability(node: &Node, sample: &[f64], config: &FairTTTSConfig) -> f64 {
    match *node {
        Node::Internal { feature_index, threshold, scale, .. } => {
            let distance = (sample[feature_index] - threshold).abs();
            // A zero scale (possible in hand-written documents) saturates at
            // the threshold and vanishes elsewhere instead of producing NaN.
            let relative = if distance == 0.0 { 0.0 } else { distance / scale };
            (config.p_max - relative).clamp(0.0, config.p_max)
        }
        Node::Leaf { .. } => 0.0,
    }
}

/// Whether the fairness boost applies at `node` for `sample`.
pub fn adjustment_triggered(node: &Node, sample: &[f64], spec: &FairnessSpec) -> bool {
    match node {
        Node::Internal { feature_index, .. } => {
            *feature_index == spec.protected_feature
                && spec.is_unprivileged(sample)
                && deterministic_child(node, sample).2 == spec.unfavorable_class
        }
        Node::Leaf { .. } => false,
    }
}

/// `base` boosted by `alpha` (capped at 0.5) when the adjustment triggers,
/// otherwise `base` unchanged.
pub fn adjusted_flip_probability(
    base: f64,
    node: &Node,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
) -> f64 {
    if adjustment_triggered(node, sample, spec) {
        (config.alpha * base).min(MAX_ADJUSTED_FLIP)
    } else {
        base
    }
}

/// Final flip probability used by the walkers.
#[inline]
pub fn node_flip_probability(node: &Node, sample: &[f64], spec: &FairnessSpec, config: &FairTTTSConfig) -> f64 {
    let base = flip_probability(node, sample, config);
    adjusted_flip_probability(base, node, sample, spec, config)
}

/// One probabilistic walk from the root. Inputs are assumed validated.
pub fn traverse_once<R: Rng + ?Sized>(
    tree: &DecisionTree,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    rng: &mut R,
) -> Class {
    let mut id = 0;
    loop {
        let node = tree.node(id);
        if let Node::Leaf { predicted_class, .. } = *node {
            return predicted_class;
        }
        let (stay, flip, _) = deterministic_child(node, sample);
        let p = node_flip_probability(node, sample, spec, config);
        // No draw is needed when flipping is impossible.
        id = if p > 0.0 && rng.random::<f64>() < p { flip } else { stay };
    }
}

fn check_inputs(
    n_features: usize,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
) -> Result<(), EngineError> {
    config.validate()?;
    spec.validate(n_features)?;
    if sample.len() != n_features {
        return Err(EngineError::DimensionMismatch { got: sample.len(), expected: n_features });
    }
    Ok(())
}

/// Random stream for simulation `sim` of tree `tree_index`, for the sample
/// identified by `stream_id`.
pub fn walk_stream(config: &FairTTTSConfig, stream_id: u64, sim: usize, tree_index: usize) -> rng::StreamRng {
    rng::stream(config.rng_seed, &[tag::FAIRTTTS, stream_id, sim as u64, tree_index as u64])
}

/// Monte Carlo estimate of the class distribution of one tree. `stream_id`
/// selects an independent random stream (typically the row index).
pub fn simulate(
    tree: &DecisionTree,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    stream_id: u64,
) -> Result<PredictionDistribution, EngineError> {
    check_inputs(tree.n_features(), sample, spec, config)?;
    Ok(simulate_tree(tree, 0, sample, spec, config, stream_id))
}

fn simulate_tree(
    tree: &DecisionTree,
    tree_index: usize,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    stream_id: u64,
) -> PredictionDistribution {
    let s = config.n_simulations;
    let positives = (0..s)
        .filter(|&sim| {
            let mut r = walk_stream(config, stream_id, sim, tree_index);
            traverse_once(tree, sample, spec, config, &mut r) == 1
        })
        .count();
    PredictionDistribution::from_counts(positives, s)
}

/// Fairness-adjusted forest prediction: the argmax class (ties to 0) and the
/// distribution it was taken from.
pub fn predict_fair(
    forest: &Forest,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    stream_id: u64,
    aggregation: Aggregation,
) -> Result<(Class, PredictionDistribution), EngineError> {
    check_inputs(forest.n_features(), sample, spec, config)?;
    let dist = predict_fair_unchecked(forest, sample, spec, config, stream_id, aggregation);
    Ok((dist.argmax(), dist))
}

fn predict_fair_unchecked(
    forest: &Forest,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    stream_id: u64,
    aggregation: Aggregation,
) -> PredictionDistribution {
    let s = config.n_simulations;
    let n_trees = forest.n_trees();
    match aggregation {
        Aggregation::Vote => {
            let positives = (0..s)
                .filter(|&sim| {
                    let votes = forest
                        .trees()
                        .iter()
                        .enumerate()
                        .filter(|(t, tree)| {
                            let mut r = walk_stream(config, stream_id, sim, *t);
                            traverse_once(tree, sample, spec, config, &mut r) == 1
                        })
                        .count();
                    vote(votes, n_trees) == 1
                })
                .count();
            PredictionDistribution::from_counts(positives, s)
        }
        Aggregation::Average => {
            let p1 = forest
                .trees()
                .iter()
                .enumerate()
                .map(|(t, tree)| simulate_tree(tree, t, sample, spec, config, stream_id).probs[1])
                .sum::<f64>()
                / n_trees as f64;
            PredictionDistribution { probs: [1.0 - p1, p1], n_simulations_used: s }
        }
    }
}

/// [`predict_fair`] over many rows in parallel. Row `i` uses stream id
/// `stream_ids[i]`, so results do not depend on scheduling.
pub fn predict_fair_batch(
    forest: &Forest,
    rows: &[&[f64]],
    stream_ids: &[u64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    aggregation: Aggregation,
) -> Result<Vec<PredictionDistribution>, EngineError> {
    assert_eq!(rows.len(), stream_ids.len(), "one stream id per row");
    config.validate()?;
    spec.validate(forest.n_features())?;
    if let Some(r) = rows.iter().find(|r| r.len() != forest.n_features()) {
        return Err(EngineError::DimensionMismatch { got: r.len(), expected: forest.n_features() });
    }
    Ok(rows
        .par_iter()
        .zip(stream_ids.par_iter())
        .map(|(row, &id)| predict_fair_unchecked(forest, row, spec, config, id, aggregation))
        .collect())
}

/// Exact class distribution of the probabilistic walk, by enumerating all
/// root-to-leaf paths. Fails for trees deeper than
/// [`DEFAULT_ENUMERATION_LIMIT`].
pub fn exact_path_distribution(
    tree: &DecisionTree,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
) -> Result<PredictionDistribution, EngineError> {
    exact_path_distribution_with_limit(tree, sample, spec, config, DEFAULT_ENUMERATION_LIMIT)
}

pub fn exact_path_distribution_with_limit(
    tree: &DecisionTree,
    sample: &[f64],
    spec: &FairnessSpec,
    config: &FairTTTSConfig,
    limit: usize,
) -> Result<PredictionDistribution, EngineError> {
    check_inputs(tree.n_features(), sample, spec, config)?;
    let depth = tree.depth();
    if depth > limit {
        return Err(EngineError::EnumerationLimitExceeded { depth, limit });
    }
    let mut probs = [0.0f64; 2];
    let mut stack = vec![(0usize, 1.0f64)];
    while let Some((id, mass)) = stack.pop() {
        let node = tree.node(id);
        match *node {
            Node::Leaf { predicted_class, .. } => probs[predicted_class as usize] += mass,
            Node::Internal { .. } => {
                let (stay, flip, _) = deterministic_child(node, sample);
                let p = node_flip_probability(node, sample, spec, config);
                // Zero-mass branches still count as paths; pushing them keeps
                // the enumeration structural.
                stack.push((flip, mass * p));
                stack.push((stay, mass * (1.0 - p)));
            }
        }
    }
    Ok(PredictionDistribution { probs, n_simulations_used: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fixtures::{constant, stump};

    fn cfg(p_max: f64, alpha: f64) -> FairTTTSConfig {
        FairTTTSConfig { n_simulations: 100, p_max, alpha, rng_seed: 1 }
    }

    /// Stump on feature 0, threshold 5, scale 4: left class 0, right class 1.
    fn stump_node() -> Node {
        stump(2).root().clone()
    }

    #[test]
    fn zero_distance_gives_p_max() {
        assert_eq!(flip_probability(&stump_node(), &[5.0, 0.0], &cfg(0.1, 9.0)), 0.1);
    }

    #[test]
    fn max_distance_gives_zero() {
        // |9 - 5| = 4 = scale
        assert_eq!(flip_probability(&stump_node(), &[9.0, 0.0], &cfg(0.1, 9.0)), 0.0);
        assert_eq!(flip_probability(&stump_node(), &[1000.0, 0.0], &cfg(0.1, 9.0)), 0.0);
    }

    #[test]
    fn linear_decay_between() {
        // distance 0.05 * scale = 0.2 -> 0.1 - 0.05
        let p = flip_probability(&stump_node(), &[5.2, 0.0], &cfg(0.1, 9.0));
        assert!((p - 0.05).abs() < 1e-15, "{p}");
    }

    #[test]
    fn zero_scale_is_a_step() {
        let node = match stump_node() {
            Node::Internal { feature_index, threshold, left, right, left_majority, right_majority, .. } => {
                Node::Internal { feature_index, threshold, left, right, scale: 0.0, left_majority, right_majority }
            }
            leaf => leaf,
        };
        assert_eq!(flip_probability(&node, &[5.0, 0.0], &cfg(0.1, 9.0)), 0.1);
        assert_eq!(flip_probability(&node, &[5.5, 0.0], &cfg(0.1, 9.0)), 0.0);
    }

    #[test]
    fn boost_is_capped_at_half() {
        let spec = FairnessSpec::new(0);
        // Unprivileged value 0 on the protected feature 0 goes left (majority 0).
        let sample = [0.0, 0.0];
        assert!(adjustment_triggered(&stump_node(), &sample, &spec));
        assert_eq!(adjusted_flip_probability(0.1, &stump_node(), &sample, &spec, &cfg(0.1, 9.0)), 0.5);
        assert!((adjusted_flip_probability(0.01, &stump_node(), &sample, &spec, &cfg(0.1, 9.0)) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn privileged_sample_is_not_boosted() {
        let spec = FairnessSpec { privileged_value: 7.0, unprivileged_value: 6.0, ..FairnessSpec::new(0) };
        let sample = [7.0, 0.0];
        assert_eq!(adjusted_flip_probability(0.1, &stump_node(), &sample, &spec, &cfg(0.1, 9.0)), 0.1);
    }

    #[test]
    fn favorable_branch_is_not_boosted() {
        // Unprivileged value 6 > threshold goes right, whose majority is favorable.
        let spec = FairnessSpec { privileged_value: 7.0, unprivileged_value: 6.0, ..FairnessSpec::new(0) };
        let sample = [6.0, 0.0];
        assert!(!adjustment_triggered(&stump_node(), &sample, &spec));
        assert_eq!(adjusted_flip_probability(0.1, &stump_node(), &sample, &spec, &cfg(0.1, 9.0)), 0.1);
    }

    #[test]
    fn non_protected_node_is_not_boosted() {
        let spec = FairnessSpec::new(1);
        assert_eq!(adjusted_flip_probability(0.1, &stump_node(), &[0.0, 0.0], &spec, &cfg(0.1, 9.0)), 0.1);
    }

    #[test]
    fn alpha_zero_blocks_triggered_flips() {
        let spec = FairnessSpec::new(0);
        assert_eq!(adjusted_flip_probability(0.1, &stump_node(), &[0.0, 0.0], &spec, &cfg(0.1, 0.0)), 0.0);
    }

    #[test]
    fn leaf_only_tree_ignores_config() {
        let tree = constant(1, 2);
        let spec = FairnessSpec::new(0);
        let mut r = walk_stream(&cfg(0.5, 9.0), 0, 0, 0);
        assert_eq!(traverse_once(&tree, &[0.0, 0.0], &spec, &cfg(0.5, 9.0), &mut r), 1);
        let exact = exact_path_distribution(&tree, &[0.0, 0.0], &spec, &cfg(0.5, 9.0)).unwrap();
        assert_eq!(exact.probs, [0.0, 1.0]);
    }

    #[test]
    fn stump_exact_distribution() {
        let spec = FairnessSpec::new(1);
        let exact = exact_path_distribution(&stump(2), &[5.0, 1.0], &spec, &cfg(0.1, 9.0)).unwrap();
        assert_eq!(exact.probs, [0.9, 0.1]);
        assert_eq!(exact.n_simulations_used, 0);
    }

    #[test]
    fn simulate_counts_outcomes() {
        let d = PredictionDistribution::from_counts(3, 4);
        assert_eq!(d.probs, [0.25, 0.75]);
        assert_eq!(d.n_simulations_used, 4);
    }

    #[test]
    fn from_counts_sums_to_one_exactly() {
        for s in 1..=2000usize {
            for c in 0..=s {
                let d = PredictionDistribution::from_counts(c, s);
                assert_eq!(d.probs[0] + d.probs[1], 1.0, "c = {c}, s = {s}");
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(0.6, 1.0).validate().is_err());
        assert!(cfg(-0.1, 1.0).validate().is_err());
        assert!(cfg(0.1, -1.0).validate().is_err());
        assert!(FairTTTSConfig { n_simulations: 0, ..cfg(0.1, 1.0) }.validate().is_err());
        assert!(cfg(0.5, 0.0).validate().is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(FairnessSpec::new(2).validate(2).is_err());
        let same = FairnessSpec { favorable_class: 0, ..FairnessSpec::new(0) };
        assert!(same.validate(2).is_err());
    }

    #[test]
    fn enumeration_limit() {
        let err = exact_path_distribution_with_limit(&stump(2), &[1.0, 1.0], &FairnessSpec::new(1), &cfg(0.1, 1.0), 0)
            .unwrap_err();
        assert_eq!(err, EngineError::EnumerationLimitExceeded { depth: 1, limit: 0 });
    }

    #[test]
    fn dimension_checked() {
        let err = simulate(&stump(2), &[1.0], &FairnessSpec::new(1), &cfg(0.1, 1.0), 0).unwrap_err();
        assert_eq!(err, EngineError::DimensionMismatch { got: 1, expected: 2 });
    }
}
