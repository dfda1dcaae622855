//! Greedy CART induction with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{majority, BaggingMeta, DecisionTree, Forest, Node, TrainingMeta, TreeError};
use crate::rng::{self, tag, StreamRng};
use crate::{Class, Dataset};

/// How the per-node distance normaliser is computed at training time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// Largest `|x - threshold|` over the training samples reaching the node.
    NodeMax,
    /// Largest `NodeMax` value over all internal nodes of the tree, shared by
    /// every node. With a per-node scale a split on a 0/1 feature sits at
    /// distance exactly `scale` from every sample, so its flip probability is
    /// always 0; the shared scale keeps such nodes stochastic.
    #[default]
    TreeMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or cannot be split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` examines all of them in index
    /// order.
    pub features_per_split: Option<usize>,
    pub rng_seed: u64,
    #[serde(default)]
    pub scale_mode: ScaleMode,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: None,
            rng_seed: 0,
            scale_mode: ScaleMode::TreeMax,
        }
    }
}

impl TreeParams {
    fn validate(&self) -> Result<(), TreeError> {
        if self.max_depth == Some(0) {
            return Err(TreeError::InvalidParams("max_depth must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(TreeError::InvalidParams("min_samples_leaf must be at least 1".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(TreeError::InvalidParams("features_per_split must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    /// Shared by every tree. Tree `i` is grown with seed `tree.rng_seed + i`.
    pub tree: TreeParams,
}

impl ForestParams {
    /// Random-forest defaults: 100 bootstrapped trees, unlimited depth,
    /// `floor(sqrt(d))` features per split.
    pub fn default_for(n_features: usize) -> Self {
        Self {
            n_trees: 100,
            bootstrap: true,
            tree: TreeParams {
                features_per_split: Some(sqrt_features(n_features)),
                ..TreeParams::default()
            },
        }
    }
}

pub fn sqrt_features(n_features: usize) -> usize {
    ((n_features as f64).sqrt().floor() as usize).max(1)
}

/// Train a single tree on every row of `data`.
pub fn train_tree(data: &Dataset, params: &TreeParams) -> Result<DecisionTree, TreeError> {
    let indices: Vec<usize> = (0..data.n_rows()).collect();
    train_on_indices(data, indices, params)
}

/// Train `n_trees` trees, each on a bootstrap resample when enabled.
pub fn train_forest(data: &Dataset, params: &ForestParams) -> Result<Forest, TreeError> {
    if params.n_trees == 0 {
        return Err(TreeError::InvalidParams("n_trees must be at least 1".into()));
    }
    params.tree.validate()?;
    if data.is_empty() {
        return Err(TreeError::EmptyTrainingSet);
    }
    let n = data.n_rows();
    let base_seed = params.tree.rng_seed;
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|i| {
            let indices: Vec<usize> = if params.bootstrap {
                let mut r = rng::stream(base_seed, &[tag::BOOTSTRAP, i as u64]);
                (0..n).map(|_| r.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let tree_params = TreeParams { rng_seed: base_seed.wrapping_add(i as u64), ..params.tree };
            train_on_indices(data, indices, &tree_params)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Forest::from_parts(
        trees,
        BaggingMeta {
            bootstrap: params.bootstrap,
            features_per_split: params.tree.features_per_split,
            rng_seed: base_seed,
        },
    ))
}

/// Candidate split. `score` is `num / den` where
/// `num / den = S_l / n_l + S_r / n_r` and `S = c0^2 + c1^2`; maximising it
/// minimises the weighted Gini impurity.
#[derive(Debug, Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
    num: u128,
    den: u128,
}

impl Split {
    fn beats(&self, other: &Split) -> bool {
        self.num * other.den > other.num * self.den
    }
}

struct Builder<'a> {
    columns: Vec<Vec<f64>>,
    labels: &'a [Class],
    params: &'a TreeParams,
    rng: StreamRng,
    nodes: Vec<Node>,
    scratch: Vec<(f64, Class)>,
    feature_order: Vec<usize>,
}

struct Task {
    id: usize,
    start: usize,
    end: usize,
    depth: usize,
}

fn train_on_indices(data: &Dataset, mut indices: Vec<usize>, params: &TreeParams) -> Result<DecisionTree, TreeError> {
    params.validate()?;
    if indices.is_empty() {
        return Err(TreeError::EmptyTrainingSet);
    }
    let d = data.n_features();
    for &i in &indices {
        if let Some(j) = data.row(i).iter().position(|v| !v.is_finite()) {
            return Err(TreeError::NonFinite { row: i, feature: j });
        }
    }
    let mut b = Builder {
        columns: (0..d).map(|j| data.column(j)).collect(),
        labels: data.labels(),
        params,
        rng: rng::stream(params.rng_seed, &[tag::FOREST]),
        nodes: vec![placeholder()],
        scratch: Vec::with_capacity(indices.len()),
        feature_order: (0..d).collect(),
    };
    let mut stack = vec![Task { id: 0, start: 0, end: indices.len(), depth: 0 }];
    while let Some(task) = stack.pop() {
        let seg = &mut indices[task.start..task.end];
        let counts = b.class_counts(seg);
        let depth_ok = params.max_depth.is_none_or(|m| task.depth < m);
        let splittable =
            counts[0] > 0 && counts[1] > 0 && depth_ok && seg.len() >= 2 * params.min_samples_leaf;
        let split = if splittable { b.best_split(seg) } else { None };
        let Some(split) = split else {
            b.nodes[task.id] = Node::Leaf { class_counts: counts, predicted_class: majority(counts) };
            continue;
        };
        let column = &b.columns[split.feature];
        let scale = seg.iter().map(|&i| (column[i] - split.threshold).abs()).fold(0.0, f64::max);
        let n_left = partition_in_place(seg, |i| column[i] <= split.threshold);
        let left_counts = b.class_counts(&seg[..n_left]);
        let right_counts = [counts[0] - left_counts[0], counts[1] - left_counts[1]];
        let left = b.nodes.len();
        let right = left + 1;
        b.nodes.push(placeholder());
        b.nodes.push(placeholder());
        b.nodes[task.id] = Node::Internal {
            feature_index: split.feature,
            threshold: split.threshold,
            left,
            right,
            scale,
            left_majority: majority(left_counts),
            right_majority: majority(right_counts),
        };
        let mid = task.start + n_left;
        // Right pushed first so the left subtree is built first.
        stack.push(Task { id: right, start: mid, end: task.end, depth: task.depth + 1 });
        stack.push(Task { id: left, start: task.start, end: mid, depth: task.depth + 1 });
    }
    let mut nodes = b.nodes;
    finalize_scales(&mut nodes, params.scale_mode);
    Ok(DecisionTree::from_parts(
        nodes,
        d,
        TrainingMeta {
            max_depth: params.max_depth,
            min_samples_leaf: params.min_samples_leaf,
            rng_seed: params.rng_seed,
        },
    ))
}

fn placeholder() -> Node {
    Node::Leaf { class_counts: [0, 0], predicted_class: 0 }
}

/// Replace zero scales by 1 and apply the tree-wide mode if requested.
fn finalize_scales(nodes: &mut [Node], mode: ScaleMode) {
    let tree_max = nodes
        .iter()
        .filter_map(|n| match n {
            Node::Internal { scale, .. } => Some(*scale),
            Node::Leaf { .. } => None,
        })
        .fold(0.0, f64::max);
    for node in nodes.iter_mut() {
        if let Node::Internal { scale, .. } = node {
            if mode == ScaleMode::TreeMax {
                *scale = tree_max;
            }
            if *scale == 0.0 {
                *scale = 1.0;
            }
        }
    }
}

/// Stable-enough partition: moves every element satisfying `pred` to the
/// front and returns how many there are.
fn partition_in_place(seg: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let mut k = 0;
    for j in 0..seg.len() {
        if pred(seg[j]) {
            seg.swap(k, j);
            k += 1;
        }
    }
    k
}

impl Builder<'_> {
    fn class_counts(&self, seg: &[usize]) -> [u64; 2] {
        let ones = seg.iter().filter(|&&i| self.labels[i] == 1).count() as u64;
        [seg.len() as u64 - ones, ones]
    }

    fn best_split(&mut self, seg: &[usize]) -> Option<Split> {
        let d = self.columns.len();
        let k = self.params.features_per_split.map_or(d, |k| k.min(d));
        if k < d {
            self.feature_order.shuffle(&mut self.rng);
        } else {
            self.feature_order.sort_unstable();
        }
        let mut best: Option<Split> = None;
        let mut visited = 0;
        for idx in 0..d {
            if visited == k {
                break;
            }
            let feature = self.feature_order[idx];
            let (found, constant) = self.best_split_on(seg, feature);
            if !constant {
                visited += 1;
            }
            if let Some(s) = found {
                if best.as_ref().is_none_or(|b| s.beats(b)) {
                    best = Some(s);
                }
            }
        }
        best
    }

    /// Best split on one feature and whether the feature is constant on `seg`.
    fn best_split_on(&mut self, seg: &[usize], feature: usize) -> (Option<Split>, bool) {
        let column = &self.columns[feature];
        self.scratch.clear();
        self.scratch.extend(seg.iter().map(|&i| (column[i], self.labels[i])));
        self.scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let pairs = &self.scratch;
        let n = pairs.len();
        if pairs[0].0 == pairs[n - 1].0 {
            return (None, true);
        }
        let total1 = pairs.iter().filter(|p| p.1 == 1).count() as u128;
        let total0 = n as u128 - total1;
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<Split> = None;
        let mut left1 = 0u128;
        for i in 1..n {
            left1 += u128::from(pairs[i - 1].1);
            if pairs[i - 1].0 == pairs[i].0 || i < min_leaf || n - i < min_leaf {
                continue;
            }
            let nl = i as u128;
            let nr = (n - i) as u128;
            let left0 = nl - left1;
            let right1 = total1 - left1;
            let right0 = total0 - left0;
            let sl = left0 * left0 + left1 * left1;
            let sr = right0 * right0 + right1 * right1;
            let cand = Split {
                feature,
                threshold: midpoint(pairs[i - 1].0, pairs[i].0),
                num: sl * nr + sr * nl,
                den: nl * nr,
            };
            if best.as_ref().is_none_or(|b| cand.beats(b)) {
                best = Some(cand);
            }
        }
        (best, false)
    }
}

/// Midpoint of `lo < hi`, guaranteed to satisfy `lo <= m < hi`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) * 0.5;
    if m >= lo && m < hi {
        m
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_feature(values: &[f64], labels: &[Class]) -> Dataset {
        Dataset::from_rows(values.iter().map(|&v| vec![v]).collect(), labels.to_vec()).unwrap()
    }

    #[test]
    fn root_split_at_midpoint() {
        let data = one_feature(&[1.0, 2.0, 8.0, 9.0], &[0, 0, 1, 1]);
        let params = TreeParams { max_depth: Some(1), ..TreeParams::default() };
        let tree = train_tree(&data, &params).unwrap();
        match *tree.root() {
            Node::Internal { feature_index, threshold, left, right, scale, left_majority, right_majority } => {
                assert_eq!(feature_index, 0);
                assert_eq!(threshold, 5.0);
                assert_eq!(scale, 4.0);
                assert_eq!((left_majority, right_majority), (0, 1));
                assert!(matches!(tree.node(left), Node::Leaf { predicted_class: 0, class_counts: [2, 0] }));
                assert!(matches!(tree.node(right), Node::Leaf { predicted_class: 1, class_counts: [0, 2] }));
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn pure_labels_give_single_leaf() {
        let data = one_feature(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let tree = train_tree(&data, &TreeParams::default()).unwrap();
        assert_eq!(tree.nodes().len(), 1);
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.predict(&[100.0]).unwrap(), 1);
    }

    #[test]
    fn xor_needs_two_levels() {
        let rows = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let labels = vec![0, 1, 1, 0];
        let data = Dataset::from_rows(rows.clone(), labels.clone()).unwrap();
        let tree = train_tree(&data, &TreeParams { max_depth: Some(2), ..TreeParams::default() }).unwrap();
        for (r, y) in rows.iter().zip(&labels) {
            assert_eq!(tree.predict(r).unwrap(), *y);
        }
        assert_eq!(tree.depth(), 2);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let data = Dataset::from_rows(vec![], vec![]).unwrap();
        assert_eq!(train_tree(&data, &TreeParams::default()).unwrap_err(), TreeError::EmptyTrainingSet);
    }

    #[test]
    fn bad_params_rejected() {
        let data = one_feature(&[1.0, 2.0], &[0, 1]);
        let p = TreeParams { max_depth: Some(0), ..TreeParams::default() };
        assert!(matches!(train_tree(&data, &p), Err(TreeError::InvalidParams(_))));
        let p = TreeParams { min_samples_leaf: 0, ..TreeParams::default() };
        assert!(matches!(train_tree(&data, &p), Err(TreeError::InvalidParams(_))));
        let fp = ForestParams { n_trees: 0, bootstrap: true, tree: TreeParams::default() };
        assert!(matches!(train_forest(&data, &fp), Err(TreeError::InvalidParams(_))));
    }

    #[test]
    fn min_samples_leaf_is_respected() {
        let data = one_feature(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0, 1, 0, 1, 1, 1]);
        let tree = train_tree(&data, &TreeParams { min_samples_leaf: 3, ..TreeParams::default() }).unwrap();
        for n in tree.nodes() {
            if let Node::Leaf { class_counts, .. } = n {
                assert!(class_counts[0] + class_counts[1] >= 3);
            }
        }
    }

    #[test]
    fn zero_scale_becomes_one() {
        let mut nodes = vec![
            Node::Internal {
                feature_index: 0,
                threshold: 0.0,
                left: 1,
                right: 2,
                scale: 0.0,
                left_majority: 0,
                right_majority: 0,
            },
            placeholder(),
            placeholder(),
        ];
        finalize_scales(&mut nodes, ScaleMode::NodeMax);
        assert!(matches!(nodes[0], Node::Internal { scale, .. } if scale == 1.0));
    }

    #[test]
    fn tree_max_shares_the_largest_scale() {
        let data = Dataset::from_rows(
            vec![vec![0.0, 0.0], vec![0.0, 100.0], vec![1.0, 0.0], vec![1.0, 100.0], vec![1.0, 50.0]],
            vec![0, 0, 1, 0, 1],
        )
        .unwrap();
        let params = TreeParams { scale_mode: ScaleMode::TreeMax, ..TreeParams::default() };
        let tree = train_tree(&data, &params).unwrap();
        let scales: Vec<f64> = tree
            .nodes()
            .iter()
            .filter_map(|n| match n {
                Node::Internal { scale, .. } => Some(*scale),
                _ => None,
            })
            .collect();
        assert!(scales.len() >= 2);
        assert!(scales.iter().all(|&s| s == scales[0]));
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_below_upper() {
        let lo = 1.0f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(m >= lo && m < hi);
    }
}
