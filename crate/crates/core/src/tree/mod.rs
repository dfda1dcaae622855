//! CART decision trees and bagged forests.

mod io;
mod train;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Class;

pub use io::{deserialize, serialize, ModelDocError, MODEL_SCHEMA};
pub use train::{sqrt_features, train_forest, train_tree, ForestParams, ScaleMode, TreeParams};

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("sample has {got} features, model expects {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("training data contains a non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: usize },
}

/// Index of a node inside [`DecisionTree::nodes`].
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Internal {
        feature_index: usize,
        threshold: f64,
        left: NodeId,
        right: NodeId,
        /// Normaliser for the distance-to-threshold term, in feature units.
        scale: f64,
        /// Majority training class of the samples routed into each child.
        left_majority: Class,
        right_majority: Class,
    },
    Leaf {
        class_counts: [u64; 2],
        predicted_class: Class,
    },
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// Majority class of a two-class count vector; ties go to class 0.
pub fn majority(counts: [u64; 2]) -> Class {
    Class::from(counts[1] > counts[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    /// `None` means unlimited depth.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub rng_seed: u64,
}

/// An immutable trained tree. Node 0 is the root; children always have
/// larger ids than their parent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features: usize,
    training_meta: TrainingMeta,
}

impl DecisionTree {
    /// Build a tree from raw parts. Structural checks live in the document
    /// reader; this constructor trusts its input.
    pub(crate) fn from_parts(nodes: Vec<Node>, n_features: usize, training_meta: TrainingMeta) -> Self {
        Self { nodes, n_features, training_meta }
    }

    /// Build a tree from hand-made nodes, with the same checks as
    /// [`deserialize`]: children follow their parent, every node except the
    /// root has exactly one parent, leaf predictions match their counts,
    /// scales are nonnegative.
    pub fn new(nodes: Vec<Node>, n_features: usize, training_meta: TrainingMeta) -> Result<Self, ModelDocError> {
        io::validate_nodes(nodes, n_features, training_meta, "tree")
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn training_meta(&self) -> &TrainingMeta {
        &self.training_meta
    }

    /// Number of internal nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for (id, node) in self.nodes.iter().enumerate() {
            if let Node::Internal { left, right, .. } = *node {
                depth[left] = depth[id] + 1;
                depth[right] = depth[id] + 1;
                max = max.max(depth[id] + 1);
            }
        }
        max
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub(crate) fn check_dim(&self, sample: &[f64]) -> Result<(), TreeError> {
        if sample.len() != self.n_features {
            return Err(TreeError::DimensionMismatch { got: sample.len(), expected: self.n_features });
        }
        Ok(())
    }

    /// Id of the leaf reached by the standard traversal (`value <= threshold`
    /// goes left).
    pub fn leaf_id(&self, sample: &[f64]) -> NodeId {
        let mut id = 0;
        while let Node::Internal { feature_index, threshold, left, right, .. } = self.nodes[id] {
            id = if sample[feature_index] <= threshold { left } else { right };
        }
        id
    }

    /// Deterministic prediction. The sample length is not checked here; use
    /// [`Model::predict`] for a checked call.
    pub fn predict_unchecked(&self, sample: &[f64]) -> Class {
        match self.nodes[self.leaf_id(sample)] {
            Node::Leaf { predicted_class, .. } => predicted_class,
            Node::Internal { .. } => unreachable!("leaf_id always ends at a leaf"),
        }
    }

    pub fn predict(&self, sample: &[f64]) -> Result<Class, TreeError> {
        self.check_dim(sample)?;
        Ok(self.predict_unchecked(sample))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaggingMeta {
    pub bootstrap: bool,
    /// `None` means all features are considered at every split.
    pub features_per_split: Option<usize>,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<DecisionTree>,
    bagging_meta: BaggingMeta,
}

impl Forest {
    /// Panics if `trees` is empty or the trees disagree on `n_features`.
    pub(crate) fn from_parts(trees: Vec<DecisionTree>, bagging_meta: BaggingMeta) -> Self {
        assert!(!trees.is_empty(), "a forest needs at least one tree");
        let d = trees[0].n_features();
        assert!(trees.iter().all(|t| t.n_features() == d), "trees disagree on n_features");
        Self { trees, bagging_meta }
    }

    pub fn new(trees: Vec<DecisionTree>, bagging_meta: BaggingMeta) -> Result<Self, TreeError> {
        let Some(first) = trees.first() else {
            return Err(TreeError::InvalidParams("a forest needs at least one tree".into()));
        };
        let d = first.n_features();
        if trees.iter().any(|t| t.n_features() != d) {
            return Err(TreeError::InvalidParams("trees disagree on n_features".into()));
        }
        Ok(Self { trees, bagging_meta })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn n_features(&self) -> usize {
        self.trees[0].n_features()
    }

    pub fn bagging_meta(&self) -> &BaggingMeta {
        &self.bagging_meta
    }

    /// Number of trees voting for class 1.
    pub fn positive_votes(&self, sample: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict_unchecked(sample) == 1).count()
    }

    /// Fraction of trees voting for class 1.
    pub fn vote_fraction(&self, sample: &[f64]) -> Result<f64, TreeError> {
        self.trees[0].check_dim(sample)?;
        Ok(self.positive_votes(sample) as f64 / self.n_trees() as f64)
    }

    /// Majority vote; ties go to class 0.
    pub fn predict(&self, sample: &[f64]) -> Result<Class, TreeError> {
        self.trees[0].check_dim(sample)?;
        Ok(vote(self.positive_votes(sample), self.n_trees()))
    }
}

/// Majority of `positives` out of `total` votes; ties go to class 0.
#[inline]
pub fn vote(positives: usize, total: usize) -> Class {
    Class::from(2 * positives > total)
}

/// Any model the document format can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Tree(DecisionTree),
    Forest(Forest),
}

impl Model {
    pub fn n_features(&self) -> usize {
        match self {
            Model::Tree(t) => t.n_features(),
            Model::Forest(f) => f.n_features(),
        }
    }

    pub fn predict(&self, sample: &[f64]) -> Result<Class, TreeError> {
        match self {
            Model::Tree(t) => t.predict(sample),
            Model::Forest(f) => f.predict(sample),
        }
    }

    /// Trees of the model; a single tree is a one-element slice.
    pub fn trees(&self) -> &[DecisionTree] {
        match self {
            Model::Tree(t) => std::slice::from_ref(t),
            Model::Forest(f) => f.trees(),
        }
    }
}

impl From<DecisionTree> for Model {
    fn from(t: DecisionTree) -> Self {
        Model::Tree(t)
    }
}

impl From<Forest> for Model {
    fn from(f: Forest) -> Self {
        Model::Forest(f)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn leaf(class: Class) -> Node {
        let mut counts = [0, 0];
        counts[class as usize] = 1;
        Node::Leaf { class_counts: counts, predicted_class: class }
    }

    /// Depth-1 tree on feature 0 with threshold 5.0: left class 0, right class 1.
    pub fn stump(n_features: usize) -> DecisionTree {
        let nodes = vec![
            Node::Internal {
                feature_index: 0,
                threshold: 5.0,
                left: 1,
                right: 2,
                scale: 4.0,
                left_majority: 0,
                right_majority: 1,
            },
            leaf(0),
            leaf(1),
        ];
        DecisionTree::from_parts(
            nodes,
            n_features,
            TrainingMeta { max_depth: Some(1), min_samples_leaf: 1, rng_seed: 0 },
        )
    }

    pub fn constant(class: Class, n_features: usize) -> DecisionTree {
        DecisionTree::from_parts(
            vec![leaf(class)],
            n_features,
            TrainingMeta { max_depth: Some(1), min_samples_leaf: 1, rng_seed: 0 },
        )
    }
}
