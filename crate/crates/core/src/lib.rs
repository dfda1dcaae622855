//! Decision trees, bagged forests and fairness-adjusted probabilistic
//! traversal.
//!
//! The crate is organised bottom-up:
//!
//! * [`tree`] trains CART trees and forests, evaluates them deterministically
//!   and reads/writes the `fairtree-model/1` document format.
//! * [`engine`] computes per-node flip probabilities, walks trees
//!   probabilistically, aggregates Monte Carlo simulations and offers an exact
//!   path-enumeration oracle.
//! * [`metrics`] computes accuracy, equalized odds difference and disparate
//!   impact from grouped predictions.
//! * [`threshold`] is the group-threshold post-processing baseline.
//! * [`data_io`] loads CSV datasets and builds k-fold plans.

pub mod data_io;
pub mod dataset;
pub mod engine;
pub mod metrics;
pub mod rng;
pub mod threshold;
pub mod tree;

pub use dataset::{Dataset, DatasetError, FeatureKind};
pub use engine::{
    Aggregation, EngineError, FairTTTSConfig, FairnessSpec, PredictionDistribution,
};
pub use metrics::{GroupConfusion, Metric, MetricsError, MetricsReport};
pub use threshold::ThresholdPolicy;
pub use tree::{DecisionTree, Forest, ForestParams, Model, Node, ScaleMode, TreeError, TreeParams};

/// Class identifier. Only binary labels are supported, so this is 0 or 1.
pub type Class = u8;
