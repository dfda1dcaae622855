//! The `fairtree-model/1` document format.
//!
//! ```json
//! {
//!   "schema": "fairtree-model/1",
//!   "model": {
//!     "kind": "tree",
//!     "n_features": 1,
//!     "class_labels": [0, 1],
//!     "training_meta": { "max_depth": 1, "min_samples_leaf": 1, "rng_seed": 0 },
//!     "nodes": [
//!       { "type": "internal", "feature_index": 0, "threshold": 5.0, "left": 1, "right": 2,
//!         "scale": 4.0, "left_majority": 0, "right_majority": 1 },
//!       { "type": "leaf", "class_counts": [2, 0], "predicted_class": 0 },
//!       { "type": "leaf", "class_counts": [0, 2], "predicted_class": 1 }
//!     ]
//!   }
//! }
//! ```
//!
//! A forest is `{"kind": "forest", "bagging_meta": {...}, "trees": [<tree
//! body without "kind">, ...]}`. Node references are indices into `nodes`,
//! the root is node 0 and every child index is larger than its parent's.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{majority, BaggingMeta, DecisionTree, Forest, Model, Node, TrainingMeta};

pub const MODEL_SCHEMA: &str = "fairtree-model/1";

#[derive(Debug, Error)]
pub enum ModelDocError {
    #[error("malformed model document at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid model at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("unsupported schema {0:?}, expected \"fairtree-model/1\"")]
    Schema(String),
}

impl ModelDocError {
    /// Location of the offending value, e.g. `model.trees[2].nodes[5].scale`.
    pub fn path(&self) -> Option<&str> {
        match self {
            ModelDocError::Parse { path, .. } | ModelDocError::Invalid { path, .. } => Some(path),
            ModelDocError::Schema(_) => None,
        }
    }
}

#[derive(Serialize)]
struct Document {
    schema: String,
    model: ModelBody,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ModelBody {
    Tree(TreeBody),
    Forest { bagging_meta: BaggingMeta, trees: Vec<TreeBody> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ForestBody {
    bagging_meta: BaggingMeta,
    trees: Vec<TreeBody>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeBody {
    n_features: usize,
    class_labels: [u8; 2],
    training_meta: TrainingMeta,
    nodes: Vec<Node>,
}

impl From<&DecisionTree> for TreeBody {
    fn from(t: &DecisionTree) -> Self {
        TreeBody {
            n_features: t.n_features,
            class_labels: [0, 1],
            training_meta: t.training_meta,
            nodes: t.nodes.clone(),
        }
    }
}

/// Render a model as a pretty-printed JSON document. Floats use shortest
/// round-trip formatting so reading the document back is exact.
pub fn serialize(model: &Model) -> String {
    let body = match model {
        Model::Tree(t) => ModelBody::Tree(t.into()),
        Model::Forest(f) => ModelBody::Forest {
            bagging_meta: f.bagging_meta,
            trees: f.trees.iter().map(TreeBody::from).collect(),
        },
    };
    let doc = Document { schema: MODEL_SCHEMA.to_string(), model: body };
    serde_json::to_string_pretty(&doc).expect("model documents always serialize")
}

pub fn deserialize(text: &str) -> Result<Model, ModelDocError> {
    let mut doc: Value = serde_json::from_str(text)
        .map_err(|e| ModelDocError::Parse { path: "$".into(), message: e.to_string() })?;
    let schema = doc.get("schema").and_then(Value::as_str).ok_or_else(|| ModelDocError::Parse {
        path: "schema".into(),
        message: "missing or non-string schema".into(),
    })?;
    if schema != MODEL_SCHEMA {
        return Err(ModelDocError::Schema(schema.to_string()));
    }
    let mut model = match doc.get_mut("model").map(Value::take) {
        Some(Value::Object(m)) => m,
        _ => return Err(ModelDocError::Parse { path: "model".into(), message: "expected an object".into() }),
    };
    let kind = model.remove("kind");
    match kind.as_ref().and_then(Value::as_str) {
        Some("tree") => {
            let body: TreeBody = from_value_at(Value::Object(model), "model")?;
            Ok(Model::Tree(validate_tree(body, "model")?))
        }
        Some("forest") => {
            let body: ForestBody = from_value_at(Value::Object(model), "model")?;
            if body.trees.is_empty() {
                return Err(invalid("model.trees", "a forest needs at least one tree"));
            }
            let trees = body
                .trees
                .into_iter()
                .enumerate()
                .map(|(i, b)| validate_tree(b, &format!("model.trees[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let d = trees[0].n_features;
            if let Some(i) = trees.iter().position(|t| t.n_features != d) {
                return Err(invalid(
                    &format!("model.trees[{i}].n_features"),
                    &format!("expected {d} like the first tree"),
                ));
            }
            Ok(Model::Forest(Forest::from_parts(trees, body.bagging_meta)))
        }
        _ => Err(ModelDocError::Parse { path: "model.kind".into(), message: "expected \"tree\" or \"forest\"".into() }),
    }
}

/// Structural validation shared by the document reader and the public
/// constructors; `at` prefixes error paths.
pub(super) fn validate_nodes(
    nodes: Vec<Node>,
    n_features: usize,
    training_meta: TrainingMeta,
    at: &str,
) -> Result<DecisionTree, ModelDocError> {
    validate_tree(TreeBody { n_features, class_labels: [0, 1], training_meta, nodes }, at)
}

fn from_value_at<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T, ModelDocError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { prefix.to_string() } else { format!("{prefix}.{inner}") };
        ModelDocError::Parse { path, message: e.into_inner().to_string() }
    })
}

fn invalid(path: &str, message: &str) -> ModelDocError {
    ModelDocError::Invalid { path: path.to_string(), message: message.to_string() }
}

fn validate_tree(body: TreeBody, at: &str) -> Result<DecisionTree, ModelDocError> {
    if body.class_labels != [0, 1] {
        return Err(invalid(&format!("{at}.class_labels"), "only [0, 1] is supported"));
    }
    if body.nodes.is_empty() {
        return Err(invalid(&format!("{at}.nodes"), "a tree needs at least one node"));
    }
    let n = body.nodes.len();
    let mut parents = vec![0usize; n];
    for (id, node) in body.nodes.iter().enumerate() {
        let here = format!("{at}.nodes[{id}]");
        match *node {
            Node::Internal { feature_index, threshold, left, right, scale, left_majority, right_majority } => {
                if feature_index >= body.n_features {
                    return Err(invalid(
                        &format!("{here}.feature_index"),
                        &format!("{feature_index} is not below n_features = {}", body.n_features),
                    ));
                }
                if !threshold.is_finite() {
                    return Err(invalid(&format!("{here}.threshold"), "threshold must be finite"));
                }
                if !(scale.is_finite() && scale >= 0.0) {
                    return Err(invalid(&format!("{here}.scale"), "scale must be finite and nonnegative"));
                }
                for (name, child) in [("left", left), ("right", right)] {
                    if child <= id || child >= n {
                        return Err(invalid(
                            &format!("{here}.{name}"),
                            &format!("child {child} must lie in {}..{n}", id + 1),
                        ));
                    }
                    parents[child] += 1;
                }
                if left == right {
                    return Err(invalid(&format!("{here}.right"), "left and right children coincide"));
                }
                for (name, m) in [("left_majority", left_majority), ("right_majority", right_majority)] {
                    if m > 1 {
                        return Err(invalid(&format!("{here}.{name}"), "class must be 0 or 1"));
                    }
                }
            }
            Node::Leaf { class_counts, predicted_class } => {
                if predicted_class != majority(class_counts) {
                    return Err(invalid(
                        &format!("{here}.predicted_class"),
                        "must be the majority of class_counts (ties to class 0)",
                    ));
                }
            }
        }
    }
    if let Some(id) = (1..n).find(|&id| parents[id] != 1) {
        return Err(invalid(
            &format!("{at}.nodes[{id}]"),
            &format!("referenced {} times, expected exactly once", parents[id]),
        ));
    }
    let tree = DecisionTree::from_parts(body.nodes, body.n_features, body.training_meta);
    if let Some(max) = body.training_meta.max_depth {
        if tree.depth() > max {
            return Err(invalid(
                &format!("{at}.training_meta.max_depth"),
                &format!("tree depth {} exceeds max_depth {max}", tree.depth()),
            ));
        }
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::stump;
    use super::*;

    const HAND_WRITTEN: &str = r#"{
      "schema": "fairtree-model/1",
      "model": {
        "kind": "tree",
        "n_features": 2,
        "class_labels": [0, 1],
        "training_meta": { "max_depth": 1, "min_samples_leaf": 1, "rng_seed": 0 },
        "nodes": [
          { "type": "internal", "feature_index": 1, "threshold": 2.5, "left": 1, "right": 2,
            "scale": 1.5, "left_majority": 1, "right_majority": 0 },
          { "type": "leaf", "class_counts": [1, 3], "predicted_class": 1 },
          { "type": "leaf", "class_counts": [4, 0], "predicted_class": 0 }
        ]
      }
    }"#;

    #[test]
    fn hand_written_document_predicts() {
        let m = deserialize(HAND_WRITTEN).unwrap();
        // feature 1 = 2.0 <= 2.5 -> left leaf (class 1); 3.0 -> right (class 0).
        assert_eq!(m.predict(&[99.0, 2.0]).unwrap(), 1);
        assert_eq!(m.predict(&[99.0, 2.5]).unwrap(), 1);
        assert_eq!(m.predict(&[-1.0, 3.0]).unwrap(), 0);
    }

    #[test]
    fn round_trip_is_identity() {
        let m = Model::Tree(stump(3));
        let text = serialize(&m);
        assert_eq!(deserialize(&text).unwrap(), m);
        assert_eq!(serialize(&deserialize(&text).unwrap()), text);
    }

    #[test]
    fn negative_scale_rejected_with_path() {
        let doc = HAND_WRITTEN.replace("\"scale\": 1.5", "\"scale\": -1.5");
        let err = deserialize(&doc).unwrap_err();
        assert!(matches!(err, ModelDocError::Invalid { .. }));
        assert_eq!(err.path(), Some("model.nodes[0].scale"));
    }

    #[test]
    fn missing_field_reports_path() {
        let doc = HAND_WRITTEN.replace("\"threshold\": 2.5, ", "");
        let err = deserialize(&doc).unwrap_err();
        assert!(matches!(err, ModelDocError::Parse { .. }), "{err}");
        assert_eq!(err.path(), Some("model.nodes[0]"), "{err}");
        assert!(err.to_string().contains("threshold"));
    }

    #[test]
    fn bad_child_reference_rejected() {
        let doc = HAND_WRITTEN.replace("\"right\": 2", "\"right\": 7");
        assert_eq!(deserialize(&doc).unwrap_err().path(), Some("model.nodes[0].right"));
    }

    #[test]
    fn wrong_schema_rejected() {
        let doc = HAND_WRITTEN.replace("fairtree-model/1", "fairtree-model/9");
        assert!(matches!(deserialize(&doc), Err(ModelDocError::Schema(_))));
    }

    #[test]
    fn leaf_prediction_must_match_counts() {
        let doc = HAND_WRITTEN.replace("\"class_counts\": [1, 3], \"predicted_class\": 1", "\"class_counts\": [1, 3], \"predicted_class\": 0");
        assert_eq!(deserialize(&doc).unwrap_err().path(), Some("model.nodes[1].predicted_class"));
    }
}
