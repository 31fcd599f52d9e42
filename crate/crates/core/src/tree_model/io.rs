//! JSON model documents.
//!
//! ```json
//! {"version": 1, "base_score": 0.5, "n_features": 2, "feature_names": ["a", "b"],
//!  "trees": [[{"id": 0, "feature": 0, "threshold": 0.5, "left": 1, "right": 2,
//!              "value": 1.5, "cover": 20},
//!             {"id": 1, "feature": null, "threshold": null, "left": null, "right": null,
//!              "value": 1.0, "cover": 10}, ...]]}
//! ```
//!
//! Node ids must equal their position in the tree's array; node 0 is the root.
//! Internal values are recomputed from the children on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    version: u32,
    base_score: f64,
    n_features: usize,
    feature_names: Option<Vec<String>>,
    trees: Vec<Vec<NodeRecord>>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    feature: Option<usize>,
    threshold: Option<f64>,
    left: Option<usize>,
    right: Option<usize>,
    value: f64,
    cover: f64,
}

pub fn model_to_string(model: &TreeEnsemble) -> String {
    let doc = ModelDoc {
        version: MODEL_FORMAT_VERSION,
        base_score: model.base_score(),
        n_features: model.n_features(),
        feature_names: model.feature_names().map(<[String]>::to_vec),
        trees: model
            .trees()
            .iter()
            .map(|t| {
                t.nodes()
                    .iter()
                    .enumerate()
                    .map(|(id, n)| NodeRecord {
                        id,
                        feature: n.split.map(|s| s.feature),
                        threshold: n.split.map(|s| s.threshold),
                        left: n.split.map(|s| s.left),
                        right: n.split.map(|s| s.right),
                        value: n.value,
                        cover: n.cover,
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model document serializes")
}

pub fn model_from_str(text: &str) -> Result<TreeEnsemble> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| Error::ModelParse {
        tree: None,
        node: None,
        reason: e.to_string(),
    })?;
    if doc.version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelParse {
            tree: None,
            node: None,
            reason: format!("unsupported version {}", doc.version),
        });
    }
    let mut trees = Vec::with_capacity(doc.trees.len());
    for (t, records) in doc.trees.into_iter().enumerate() {
        let mut nodes = Vec::with_capacity(records.len());
        for (pos, r) in records.into_iter().enumerate() {
            let parse_err = |reason: &str| Error::ModelParse {
                tree: Some(t),
                node: Some(pos),
                reason: reason.to_owned(),
            };
            if r.id != pos {
                return Err(parse_err(&format!("id {} does not match position {pos}", r.id)));
            }
            let node = match (r.feature, r.threshold, r.left, r.right) {
                (None, None, None, None) => TreeNode::leaf(r.value, r.cover),
                (Some(f), Some(th), Some(l), Some(rt)) => {
                    let mut n = TreeNode::internal(f, th, l, rt, r.cover);
                    n.value = r.value;
                    n
                }
                _ => {
                    return Err(parse_err(
                        "feature, threshold, left and right must be all set (internal) or all null (leaf)",
                    ))
                }
            };
            nodes.push(node);
        }
        trees.push(Tree::with_index(nodes, doc.n_features, t)?);
    }
    TreeEnsemble::new(trees, doc.n_features, doc.base_score, doc.feature_names)
}

pub fn save_model(model: &TreeEnsemble, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<TreeEnsemble> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const STUMP: &str = r#"{
        "version": 1, "base_score": 0.25, "n_features": 2, "feature_names": ["a", "b"],
        "trees": [[
            {"id": 0, "feature": 1, "threshold": 0.5, "left": 1, "right": 2, "value": 0.0, "cover": 40},
            {"id": 1, "feature": null, "threshold": null, "left": null, "right": null, "value": -1.0, "cover": 30},
            {"id": 2, "feature": null, "threshold": null, "left": null, "right": null, "value": 3.0, "cover": 10}
        ]]
    }"#;

    #[test]
    fn hand_written_stump() {
        let m = model_from_str(STUMP).unwrap();
        // root value is recomputed: (30 * -1 + 10 * 3) / 40
        assert_eq!(m.trees()[0].root().value, 0.0);
        assert_eq!(m.predict(&[9.0, 0.5]).unwrap(), 0.25 - 1.0);
        assert_eq!(m.predict(&[9.0, 0.7]).unwrap(), 0.25 + 3.0);
        assert_eq!(m.expected_value(), 0.25);
    }

    #[test]
    fn cover_violation_is_an_invariant_error() {
        let bad = STUMP.replace("\"cover\": 40", "\"cover\": 41");
        assert!(matches!(
            model_from_str(&bad),
            Err(Error::ModelInvariant { tree: 0, node: 0, .. })
        ));
    }

    #[test]
    fn half_specified_node_is_a_parse_error_with_index() {
        let bad = STUMP.replacen("\"left\": null", "\"left\": 2", 1);
        assert!(matches!(
            model_from_str(&bad),
            Err(Error::ModelParse { tree: Some(0), node: Some(1), .. })
        ));
        assert!(matches!(model_from_str("{ not json"), Err(Error::ModelParse { .. })));
    }
}
