//! Regression-tree ensembles: structure, prediction, training and model files.
//!
//! Every node stores the number of training samples that reached it (its
//! cover) and a value. Leaf values are the tree's outputs; internal values
//! are cover-weighted means of the children, which is what the attribution
//! code marginalizes over.

mod dataset;
mod io;
mod train;

pub use dataset::Dataset;
pub use io::{load_model, model_from_str, model_to_string, save_model, MODEL_FORMAT_VERSION};
pub use train::{fit_cart, train_gbm, GbmParams};

use crate::error::{Error, Result};

const COVER_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// `None` for leaves.
    pub split: Option<Split>,
    pub value: f64,
    pub cover: f64,
}

impl TreeNode {
    pub fn leaf(value: f64, cover: f64) -> Self {
        TreeNode {
            split: None,
            value,
            cover,
        }
    }

    /// Internal node; its value is filled in when the tree is built.
    pub fn internal(feature: usize, threshold: f64, left: usize, right: usize, cover: f64) -> Self {
        TreeNode {
            split: Some(Split {
                feature,
                threshold,
                left,
                right,
            }),
            value: 0.0,
            cover,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }
}

/// A binary regression tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

impl Tree {
    /// Validates the structure and covers, then recomputes every internal
    /// value as the cover-weighted mean of its children.
    pub fn new(nodes: Vec<TreeNode>, n_features: usize) -> Result<Self> {
        Self::with_index(nodes, n_features, 0)
    }

    pub(crate) fn with_index(mut nodes: Vec<TreeNode>, n_features: usize, tree: usize) -> Result<Self> {
        let invariant = |node: usize, reason: String| Error::ModelInvariant { tree, node, reason };
        if nodes.is_empty() {
            return Err(invariant(0, "tree has no nodes".into()));
        }

        let mut parent_count = vec![0usize; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            if !(node.cover.is_finite() && node.cover >= 0.0) {
                return Err(invariant(i, format!("cover {} is not a nonnegative number", node.cover)));
            }
            match node.split {
                None => {
                    if !node.value.is_finite() {
                        return Err(invariant(i, "leaf value is not finite".into()));
                    }
                }
                Some(s) => {
                    if s.feature >= n_features {
                        return Err(invariant(
                            i,
                            format!("split feature {} outside [0, {n_features})", s.feature),
                        ));
                    }
                    if s.threshold.is_nan() {
                        return Err(invariant(i, "threshold is NaN".into()));
                    }
                    for child in [s.left, s.right] {
                        if child >= nodes.len() {
                            return Err(invariant(i, format!("child {child} does not exist")));
                        }
                        if child == 0 {
                            return Err(invariant(i, "root cannot be a child".into()));
                        }
                        parent_count[child] += 1;
                    }
                    if s.left == s.right {
                        return Err(invariant(i, "left and right child coincide".into()));
                    }
                }
            }
        }
        if let Some(node) = parent_count.iter().skip(1).position(|&c| c != 1) {
            return Err(invariant(
                node + 1,
                format!("node has {} parents, expected exactly one", parent_count[node + 1]),
            ));
        }

        // With one parent per non-root node, the graph is a tree iff every
        // node is reachable from the root.
        let order = preorder(&nodes);
        if order.len() != nodes.len() {
            let unreached = (0..nodes.len()).find(|i| !order.contains(i)).unwrap_or(0);
            return Err(invariant(unreached, "node is unreachable from the root (cycle)".into()));
        }

        for &i in order.iter().rev() {
            let Some(s) = nodes[i].split else { continue };
            let (cl, cr) = (nodes[s.left].cover, nodes[s.right].cover);
            let cover = nodes[i].cover;
            if cover <= 0.0 {
                return Err(invariant(i, "internal node has zero cover".into()));
            }
            if (cover - (cl + cr)).abs() > COVER_REL_TOL * cover.max(1.0) {
                return Err(invariant(
                    i,
                    format!("cover {cover} differs from children's covers {cl} + {cr}"),
                ));
            }
            nodes[i].value = (cl * nodes[s.left].value + cr * nodes[s.right].value) / (cl + cr);
        }
        Ok(Tree { nodes })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i].split {
                None => 0,
                Some(s) => 1 + go(nodes, s.left).max(go(nodes, s.right)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Index of the child `x` follows at an internal node (`x <= threshold` goes left).
    #[inline]
    pub(crate) fn child_for(split: &Split, x: &[f64]) -> usize {
        if x[split.feature] <= split.threshold {
            split.left
        } else {
            split.right
        }
    }

    /// Leaf value reached by `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        while let Some(s) = &self.nodes[i].split {
            i = Self::child_for(s, x);
        }
        self.nodes[i].value
    }

    /// Node indices visited by `x` from the root to its leaf.
    pub fn decision_path(&self, x: &[f64]) -> Vec<usize> {
        let mut path = vec![0];
        let mut i = 0;
        while let Some(s) = &self.nodes[i].split {
            i = Self::child_for(s, x);
            path.push(i);
        }
        path
    }

    /// Expected output when only the features for which `active` returns
    /// true are known: known splits follow `x`, unknown splits average both
    /// children by cover.
    pub fn marginal_value(&self, x: &[f64], active: &impl Fn(usize) -> bool) -> f64 {
        self.marginal_from(0, x, active)
    }

    fn marginal_from(&self, i: usize, x: &[f64], active: &impl Fn(usize) -> bool) -> f64 {
        let node = &self.nodes[i];
        match &node.split {
            None => node.value,
            Some(s) if active(s.feature) => self.marginal_from(Self::child_for(s, x), x, active),
            Some(s) => {
                let (l, r) = (&self.nodes[s.left], &self.nodes[s.right]);
                let total = l.cover + r.cover;
                (l.cover * self.marginal_from(s.left, x, active)
                    + r.cover * self.marginal_from(s.right, x, active))
                    / total
            }
        }
    }
}

fn preorder(nodes: &[TreeNode]) -> Vec<usize> {
    let mut seen = vec![false; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        order.push(i);
        if let Some(s) = nodes[i].split {
            stack.push(s.right);
            stack.push(s.left);
        }
    }
    order
}

/// Additive ensemble: `prediction(x) = base_score + sum of tree outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEnsemble {
    trees: Vec<Tree>,
    n_features: usize,
    base_score: f64,
    feature_names: Option<Vec<String>>,
}

impl TreeEnsemble {
    pub fn new(
        trees: Vec<Tree>,
        n_features: usize,
        base_score: f64,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidParameter("ensemble needs at least one feature".into()));
        }
        if let Some(names) = &feature_names {
            if names.len() != n_features {
                return Err(Error::InvalidParameter(format!(
                    "{} feature names for {n_features} features",
                    names.len()
                )));
            }
        }
        for (t, tree) in trees.iter().enumerate() {
            for (n, node) in tree.nodes.iter().enumerate() {
                if let Some(s) = node.split {
                    if s.feature >= n_features {
                        return Err(Error::ModelInvariant {
                            tree: t,
                            node: n,
                            reason: format!("split feature {} outside [0, {n_features})", s.feature),
                        });
                    }
                }
            }
        }
        Ok(TreeEnsemble {
            trees,
            n_features,
            base_score,
            feature_names,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn check_dims(&self, x: &[f64], row: Option<usize>) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: x.len(),
                row,
            });
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_dims(x, None)?;
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// `v(empty set)`: the base score plus every tree's root value.
    pub fn expected_value(&self) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.root().value).sum::<f64>()
    }

    /// Concatenates the trees of two ensembles over the same features.
    pub fn concat(&self, other: &TreeEnsemble) -> Result<TreeEnsemble> {
        if self.n_features != other.n_features {
            return Err(Error::Shape {
                expected: self.n_features,
                actual: other.n_features,
                row: None,
            });
        }
        let trees = self.trees.iter().chain(other.trees.iter()).cloned().collect();
        TreeEnsemble::new(
            trees,
            self.n_features,
            self.base_score + other.base_score,
            self.feature_names.clone(),
        )
    }
}
