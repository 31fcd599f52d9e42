#![allow(dead_code)]

use groupshap::shapley::FeatureGrouping;
use groupshap::tree_model::{Tree, TreeEnsemble, TreeNode};
use rand::Rng;

/// Random tree of exactly `depth` levels with consistent covers.
pub fn random_tree<R: Rng>(rng: &mut R, n_features: usize, depth: usize) -> Tree {
    let mut nodes = Vec::new();
    let cover = rng.random_range(20.0..200.0);
    grow(rng, &mut nodes, n_features, depth, cover);
    Tree::new(nodes, n_features).expect("generated tree is valid")
}

fn grow<R: Rng>(rng: &mut R, nodes: &mut Vec<TreeNode>, n_features: usize, depth: usize, cover: f64) -> usize {
    let id = nodes.len();
    if depth == 0 {
        nodes.push(TreeNode::leaf(rng.random_range(-1.0..1.0), cover));
        return id;
    }
    nodes.push(TreeNode::leaf(0.0, cover));
    let feature = rng.random_range(0..n_features);
    let threshold = rng.random_range(-1.0..1.0);
    let share = rng.random_range(0.1..0.9);
    let left_cover = cover * share;
    let left = grow(rng, nodes, n_features, depth - 1, left_cover);
    let right = grow(rng, nodes, n_features, depth - 1, cover - left_cover);
    nodes[id] = TreeNode::internal(feature, threshold, left, right, cover);
    id
}

pub fn random_ensemble<R: Rng>(rng: &mut R, n_features: usize, n_trees: usize, depth: usize) -> TreeEnsemble {
    let trees = (0..n_trees).map(|_| random_tree(rng, n_features, depth)).collect();
    TreeEnsemble::new(trees, n_features, rng.random_range(-0.5..0.5), None).expect("valid ensemble")
}

/// Random partition of `n_features` into `n_groups` nonempty groups.
pub fn random_grouping<R: Rng>(rng: &mut R, n_features: usize, n_groups: usize) -> FeatureGrouping {
    assert!(n_groups >= 1 && n_groups <= n_features);
    let mut order: Vec<usize> = (0..n_features).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut members = vec![Vec::new(); n_groups];
    for (slot, &f) in order.iter().enumerate() {
        let g = if slot < n_groups { slot } else { rng.random_range(0..n_groups) };
        members[g].push(f);
    }
    let groups = members
        .into_iter()
        .enumerate()
        .map(|(g, m)| (format!("g{g}"), m))
        .collect();
    FeatureGrouping::new(groups, n_features).expect("valid partition")
}

pub fn random_point<R: Rng>(rng: &mut R, n_features: usize) -> Vec<f64> {
    (0..n_features).map(|_| rng.random_range(-1.2..1.2)).collect()
}
