use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{FeatureGrouping, ShapMatrix};
use crate::error::{Error, Result};
use crate::tree_model::{Dataset, Tree, TreeEnsemble};

/// Group attributions by walking each observation's decision path.
///
/// Every internal node on the path credits the group owning its split
/// feature with `value(child taken) - value(node)`. Along one path these
/// deltas telescope to `leaf - root`, so each row satisfies
/// `sum(phi) + base = prediction`.
pub fn tree_group_shap(model: &TreeEnsemble, data: &Dataset, grouping: &FeatureGrouping) -> Result<ShapMatrix> {
    let rows: Vec<&[f64]> = data.rows().collect();
    tree_group_shap_rows(model, &rows, grouping)
}

pub fn tree_group_shap_rows(model: &TreeEnsemble, rows: &[&[f64]], grouping: &FeatureGrouping) -> Result<ShapMatrix> {
    if grouping.n_features() != model.n_features() {
        return Err(Error::InvalidGrouping(format!(
            "grouping covers {} features, model has {}",
            grouping.n_features(),
            model.n_features()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        model.check_dims(row, Some(i))?;
    }

    let k = grouping.n_groups();
    let attributions: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|x| {
            let mut phi = vec![0.0; k];
            for tree in model.trees() {
                accumulate_path(tree, x, grouping, &mut phi);
            }
            phi
        })
        .collect();

    let mut values = DMatrix::zeros(rows.len(), k);
    for (i, phi) in attributions.iter().enumerate() {
        for (j, v) in phi.iter().enumerate() {
            values[(i, j)] = *v;
        }
    }
    let base = model.expected_value();
    ShapMatrix::new(values, vec![base; rows.len()], grouping.names().to_vec())
}

fn accumulate_path(tree: &Tree, x: &[f64], grouping: &FeatureGrouping, phi: &mut [f64]) {
    let nodes = tree.nodes();
    let mut i = 0;
    while let Some(split) = &nodes[i].split {
        let next = Tree::child_for(split, x);
        phi[grouping.group_of(split.feature)] += nodes[next].value - nodes[i].value;
        i = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapley::exact_group_shapley;
    use crate::tree_model::TreeNode;

    #[test]
    fn stump_right_branch() {
        let t = Tree::new(
            vec![
                TreeNode::internal(0, 0.5, 1, 2, 20.0),
                TreeNode::leaf(1.0, 10.0),
                TreeNode::leaf(2.0, 10.0),
            ],
            1,
        )
        .unwrap();
        let m = TreeEnsemble::new(vec![t], 1, 0.0, None).unwrap();
        let g = FeatureGrouping::new(vec![("g".into(), vec![0])], 1).unwrap();
        let x = [0.8];
        let shap = tree_group_shap_rows(&m, &[&x], &g).unwrap();
        assert_eq!(shap.values()[(0, 0)], 0.5);
        assert_eq!(shap.base_values()[0], 1.5);
        assert_eq!(exact_group_shapley(&m, &x, &g).unwrap(), vec![0.5]);
    }

    #[test]
    fn zero_trees() {
        let m = TreeEnsemble::new(vec![], 2, 0.7, None).unwrap();
        let g = FeatureGrouping::new(vec![("a".into(), vec![0]), ("b".into(), vec![1])], 2).unwrap();
        let shap = tree_group_shap_rows(&m, &[&[1.0, 2.0], &[3.0, 4.0]], &g).unwrap();
        assert!(shap.values().iter().all(|&v| v == 0.0));
        assert_eq!(shap.base_values(), [0.7, 0.7]);
    }

    #[test]
    fn wrong_row_dimension_reports_row() {
        let m = TreeEnsemble::new(vec![], 2, 0.0, None).unwrap();
        let g = FeatureGrouping::new(vec![("a".into(), vec![0, 1])], 2).unwrap();
        let err = tree_group_shap_rows(&m, &[&[1.0, 2.0], &[3.0]], &g).unwrap_err();
        assert!(matches!(err, Error::Shape { row: Some(1), .. }));
    }
}
