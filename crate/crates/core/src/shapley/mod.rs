//! Group Shapley attributions for tree ensembles.
//!
//! Groups of features act as single players. Two routes are provided: an
//! exact enumeration over coalitions of groups ([`exact_group_shapley`]) and
//! a per-path algorithm that walks each tree once per observation
//! ([`tree_group_shap`]). Both share the cover-weighted value function
//! ([`value_function`]), so on stump ensembles they agree exactly.

mod exact;
mod grouping;
mod matrix;
mod path;

pub use exact::{exact_group_shapley, exact_individual_shapley, value_function, MAX_EXACT_PLAYERS};
pub use grouping::FeatureGrouping;
pub use matrix::ShapMatrix;
pub use path::{tree_group_shap, tree_group_shap_rows};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Per-feature weights, normalized to sum to one within each group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupWeights {
    pub weights: Vec<f64>,
}

/// Weights proportional to mean absolute individual SHAP within each group;
/// a group with no attribution mass gets uniform weights.
pub fn shap_weights(individual: &DMatrix<f64>, grouping: &FeatureGrouping) -> Result<GroupWeights> {
    if individual.ncols() != grouping.n_features() {
        return Err(Error::Shape {
            expected: grouping.n_features(),
            actual: individual.ncols(),
            row: None,
        });
    }
    let s = individual.nrows().max(1) as f64;
    let mean_abs: Vec<f64> = individual
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>() / s)
        .collect();
    let mut weights = vec![0.0; grouping.n_features()];
    for members in grouping.members() {
        let total: f64 = members.iter().map(|&f| mean_abs[f]).sum();
        for &f in members {
            weights[f] = if total > 0.0 {
                mean_abs[f] / total
            } else {
                1.0 / members.len() as f64
            };
        }
    }
    Ok(GroupWeights { weights })
}
