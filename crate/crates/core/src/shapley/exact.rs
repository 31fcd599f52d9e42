use super::FeatureGrouping;
use crate::error::{Error, Result};
use crate::tree_model::TreeEnsemble;

/// Largest number of players the exact enumeration accepts.
pub const MAX_EXACT_PLAYERS: usize = 20;

/// `v(active)`: base score plus each tree's cover-weighted expectation
/// given only the active features of `x`.
pub fn value_function(model: &TreeEnsemble, x: &[f64], active: &[bool]) -> Result<f64> {
    model.check_dims(x, None)?;
    if active.len() != model.n_features() {
        return Err(Error::Shape {
            expected: model.n_features(),
            actual: active.len(),
            row: None,
        });
    }
    let is_active = |f: usize| active[f];
    Ok(model.base_score() + model.trees().iter().map(|t| t.marginal_value(x, &is_active)).sum::<f64>())
}

/// Shapley values of the K-player game whose players are the groups.
pub fn exact_group_shapley(model: &TreeEnsemble, x: &[f64], grouping: &FeatureGrouping) -> Result<Vec<f64>> {
    model.check_dims(x, None)?;
    if grouping.n_features() != model.n_features() {
        return Err(Error::InvalidGrouping(format!(
            "grouping covers {} features, model has {}",
            grouping.n_features(),
            model.n_features()
        )));
    }
    let k = grouping.n_groups();
    if k > MAX_EXACT_PLAYERS {
        return Err(Error::CoalitionBudgetExceeded {
            players: k,
            max: MAX_EXACT_PLAYERS,
        });
    }

    // v for every coalition, indexed by its bitmask over groups
    let values: Vec<f64> = (0..1usize << k)
        .map(|mask| {
            let active = |f: usize| mask >> grouping.group_of(f) & 1 == 1;
            model.base_score() + model.trees().iter().map(|t| t.marginal_value(x, &active)).sum::<f64>()
        })
        .collect();

    // |C|! (K - |C| - 1)! / K!  ==  1 / (K * binom(K - 1, |C|))
    let weight: Vec<f64> = (0..k).map(|c| 1.0 / (k as f64 * binomial(k - 1, c))).collect();

    let mut phi = vec![0.0; k];
    for (g, out) in phi.iter_mut().enumerate() {
        let bit = 1usize << g;
        let mut acc = 0.0;
        for mask in (0..1usize << k).filter(|m| m & bit == 0) {
            acc += weight[mask.count_ones() as usize] * (values[mask | bit] - values[mask]);
        }
        *out = acc;
    }
    Ok(phi)
}

/// Individual Shapley values: the group game with one feature per group.
pub fn exact_individual_shapley(model: &TreeEnsemble, x: &[f64]) -> Result<Vec<f64>> {
    let names: Vec<String> = (0..model.n_features()).map(|f| f.to_string()).collect();
    exact_group_shapley(model, x, &FeatureGrouping::singletons(&names))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
