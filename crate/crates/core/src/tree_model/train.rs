//! Stagewise squared-error boosting of depth-limited CART trees.

use super::{Dataset, Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_trees: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 5,
        }
    }
}

impl GbmParams {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must lie in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidParameter("min_samples_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

/// Fits `params.n_trees` trees to the residuals of the running prediction,
/// starting from `mean(y)`, each scaled by the learning rate.
pub fn train_gbm(data: &Dataset, params: &GbmParams) -> Result<TreeEnsemble> {
    params.validate()?;
    let y = data.target().ok_or(Error::TargetRequired)?;
    let n = data.n_rows();
    if n < 2 * params.min_samples_leaf {
        return Err(Error::SampleTooSmall {
            required: 2 * params.min_samples_leaf,
            actual: n,
        });
    }

    let base_score = y.iter().sum::<f64>() / n as f64;
    let mut prediction = vec![base_score; n];
    let mut residual = vec![0.0; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        for i in 0..n {
            residual[i] = y[i] - prediction[i];
        }
        let tree = fit_cart(data, &residual, params.max_depth, params.min_samples_leaf, params.learning_rate)?;
        for (i, p) in prediction.iter_mut().enumerate() {
            *p += tree.predict(data.row(i));
        }
        trees.push(tree);
    }
    TreeEnsemble::new(trees, data.n_cols(), base_score, Some(data.columns().to_vec()))
}

/// Greedy variance-reduction CART on `targets`; leaf outputs are
/// `scale * mean(targets in leaf)`.
pub fn fit_cart(
    data: &Dataset,
    targets: &[f64],
    max_depth: usize,
    min_samples_leaf: usize,
    scale: f64,
) -> Result<Tree> {
    if targets.len() != data.n_rows() {
        return Err(Error::InvalidData(format!(
            "{} targets for {} rows",
            targets.len(),
            data.n_rows()
        )));
    }
    let mut builder = Builder {
        data,
        targets,
        max_depth,
        min_leaf: min_samples_leaf.max(1),
        scale,
        nodes: Vec::new(),
    };
    let idx: Vec<usize> = (0..data.n_rows()).collect();
    builder.grow(idx, 0);
    Tree::new(builder.nodes, data.n_cols())
}

struct Builder<'a> {
    data: &'a Dataset,
    targets: &'a [f64],
    max_depth: usize,
    min_leaf: usize,
    scale: f64,
    nodes: Vec<TreeNode>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = idx.len() as f64;
        let mean = idx.iter().map(|&i| self.targets[i]).sum::<f64>() / n;
        self.nodes.push(TreeNode::leaf(self.scale * mean, n));

        if depth >= self.max_depth || idx.len() < 2 * self.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(&idx, mean) else {
            return id;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.data.value(i, best.feature) <= best.threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = TreeNode::internal(best.feature, best.threshold, l, r, n);
        id
    }

    fn best_split(&self, idx: &[usize], mean: f64) -> Option<BestSplit> {
        let n = idx.len();
        let sse: f64 = idx.iter().map(|&i| (self.targets[i] - mean).powi(2)).sum();
        let scale = idx.iter().map(|&i| self.targets[i].abs()).fold(0.0, f64::max);
        // Residuals of a constant target are rounding noise; do not split on them.
        if sse <= (f64::EPSILON * scale).powi(2) * n as f64 * 16.0 {
            return None;
        }

        let total: f64 = idx.iter().map(|&i| self.targets[i]).sum();
        let parent_score = total * total / n as f64;
        let mut best: Option<BestSplit> = None;
        let mut order = idx.to_vec();
        for f in 0..self.data.n_cols() {
            order.sort_by(|&a, &b| self.data.value(a, f).total_cmp(&self.data.value(b, f)));
            let mut left_sum = 0.0;
            for k in 0..n - 1 {
                left_sum += self.targets[order[k]];
                let n_left = k + 1;
                let n_right = n - n_left;
                if n_left < self.min_leaf || n_right < self.min_leaf {
                    continue;
                }
                let lo = self.data.value(order[k], f);
                let hi = self.data.value(order[k + 1], f);
                if lo == hi {
                    continue;
                }
                let right_sum = total - left_sum;
                let gain = left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64
                    - parent_score;
                if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                    let mid = lo + 0.5 * (hi - lo);
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        gain,
                    });
                }
            }
        }
        best.filter(|b| b.gain > 1e-12 * sse)
    }
}
