use rand::Rng;
use rand_distr::StandardNormal;

use super::{role, stream_rng};
use crate::error::{Error, Result};
use crate::shapley::FeatureGrouping;
use crate::tree_model::Dataset;

/// Synthetic regression data with known influential groups.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: Dataset,
    pub grouping: FeatureGrouping,
    /// Indices of the groups the target depends on.
    pub influential: Vec<usize>,
}

pub const MIN_ROWS: usize = 50;

/// Within-block loading on the shared block factor; features in a block
/// have correlation `LOADING^2`.
const LOADING: f64 = 0.8;
const NOISE_SD: f64 = 0.25;
/// Key separating regression streams from factor-model cells.
const REGRESSION_KEY: u64 = 0x5245_4752_4553_5331;

/// Draws `n` rows whose features come in correlated blocks of the given
/// sizes. The target depends on the first (up to) three groups:
///
/// `y = 2 m_0 + 1.5 sin(2 m_1) + m_2^2 + noise`
///
/// where `m_g` is the mean of group `g`'s features.
pub fn synth_regression(n: usize, group_sizes: &[usize], seed: u64) -> Result<SynthData> {
    if n < MIN_ROWS {
        return Err(Error::SampleTooSmall {
            required: MIN_ROWS,
            actual: n,
        });
    }
    if group_sizes.is_empty() || group_sizes.contains(&0) {
        return Err(Error::InvalidGrouping("every group needs at least one feature".into()));
    }
    let n_features: usize = group_sizes.iter().sum();
    let mut columns = Vec::with_capacity(n_features);
    let mut groups = Vec::with_capacity(group_sizes.len());
    for (g, &size) in group_sizes.iter().enumerate() {
        let start = columns.len();
        for i in 0..size {
            columns.push(format!("x{}_{}", g + 1, i + 1));
        }
        groups.push((format!("G{}", g + 1), (start..start + size).collect::<Vec<_>>()));
    }
    let influential: Vec<usize> = (0..group_sizes.len().min(3)).collect();

    let mut rng = stream_rng(seed, REGRESSION_KEY, 0, role::REGRESSION);
    let unique = (1.0 - LOADING * LOADING).sqrt();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::with_capacity(n_features);
        let mut target = 0.0;
        for (g, &size) in group_sizes.iter().enumerate() {
            let factor: f64 = rng.sample(StandardNormal);
            let mut sum = 0.0;
            for _ in 0..size {
                let e: f64 = rng.sample(StandardNormal);
                let x = LOADING * factor + unique * e;
                sum += x;
                row.push(x);
            }
            let m = sum / size as f64;
            target += match g {
                0 => 2.0 * m,
                1 => 1.5 * (2.0 * m).sin(),
                2 => m * m,
                _ => 0.0,
            };
        }
        let noise: f64 = rng.sample(StandardNormal);
        y.push(target + NOISE_SD * noise);
        rows.push(row);
    }
    let dataset = Dataset::new(rows, Some(y), columns)?;
    let grouping = FeatureGrouping::new(groups, n_features)?;
    Ok(SynthData {
        dataset,
        grouping,
        influential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_determinism() {
        let a = synth_regression(60, &[2, 3, 1, 4], 5).unwrap();
        assert_eq!(a.dataset.n_cols(), 10);
        assert_eq!(a.grouping.n_groups(), 4);
        assert_eq!(a.grouping.members()[1], vec![2, 3, 4]);
        assert_eq!(a.influential, vec![0, 1, 2]);
        let b = synth_regression(60, &[2, 3, 1, 4], 5).unwrap();
        assert_eq!(a.dataset.target(), b.dataset.target());
        let c = synth_regression(60, &[2, 3, 1, 4], 6).unwrap();
        assert_ne!(a.dataset.target(), c.dataset.target());
    }

    #[test]
    fn preconditions() {
        assert!(matches!(synth_regression(49, &[1], 0), Err(Error::SampleTooSmall { .. })));
        assert!(synth_regression(50, &[], 0).is_err());
        assert!(synth_regression(50, &[2, 0], 0).is_err());
    }
}
