use nalgebra::DMatrix;

use super::{run_tests, TestKind, TestReport};
use crate::error::{Error, Result};
use crate::shapley::FeatureGrouping;

/// How a group is tested from individual attributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMode {
    /// All individual columns of the group jointly.
    Joint,
    /// The single summed group column. Summing can hide a strong feature
    /// among many null ones, so this form tends to understate significance.
    Reduced,
}

impl JointMode {
    pub fn name(self) -> &'static str {
        match self {
            JointMode::Joint => "joint",
            JointMode::Reduced => "reduced",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupTest {
    pub group: String,
    pub mode: JointMode,
    pub report: TestReport,
}

/// Tests each group of `individual` (S x F individual attributions).
pub fn group_joint_test(
    individual: &DMatrix<f64>,
    grouping: &FeatureGrouping,
    alpha: f64,
    mode: JointMode,
    tests: &[TestKind],
) -> Result<Vec<GroupTest>> {
    if individual.ncols() != grouping.n_features() {
        return Err(Error::Shape {
            expected: grouping.n_features(),
            actual: individual.ncols(),
            row: None,
        });
    }
    let mut out = Vec::new();
    for (name, members) in grouping.names().iter().zip(grouping.members()) {
        let block = match mode {
            JointMode::Joint => individual.select_columns(members.iter()),
            JointMode::Reduced => {
                let mut col = DMatrix::zeros(individual.nrows(), 1);
                for &f in members {
                    col += individual.column(f);
                }
                col
            }
        };
        for report in run_tests(&block, alpha, tests)? {
            out.push(GroupTest {
                group: name.clone(),
                mode,
                report,
            });
        }
    }
    Ok(out)
}
