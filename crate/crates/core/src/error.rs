use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by model handling, attribution, and inference.
#[derive(Error, Debug)]
pub enum Error {
    #[error("training requires a target column")]
    TargetRequired,

    #[error("shape mismatch{}: expected {expected} features, got {actual}", row_suffix(*.row))]
    Shape {
        expected: usize,
        actual: usize,
        row: Option<usize>,
    },

    #[error("malformed model file{}: {reason}", location_suffix(*.tree, *.node))]
    ModelParse {
        tree: Option<usize>,
        node: Option<usize>,
        reason: String,
    },

    #[error("model invariant violated in tree {tree}, node {node}: {reason}")]
    ModelInvariant {
        tree: usize,
        node: usize,
        reason: String,
    },

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("exact enumeration supports at most {max} players, got {players}; use the tree method instead")]
    CoalitionBudgetExceeded { players: usize, max: usize },

    #[error("sample too small: need S >= {required}, got {actual}")]
    SampleTooSmall { required: usize, actual: usize },

    #[error("degenerate variance: the estimated variance of the trace statistic is not positive")]
    DegenerateVariance,

    #[error("estimated third cumulant is zero; chi-square matching is undefined")]
    SkewlessFallback,

    #[error("sample covariance is singular (K = {k}, S = {s})")]
    SingularCovariance { k: usize, s: usize },

    #[error("correlation must satisfy 0 <= rho < 1, got {0}")]
    InvalidCorrelation(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("average relative error unavailable: no non-degenerate sizes")]
    AreUnavailable,

    #[error("concentration undefined: all values are zero")]
    DegenerateConcentration,

    #[error("column '{0}' has zero variance")]
    ZeroVarianceColumn(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

/// Coarse classification used by the command line to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data, model, grouping, or parameters.
    Validation,
    /// The data are valid but a statistic cannot be formed.
    Degenerate,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DegenerateVariance
            | Error::SkewlessFallback
            | Error::SingularCovariance { .. }
            | Error::AreUnavailable
            | Error::DegenerateConcentration
            | Error::ZeroVarianceColumn(_) => ErrorClass::Degenerate,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

fn row_suffix(row: Option<usize>) -> String {
    row.map(|r| format!(" at row {r}")).unwrap_or_default()
}

fn location_suffix(tree: Option<usize>, node: Option<usize>) -> String {
    match (tree, node) {
        (Some(t), Some(n)) => format!(" (tree {t}, node {n})"),
        (Some(t), None) => format!(" (tree {t})"),
        _ => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
