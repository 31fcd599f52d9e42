//! Group Shapley attributions for tree-ensemble regressors, with
//! trace-based significance tests and a Monte Carlo harness for their
//! size and power.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod inference;
pub mod shapley;
pub mod simgen;
pub mod tree_model;

pub use error::{Error, ErrorClass, Result};
