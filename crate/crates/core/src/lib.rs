//! Optimal classification trees whose branch nodes split on multivariate Boolean rules.

pub mod binarize;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod mip;
pub mod objective;
pub mod rational;
pub mod search;
pub mod tree;

pub use error::{Error, Result};
