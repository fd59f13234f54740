//! Learning stationary first-order Markov dynamic Bayesian networks from
//! incomplete categorical multivariate time series, and imputing the missing
//! cells by posterior maximization.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: datasets, attribute domains, network structures, CPTs and the
//!   text formats for both.
//! - [`scoring`]: sufficient statistics, log-likelihood and the MDL score.
//! - [`inference`]: exact two-slice window posteriors and expected
//!   sufficient statistics.
//! - [`learning`]: tree-augmented structure search, parameter EM and
//!   Structural EM.
//! - [`imputation`]: the DBN imputer and the LOCF, mode and parameter-EM
//!   baselines.
//! - [`discretize`]: SAX discretization of real-valued series.
//! - [`bench`]: synthetic data, missingness injection, benchmark grids and the
//!   Wilcoxon signed-rank test.

pub mod bench;
pub mod discretize;
mod error;
pub mod imputation;
pub mod inference;
pub mod learning;
pub mod model;
mod parallel;
pub mod rng;
pub mod scoring;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
