//! Natural discrete one-parameter polynomial exponential (NDOPPE)
//! distributions.
//!
//! The family is a finite mixture of negative binomial distributions
//! `NB(k, theta)`, `k = 1..=r`, with known nonnegative mixing coefficients.
//! `r = 1` recovers the geometric distribution and `r = 2, a = (1, 1)` the
//! natural discrete Lindley (NDL) distribution.
//!
//! The crate provides:
//! - evaluation of the PMF, CDF, mean and mixture weights ([`model`]);
//! - seeded random variate generation via the two-step mixture algorithm
//!   ([`sampler`]);
//! - maximum-likelihood estimation of `theta` and the minimum-variance
//!   unbiased estimators of the PMF and the CDF built on the sample sum
//!   ([`estimate`]);
//! - exact and Monte Carlo mean-squared-error analysis of those estimators
//!   ([`risk`]);
//! - dataset parsing and fit reports ([`report`]).

pub mod error;
pub mod estimate;
pub mod model;
pub mod report;
pub mod risk;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
pub use estimate::{mle_theta, Sample, Umvue};
pub use model::{ModelSpec, Theta};
pub use report::{fit, parse_dataset, FitReport};
pub use sampler::SeededStream;
