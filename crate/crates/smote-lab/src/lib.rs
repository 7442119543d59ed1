//! Deterministic synthetic sampling by nearest-neighbor interpolation,
//! with the statistical-distance tooling needed to study how close the
//! synthetic draws stay to the sample they came from.
//!
//! The crate is organized around small, exactly testable pieces:
//!
//! - [`sampling`]: the interpolation procedures and seeded batch generation;
//! - [`rng`]: counter-based uniform streams that make batches independent
//!   of thread count;
//! - [`dist`]: the reference distributions with exact quantile functions;
//! - [`metrics`]: exact empirical KS, Wasserstein-1, histogram KL, and KDE;
//! - [`experiments`]: seeded Monte Carlo runners built from the above;
//! - [`data_io`]: dataset ingestion and byte-deterministic CSV/SVG output;
//! - [`cli`]: the command-line front end over the experiment runners;
//! - [`error`]: one error type shared across the crate.

pub mod cli;
pub mod data_io;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod rng;
pub mod sampling;

pub use dist::DistributionSpec;
pub use metrics::MetricResult;
pub use error::{Error, Result};
pub use sampling::{generate_batch, smote_big_k, smote_k, Sample, SmoteConfig, SmoteVariant};
