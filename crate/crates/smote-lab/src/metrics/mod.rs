//! Statistical distances between 1-D samples and reference distributions:
//! Kolmogorov-Smirnov (one- and two-sample), empirical Wasserstein-1,
//! histogram KL divergence, and a Gaussian kernel density estimator for
//! overlay plots.
//!
//! Every function here is a pure function of its inputs; all suprema and
//! integrals over empirical CDFs are computed exactly over the sorted
//! support, not on a grid.

mod kde;
mod kl;
mod ks;
mod wasserstein;

pub use kde::{kde_density, kde_density_with_bandwidth, silverman_bandwidth};
pub use kl::{kl_divergence, kl_histogram, Histogram};
pub use ks::{ks_one_sample, ks_two_sample};
pub use wasserstein::wasserstein1;

use std::collections::BTreeMap;
use std::fmt;

/// Which distance a [`MetricResult`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Ks1,
    Ks2,
    W1,
    Kl,
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MetricName::Ks1 => "KS1",
            MetricName::Ks2 => "KS2",
            MetricName::W1 => "W1",
            MetricName::Kl => "KL",
        };
        f.write_str(s)
    }
}

/// A computed distance with its provenance.
///
/// `value` is non-negative; KS values additionally lie in [0, 1]. `n` is
/// the size of the (first) sample; anything else worth recording lands in
/// `meta` under stable keys.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    pub name: MetricName,
    pub value: f64,
    pub n: usize,
    pub meta: BTreeMap<String, String>,
}

impl MetricResult {
    pub(crate) fn new(name: MetricName, value: f64, n: usize) -> Self {
        MetricResult {
            name,
            value,
            n,
            meta: BTreeMap::new(),
        }
    }

    pub(crate) fn with_meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }
}
