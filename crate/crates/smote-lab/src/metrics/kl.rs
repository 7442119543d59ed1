//! Histogram-based KL divergence against an analytic reference.

use super::{MetricName, MetricResult};
use crate::dist::{cdf, quantile, DistributionSpec};
use crate::error::{Error, Result};
use crate::sampling::Sample;

/// Additive smoothing mass applied to every bin before normalizing, so
/// empty bins never produce infinite ratios.
const SMOOTHING_EPS: f64 = 1e-10;

/// A binned probability mass function on the line.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    masses: Vec<f64>,
}

impl Histogram {
    /// Validates that `edges` are strictly increasing, `masses` are
    /// non-negative, one shorter than `edges`, and sum to 1 within 1e-12.
    pub fn new(edges: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::DomainError {
                reason: "histogram needs at least two edges".into(),
            });
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::DomainError {
                reason: "histogram edges must be strictly increasing".into(),
            });
        }
        if masses.len() + 1 != edges.len() {
            return Err(Error::DomainError {
                reason: format!(
                    "expected {} masses for {} edges, got {}",
                    edges.len() - 1,
                    edges.len(),
                    masses.len()
                ),
            });
        }
        if masses.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::DomainError {
                reason: "histogram masses must be non-negative".into(),
            });
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::DomainError {
                reason: format!("histogram masses sum to {total}, expected 1"),
            });
        }
        Ok(Histogram { edges, masses })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn n_bins(&self) -> usize {
        self.masses.len()
    }

    /// Bins `values` on `n_bins` equal-width bins over `[lo, hi]`, applies
    /// additive smoothing, and normalizes. Values must lie in `[lo, hi]`.
    fn from_values(values: &[f64], lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        let mut counts = vec![0.0f64; n_bins];
        let scale = n_bins as f64 / (hi - lo);
        for &x in values {
            let bin = (((x - lo) * scale) as usize).min(n_bins - 1);
            counts[bin] += 1.0;
        }
        let n = values.len() as f64;
        Self::smoothed(
            equal_width_edges(lo, hi, n_bins),
            counts.iter().map(|c| c / n).collect(),
        )
    }

    /// Normalizes `raw` masses (any non-negative weights) after adding the
    /// smoothing epsilon to every bin.
    fn smoothed(edges: Vec<f64>, raw: Vec<f64>) -> Result<Self> {
        let total: f64 = raw.iter().sum::<f64>() + SMOOTHING_EPS * raw.len() as f64;
        let masses: Vec<f64> = raw.iter().map(|m| (m + SMOOTHING_EPS) / total).collect();
        // renormalize once more so the constructor's 1e-12 sum check holds
        let sum: f64 = masses.iter().sum();
        Histogram::new(edges, masses.iter().map(|m| m / sum).collect())
    }
}

fn equal_width_edges(lo: f64, hi: f64, n_bins: usize) -> Vec<f64> {
    let width = (hi - lo) / n_bins as f64;
    let mut edges: Vec<f64> = (0..n_bins).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    edges
}

/// `sum_i p_i ln(p_i / q_i)` over two histograms on the same binning.
///
/// Bins with `p_i = 0` contribute nothing; a bin with `p_i > 0, q_i = 0`
/// makes the divergence infinite.
pub fn kl_divergence(p: &Histogram, q: &Histogram) -> Result<f64> {
    if p.edges != q.edges {
        return Err(Error::DomainError {
            reason: "KL divergence requires identical binnings".into(),
        });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.masses.iter().zip(&q.masses) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi / qi).ln();
    }
    Ok(total)
}

/// KL divergence of the empirical distribution of `z_sample` from the
/// analytic `spec`, both binned on a shared equal-width grid.
///
/// The grid spans the sample range extended to the reference's 0.001 and
/// 0.999 quantiles; both mass vectors are additively smoothed and
/// renormalized. Direction is KL(Z || X), recorded in the result meta.
pub fn kl_histogram(
    z_sample: &Sample,
    spec: &DistributionSpec,
    n_bins: usize,
) -> Result<MetricResult> {
    let values = z_sample.values_1d()?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if n_bins < 2 {
        return Err(Error::DomainError {
            reason: format!("KL histogram needs at least 2 bins, got {n_bins}"),
        });
    }
    let z_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let z_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if z_min == z_max {
        return Err(Error::DegenerateSupport {
            reason: format!("all {} z values equal {z_min}", values.len()),
        });
    }
    let lo = z_min.min(quantile(spec, 0.001)?);
    let hi = z_max.max(quantile(spec, 0.999)?);

    let p = Histogram::from_values(values, lo, hi, n_bins)?;
    let q_raw: Vec<f64> = p
        .edges()
        .windows(2)
        .map(|w| cdf(spec, w[1]) - cdf(spec, w[0]))
        .collect();
    let q = Histogram::smoothed(p.edges().to_vec(), q_raw)?;

    let value = kl_divergence(&p, &q)?;
    Ok(MetricResult::new(MetricName::Kl, value, values.len())
        .with_meta("direction", "KL(Z||X)")
        .with_meta("n_bins", n_bins)
        .with_meta("support_lo", lo)
        .with_meta("support_hi", hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::sample_iid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn histogram_constructor_validates() {
        assert!(Histogram::new(vec![0.0], vec![]).is_err());
        assert!(Histogram::new(vec![0.0, 0.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(Histogram::new(vec![0.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(Histogram::new(vec![0.0, 0.5, 1.0], vec![0.7, 0.7]).is_err());
        assert!(Histogram::new(vec![0.0, 0.5, 1.0], vec![-0.1, 1.1]).is_err());
        assert!(Histogram::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn identical_histograms_have_zero_divergence() {
        let h = Histogram::new(vec![0.0, 0.5, 1.0, 2.0], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(kl_divergence(&h, &h).unwrap(), 0.0);
    }

    #[test]
    fn two_bin_example_matches_direct_evaluation() {
        let p = Histogram::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.5]).unwrap();
        let q = Histogram::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.75]).unwrap();
        let kl = kl_divergence(&p, &q).unwrap();
        // 0.5 ln 2 + 0.5 ln(2/3)
        assert_abs_diff_eq!(kl, 0.14384103622589043, epsilon = 1e-12);
        assert_abs_diff_eq!(kl, 0.14384, epsilon = 1e-5);
    }

    #[test]
    fn zero_reference_bin_with_mass_is_infinite() {
        let p = Histogram::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.5]).unwrap();
        let q = Histogram::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(kl_divergence(&p, &q).unwrap(), f64::INFINITY);
    }

    #[test]
    fn mismatched_binnings_are_rejected() {
        let p = Histogram::new(vec![0.0, 0.5, 1.0], vec![0.5, 0.5]).unwrap();
        let q = Histogram::new(vec![0.0, 0.6, 1.0], vec![0.5, 0.5]).unwrap();
        assert!(kl_divergence(&p, &q).is_err());
    }

    #[test]
    fn uniform_draws_against_uniform_reference_are_close() {
        let z = sample_iid(&DistributionSpec::standard_uniform(), 1_000_000, 5);
        let r = kl_histogram(&z, &DistributionSpec::standard_uniform(), 50).unwrap();
        assert!(r.value < 0.001, "kl {}", r.value);
        assert!(r.value >= 0.0);
        assert_eq!(r.meta["direction"], "KL(Z||X)");
    }

    #[test]
    fn constant_sample_is_degenerate() {
        let z = Sample::from_values(&[0.5, 0.5, 0.5]).unwrap();
        assert!(matches!(
            kl_histogram(&z, &DistributionSpec::standard_uniform(), 50),
            Err(Error::DegenerateSupport { .. })
        ));
    }

    #[test]
    fn bin_count_and_empty_sample_are_validated() {
        let z = Sample::from_values(&[0.1, 0.9]).unwrap();
        assert!(kl_histogram(&z, &DistributionSpec::standard_uniform(), 1).is_err());
        let empty = Sample::new(vec![], 1).unwrap();
        assert!(matches!(
            kl_histogram(&empty, &DistributionSpec::standard_uniform(), 50),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn support_extends_to_reference_quantiles() {
        // a tight Gaussian sample still gets binned out to the 0.999 quantile
        let z = Sample::from_values(&[-0.01, 0.0, 0.01]).unwrap();
        let r = kl_histogram(&z, &DistributionSpec::standard_gaussian(), 10).unwrap();
        let lo: f64 = r.meta["support_lo"].parse().unwrap();
        let hi: f64 = r.meta["support_hi"].parse().unwrap();
        assert!(lo < -3.0 && hi > 3.0, "support [{lo}, {hi}]");
    }

    proptest! {
        #[test]
        fn prop_divergence_is_non_negative(
            raw_p in proptest::collection::vec(0.0f64..1.0, 8),
            raw_q in proptest::collection::vec(0.0f64..1.0, 8),
        ) {
            let edges: Vec<f64> = (0..=8).map(|i| i as f64).collect();
            let p = Histogram::smoothed(edges.clone(), raw_p).unwrap();
            let q = Histogram::smoothed(edges, raw_q).unwrap();
            let kl = kl_divergence(&p, &q).unwrap();
            prop_assert!(kl >= -1e-12, "kl {kl}");
        }
    }
}
