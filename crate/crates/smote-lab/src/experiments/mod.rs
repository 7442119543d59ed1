//! Monte Carlo studies of how synthetic draws converge toward the
//! population they are generated from.
//!
//! Four families of runs are provided: distance sweeps over a grid of
//! sample sizes and neighbor ranks ([`run_ks_sweep`], [`run_wasserstein_sweep`],
//! [`run_kl_sweep`]), density overlays for visual comparison
//! ([`run_density_overlay`]), a uniform order-statistic spacing check
//! ([`run_spacing_check`]), and a neighbor-distance tail-probability check
//! ([`run_tail_prob_check`]).
//!
//! Every run is a pure function of its configuration: all randomness flows
//! from the config seed through [`crate::rng::derive_seed`] with fixed
//! purpose tags, work items are enumerated in a fixed order, and parallel
//! results are collected back into that order before any reduction, so
//! re-runs are bitwise identical at any thread count.

mod overlay;
mod spacing;
mod sweep;
mod tailprob;

pub use overlay::{run_density_overlay, OverlayCurve, OverlayResult};
pub use spacing::{run_spacing_check, sorted_uniforms, SpacingResult, SpacingRow};
pub use sweep::{
    run_kl_sweep, run_ks_sweep, run_wasserstein_sweep, SweepConfig, SweepResult, SweepRow,
    SweepSource,
};
pub use tailprob::{run_tail_prob_check, TailProbConfig, TailProbResult, TailProbRow};

use crate::rng::{unit_to_index, DrawStream, UniformSource};
use crate::sampling::Sample;

/// Purpose tags for seed derivation. Each distinct stochastic role inside
/// a run hangs off its own tag so streams never collide.
pub(crate) mod tag {
    pub const REFERENCE: u64 = 1;
    pub const BASE: u64 = 2;
    pub const SYNTH: u64 = 3;
    pub const SPACING: u64 = 4;
    pub const TAIL: u64 = 5;
    pub const OVERLAY_BASE: u64 = 6;
    pub const OVERLAY_SYNTH: u64 = 7;
    pub const KL_BASE: u64 = 8;
    pub const KL_SYNTH: u64 = 9;
}

/// Mean and standard error of the mean; a single observation has zero
/// standard error.
pub(crate) fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

/// Draws an n-point subset of `series` without replacement via a partial
/// Fisher-Yates shuffle on the index set, deterministically per seed.
pub(crate) fn subsample_without_replacement(series: &Sample, n: usize, seed: u64) -> Sample {
    let len = series.len();
    debug_assert!(n <= len);
    let mut indices: Vec<usize> = (0..len).collect();
    let mut stream = DrawStream::new(seed, 0);
    let mut data = Vec::with_capacity(n * series.dim());
    for i in 0..n {
        let j = i + unit_to_index(stream.next_unit(), len - i);
        indices.swap(i, j);
        data.extend_from_slice(series.point(indices[i]));
    }
    Sample::new(data, series.dim()).expect("subset of a valid sample")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mean_and_std_error_of_known_values() {
        let (mean, se) = mean_and_std_error(&[1.0, 2.0, 3.0, 4.0]);
        assert_abs_diff_eq!(mean, 2.5, epsilon = 1e-12);
        // sample variance 5/3, se = sqrt(5/12)
        assert_abs_diff_eq!(se, (5.0f64 / 12.0).sqrt(), epsilon = 1e-12);
        let (single, zero) = mean_and_std_error(&[7.0]);
        assert_eq!(single, 7.0);
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn subsample_draws_distinct_points() {
        let series = Sample::from_values(&(0..100).map(f64::from).collect::<Vec<_>>()).unwrap();
        let sub = subsample_without_replacement(&series, 30, 7);
        assert_eq!(sub.len(), 30);
        let mut values = sub.values_1d().unwrap().to_vec();
        values.sort_unstable_by(f64::total_cmp);
        values.dedup();
        assert_eq!(values.len(), 30, "subset must not repeat points");
        assert_eq!(
            sub,
            subsample_without_replacement(&series, 30, 7),
            "same seed must reproduce the subset"
        );
        assert_ne!(sub, subsample_without_replacement(&series, 30, 8));
    }

    #[test]
    fn subsample_of_full_length_is_a_permutation() {
        let series = Sample::from_values(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let sub = subsample_without_replacement(&series, 5, 3);
        let mut values = sub.values_1d().unwrap().to_vec();
        values.sort_unstable_by(f64::total_cmp);
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }
}
