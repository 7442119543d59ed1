//! Monte Carlo check of the uniform order-statistic spacing identity
//! `E[U_(k+1) - U_(k)] = 1/(n+1)`.

use super::tag;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, DrawStream, UniformSource};
use rayon::prelude::*;

/// Trials per accumulation chunk. Chunk boundaries are fixed so the
/// sequential reduction over chunks is bitwise identical at any thread
/// count.
const CHUNK: usize = 256;

/// One (n, k) cell of the spacing table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRow {
    pub n: usize,
    /// Spacing index: the gap between the k-th and (k+1)-th order
    /// statistics, `1 <= k <= n-1`.
    pub k: usize,
    pub mean_spacing: f64,
    /// The identity's prediction, `1/(n+1)`.
    pub expected: f64,
    pub abs_dev: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone)]
pub struct SpacingResult {
    pub rows: Vec<SpacingRow>,
    pub trials: usize,
    pub seed: u64,
}

/// The sorted uniform draws behind one trial, exposed so the telescoping
/// property of the spacings can be checked against the runner's exact
/// inputs.
pub fn sorted_uniforms(n: usize, seed: u64, trial: u64) -> Vec<f64> {
    let child = derive_seed(seed, &[tag::SPACING, n as u64, trial]);
    let mut stream = DrawStream::new(child, 0);
    let mut values: Vec<f64> = (0..n).map(|_| stream.next_unit()).collect();
    values.sort_unstable_by(f64::total_cmp);
    values
}

/// Estimates every spacing mean at each `n` over `trials` repetitions and
/// reports the deviation from `1/(n+1)`.
pub fn run_spacing_check(n_values: &[usize], trials: usize, seed: u64) -> Result<SpacingResult> {
    if n_values.is_empty() {
        return Err(Error::config("n_values", "must not be empty"));
    }
    if let Some(&bad) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::config(
            "n_values",
            format!("a sample of size {bad} has no spacings; sizes must be at least 2"),
        ));
    }
    if trials < 1000 {
        return Err(Error::config(
            "trials",
            format!("spacing means need at least 1000 trials to be meaningful, got {trials}"),
        ));
    }

    let mut rows = Vec::new();
    for &n in n_values {
        let spacings = n - 1;
        let n_chunks = trials.div_ceil(CHUNK);
        // per chunk: per-k sums and sums of squares, accumulated in trial
        // order inside the chunk
        let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
            .into_par_iter()
            .map(|chunk_idx| {
                let first = chunk_idx * CHUNK;
                let last = (first + CHUNK).min(trials);
                let mut sums = vec![0.0f64; spacings];
                let mut sumsqs = vec![0.0f64; spacings];
                for trial in first..last {
                    let sorted = sorted_uniforms(n, seed, trial as u64);
                    for k in 0..spacings {
                        let gap = sorted[k + 1] - sorted[k];
                        sums[k] += gap;
                        sumsqs[k] += gap * gap;
                    }
                }
                (sums, sumsqs)
            })
            .collect();

        let mut sums = vec![0.0f64; spacings];
        let mut sumsqs = vec![0.0f64; spacings];
        for (s, sq) in &partials {
            for k in 0..spacings {
                sums[k] += s[k];
                sumsqs[k] += sq[k];
            }
        }

        let t = trials as f64;
        let expected = 1.0 / (n as f64 + 1.0);
        for k in 0..spacings {
            let mean = sums[k] / t;
            let var = (sumsqs[k] - t * mean * mean) / (t - 1.0);
            rows.push(SpacingRow {
                n,
                k: k + 1,
                mean_spacing: mean,
                expected,
                abs_dev: (mean - expected).abs(),
                std_error: (var.max(0.0) / t).sqrt(),
            });
        }
    }
    Ok(SpacingResult {
        rows,
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_configs() {
        assert!(run_spacing_check(&[], 2000, 1).is_err());
        assert!(run_spacing_check(&[1, 9], 2000, 1).is_err());
        assert!(run_spacing_check(&[9], 999, 1).is_err());
    }

    #[test]
    fn spacing_means_match_the_identity_at_n_nine() {
        let r = run_spacing_check(&[9], 2000, 11).unwrap();
        assert_eq!(r.rows.len(), 8);
        for row in &r.rows {
            assert_eq!(row.expected, 0.1);
            assert!(
                row.abs_dev <= 4.0 * row.std_error,
                "k={}: mean {} is {} from 0.1 with se {}",
                row.k,
                row.mean_spacing,
                row.abs_dev,
                row.std_error
            );
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_spacing_check(&[5, 9], 1000, 3).unwrap();
        let b = run_spacing_check(&[5, 9], 1000, 3).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn telescoping_holds_per_trial() {
        for trial in 0..200 {
            let sorted = sorted_uniforms(9, 11, trial);
            let gap_sum: f64 = sorted.windows(2).map(|w| w[1] - w[0]).sum();
            let span = sorted[8] - sorted[0];
            assert!(
                (gap_sum - span).abs() < 1e-12,
                "trial {trial}: {gap_sum} vs {span}"
            );
        }
    }

    #[test]
    fn abs_dev_is_consistent_with_mean_and_expected() {
        let r = run_spacing_check(&[5], 1000, 9).unwrap();
        for row in &r.rows {
            assert_eq!(row.abs_dev, (row.mean_spacing - row.expected).abs());
        }
    }
}
