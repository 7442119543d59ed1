//! Monte Carlo check that the tail probability of the rank-k neighbor
//! distance is monotone in k.

use super::tag;
use crate::dist::{sample_iid, DistributionSpec};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sampling::neighbor_ordering;
use rayon::prelude::*;

/// Description of one tail-probability run.
#[derive(Debug, Clone)]
pub struct TailProbConfig {
    pub spec: DistributionSpec,
    /// Base sample size per trial.
    pub n: usize,
    /// Neighbor ranks to evaluate, strictly ascending.
    pub k_values: Vec<usize>,
    /// Distance threshold.
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Estimated `P(D_(k) >= epsilon)` for one rank.
#[derive(Debug, Clone, PartialEq)]
pub struct TailProbRow {
    pub k: usize,
    pub exceed_count: usize,
    pub p_hat: f64,
}

#[derive(Debug, Clone)]
pub struct TailProbResult {
    pub rows: Vec<TailProbRow>,
    pub config: TailProbConfig,
}

/// Estimates the tail probability of the distance from a fixed base point
/// to its rank-k neighbor, for every configured k.
///
/// All ranks are evaluated on the same trials, so the estimates inherit
/// the pointwise ordering `D_(k) <= D_(k+1)` exactly: the reported
/// probabilities are non-decreasing in k in every run, not just in
/// expectation.
pub fn run_tail_prob_check(config: TailProbConfig) -> Result<TailProbResult> {
    if config.n < 2 {
        return Err(Error::config("n", "needs at least 2 points per trial"));
    }
    if config.k_values.is_empty() {
        return Err(Error::config("k_values", "must not be empty"));
    }
    if !config.k_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::config("k_values", "must be strictly ascending"));
    }
    let k_max = *config.k_values.last().expect("non-empty");
    if config.k_values[0] == 0 || k_max > config.n - 1 {
        return Err(Error::config(
            "k_values",
            format!("ranks must satisfy 1 <= k <= n-1 = {}", config.n - 1),
        ));
    }
    if !(config.epsilon > 0.0 && config.epsilon.is_finite()) {
        return Err(Error::config("epsilon", "must be positive and finite"));
    }
    if config.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }

    // per trial: one bit per configured rank, true when D_(k) >= epsilon
    let indicator_rows: Vec<Vec<bool>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let child = derive_seed(config.seed, &[tag::TAIL, trial]);
            let base = sample_iid(&config.spec, config.n, child);
            let distances = neighbor_ordering(&base, 0)
                .expect("n >= 2 validated")
                .distances()
                .to_vec();
            config
                .k_values
                .iter()
                .map(|&k| distances[k - 1] >= config.epsilon)
                .collect()
        })
        .collect();

    let rows = config
        .k_values
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let exceed_count = indicator_rows.iter().filter(|row| row[idx]).count();
            TailProbRow {
                k,
                exceed_count,
                p_hat: exceed_count as f64 / config.trials as f64,
            }
        })
        .collect();

    Ok(TailProbResult { rows, config })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> TailProbConfig {
        TailProbConfig {
            spec: DistributionSpec::standard_uniform(),
            n: 30,
            k_values: vec![1, 3, 7, 13],
            epsilon: 0.12,
            trials: 500,
            seed: 21,
        }
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = base_config();
        c.k_values = vec![3, 1];
        assert!(run_tail_prob_check(c).is_err());

        let mut c = base_config();
        c.k_values = vec![1, 30];
        assert!(run_tail_prob_check(c).is_err(), "k must stay below n");

        let mut c = base_config();
        c.epsilon = 0.0;
        assert!(run_tail_prob_check(c).is_err());

        let mut c = base_config();
        c.n = 1;
        assert!(run_tail_prob_check(c).is_err());
    }

    #[test]
    fn shared_trials_make_the_estimates_monotone_exactly() {
        let r = run_tail_prob_check(base_config()).unwrap();
        for pair in r.rows.windows(2) {
            assert!(
                pair[0].exceed_count <= pair[1].exceed_count,
                "k={} count {} exceeds k={} count {}",
                pair[0].k,
                pair[0].exceed_count,
                pair[1].k,
                pair[1].exceed_count
            );
        }
        // interior ranks at this epsilon are neither all-0 nor all-1
        assert!(r.rows.last().unwrap().p_hat > 0.0);
    }

    #[test]
    fn wide_threshold_on_dense_sample_is_never_exceeded() {
        let c = TailProbConfig {
            spec: DistributionSpec::standard_uniform(),
            n: 100,
            k_values: vec![1],
            epsilon: 0.5,
            trials: 400,
            seed: 5,
        };
        let r = run_tail_prob_check(c).unwrap();
        assert!(r.rows[0].p_hat < 0.01);
        assert_eq!(r.rows[0].exceed_count, 0);
    }

    #[test]
    fn threshold_beyond_support_diameter_gives_zero_everywhere() {
        let mut c = base_config();
        c.epsilon = 1.5;
        let r = run_tail_prob_check(c).unwrap();
        assert!(r.rows.iter().all(|row| row.exceed_count == 0));
    }

    #[test]
    fn runs_are_deterministic() {
        let a = run_tail_prob_check(base_config()).unwrap();
        let b = run_tail_prob_check(base_config()).unwrap();
        assert_eq!(a.rows, b.rows);
    }
}
