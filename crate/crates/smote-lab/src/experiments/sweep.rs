//! Distance sweeps over a grid of sample sizes and neighbor ranks.

use super::{mean_and_std_error, subsample_without_replacement, tag};
use crate::dist::{sample_iid, DistributionSpec};
use crate::error::{Error, Result};
use crate::metrics::{kl_histogram, ks_one_sample, ks_two_sample, wasserstein1, MetricName};
use crate::rng::derive_seed;
use crate::sampling::{generate_batch, Sample, SmoteConfig};
use rayon::prelude::*;

/// Size of the fixed reference draw used as the two-sample comparison
/// target for analytic sources.
const REFERENCE_DRAW: usize = 100_000;

/// Bin count for the KL sweep estimator.
const KL_BINS: usize = 50;

/// Synthetic draws taken from each fresh base sample when estimating the
/// marginal distribution of Z (KL sweeps and density overlays).
pub(crate) const MARGINAL_GROUP: usize = 10;

/// Where base samples come from.
#[derive(Debug, Clone)]
pub enum SweepSource {
    /// Draw fresh i.i.d. base samples from an analytic family.
    Analytic(DistributionSpec),
    /// Subsample a fixed data series without replacement.
    Series { label: String, data: Sample },
}

impl SweepSource {
    pub fn label(&self) -> String {
        match self {
            SweepSource::Analytic(spec) => spec.to_string(),
            SweepSource::Series { label, .. } => label.clone(),
        }
    }

    fn analytic(&self) -> Option<&DistributionSpec> {
        match self {
            SweepSource::Analytic(spec) => Some(spec),
            SweepSource::Series { .. } => None,
        }
    }
}

/// Full description of one sweep; a sweep result is a pure function of
/// this value.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub source: SweepSource,
    pub n_grid: Vec<usize>,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub draws_per_trial: usize,
    pub metric: MetricName,
    pub seed: u64,
    /// Replace synthetic draws by the reference itself; distances must
    /// come out exactly zero. Plumbing check, two-sample metrics only.
    pub calibration: bool,
}

/// One (n, k) cell: mean distance and its standard error over the trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// All rows of a sweep in (n outer, k inner) order, with the config echo.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub config: SweepConfig,
}

impl SweepResult {
    /// The row for one (n, k) cell.
    pub fn row(&self, n: usize, k: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.n == n && r.k == k)
    }

    /// Means along the n grid for one k, in grid order.
    pub fn means_for_k(&self, k: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.k == k).map(|r| r.mean).collect()
    }
}

fn validate_common(config: &SweepConfig) -> Result<()> {
    if config.n_grid.is_empty() {
        return Err(Error::config("n_grid", "must not be empty"));
    }
    if !config.n_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::config("n_grid", "must be strictly ascending"));
    }
    let n_min = config.n_grid[0];
    if n_min < 2 {
        return Err(Error::config("n_grid", "sample sizes must be at least 2"));
    }
    if config.k_values.is_empty() {
        return Err(Error::config("k_values", "must not be empty"));
    }
    if let Some(&bad) = config.k_values.iter().find(|&&k| k == 0 || k >= n_min) {
        return Err(Error::config(
            "k_values",
            format!("rank {bad} must satisfy 1 <= k <= n-1 for every n in the grid (min n is {n_min})"),
        ));
    }
    if config.trials == 0 {
        return Err(Error::config("trials", "must be at least 1"));
    }
    if config.draws_per_trial == 0 {
        return Err(Error::config("draws_per_trial", "must be at least 1"));
    }
    if let SweepSource::Series { data, .. } = &config.source {
        if data.dim() != 1 {
            return Err(Error::NotOneDimensional { dim: data.dim() });
        }
        let needed = *config.n_grid.last().expect("non-empty grid");
        if data.len() < needed {
            return Err(Error::InsufficientData {
                needed,
                available: data.len(),
            });
        }
    }
    Ok(())
}

/// KS distance sweep: two-sample against a fixed reference (the full
/// series, or a 100k-point draw for analytic sources), or one-sample
/// against the analytic CDF.
pub fn run_ks_sweep(config: SweepConfig) -> Result<SweepResult> {
    match config.metric {
        MetricName::Ks2 => {}
        MetricName::Ks1 => {
            if config.source.analytic().is_none() {
                return Err(Error::config(
                    "metric",
                    "one-sample KS needs an analytic source to compare against",
                ));
            }
        }
        other => {
            return Err(Error::config(
                "metric",
                format!("KS sweep supports KS1 or KS2, got {other}"),
            ))
        }
    }
    run_distance_sweep(config)
}

/// Wasserstein-1 sweep against the same reference scheme as the KS sweep.
/// Series sources must already be normalized to [0, 1].
pub fn run_wasserstein_sweep(config: SweepConfig) -> Result<SweepResult> {
    if config.metric != MetricName::W1 {
        return Err(Error::config(
            "metric",
            format!("Wasserstein sweep requires metric W1, got {}", config.metric),
        ));
    }
    if let SweepSource::Series { data, .. } = &config.source {
        let values = data.values_1d()?;
        let out_of_range = values.iter().any(|&x| !(0.0..=1.0).contains(&x));
        if out_of_range {
            return Err(Error::config(
                "source",
                "series values must be normalized to [0, 1] before a Wasserstein sweep",
            ));
        }
    }
    run_distance_sweep(config)
}

fn run_distance_sweep(config: SweepConfig) -> Result<SweepResult> {
    validate_common(&config)?;
    if config.calibration && config.metric == MetricName::Ks1 {
        return Err(Error::config(
            "calibration",
            "calibration mode is defined for two-sample metrics only",
        ));
    }

    let reference: Option<Sample> = match config.metric {
        MetricName::Ks2 | MetricName::W1 => Some(match &config.source {
            SweepSource::Analytic(spec) => sample_iid(
                spec,
                REFERENCE_DRAW,
                derive_seed(config.seed, &[tag::REFERENCE]),
            ),
            SweepSource::Series { data, .. } => data.clone(),
        }),
        _ => None,
    };

    if config.calibration {
        let r = reference.as_ref().expect("two-sample metric checked above");
        let mut rows = Vec::new();
        for &n in &config.n_grid {
            for &k in &config.k_values {
                let value = distance_to_reference(&config, r, r)?;
                rows.push(SweepRow {
                    n,
                    k,
                    mean: value,
                    std_error: 0.0,
                    trials: 1,
                });
            }
        }
        return Ok(SweepResult { rows, config });
    }

    let items = enumerate_items(&config);
    let values: Vec<f64> = items
        .par_iter()
        .map(|&(n, k, trial)| {
            let synth = synthetic_batch(&config, n, k, trial)?;
            match config.metric {
                MetricName::Ks1 => {
                    let spec = config.source.analytic().expect("validated analytic");
                    Ok(ks_one_sample(&synth, spec)?.value)
                }
                _ => distance_to_reference(
                    &config,
                    &synth,
                    reference.as_ref().expect("two-sample metric"),
                ),
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(SweepResult {
        rows: aggregate_rows(&config, &values),
        config,
    })
}

/// KL sweep: for each trial, the marginal of Z is sampled by drawing small
/// groups of synthetic points from fresh base samples, then binned against
/// the analytic reference.
pub fn run_kl_sweep(config: SweepConfig) -> Result<SweepResult> {
    if config.metric != MetricName::Kl {
        return Err(Error::config(
            "metric",
            format!("KL sweep requires metric KL, got {}", config.metric),
        ));
    }
    let Some(&spec) = config.source.analytic() else {
        return Err(Error::config(
            "source",
            "KL sweep compares against an analytic density; series sources are not supported",
        ));
    };
    if config.calibration {
        return Err(Error::config(
            "calibration",
            "calibration mode is defined for two-sample metrics only",
        ));
    }
    validate_common(&config)?;

    let items = enumerate_items(&config);
    let values: Vec<f64> = items
        .par_iter()
        .map(|&(n, k, trial)| {
            let z = marginal_z_draws(
                &spec,
                n,
                k,
                config.draws_per_trial,
                config.seed,
                &[tag::KL_BASE, tag::KL_SYNTH],
                trial,
            )?;
            Ok(kl_histogram(&z, &spec, KL_BINS)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(SweepResult {
        rows: aggregate_rows(&config, &values),
        config,
    })
}

/// Draws `count` synthetic points whose base samples are refreshed every
/// [`MARGINAL_GROUP`] draws, so the pool estimates the marginal of Z under
/// resampling of the base.
pub(crate) fn marginal_z_draws(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    count: usize,
    seed: u64,
    tags: &[u64; 2],
    trial: u64,
) -> Result<Sample> {
    let mut z = Vec::with_capacity(count);
    let mut group = 0u64;
    while z.len() < count {
        let take = MARGINAL_GROUP.min(count - z.len());
        let path = [tags[0], n as u64, k as u64, trial, group];
        let base = sample_iid(spec, n, derive_seed(seed, &path));
        let synth_path = [tags[1], n as u64, k as u64, trial, group];
        let synth_seed = derive_seed(seed, &synth_path);
        let batch = generate_batch(&base, &SmoteConfig::fixed_rank(k, synth_seed), take)?;
        z.extend_from_slice(batch.flat());
        group += 1;
    }
    Sample::new(z, 1)
}

fn enumerate_items(config: &SweepConfig) -> Vec<(usize, usize, u64)> {
    let mut items = Vec::with_capacity(config.n_grid.len() * config.k_values.len() * config.trials);
    for &n in &config.n_grid {
        for &k in &config.k_values {
            for trial in 0..config.trials as u64 {
                items.push((n, k, trial));
            }
        }
    }
    items
}

fn synthetic_batch(config: &SweepConfig, n: usize, k: usize, trial: u64) -> Result<Sample> {
    let base_seed = derive_seed(config.seed, &[tag::BASE, n as u64, k as u64, trial]);
    let base = match &config.source {
        SweepSource::Analytic(spec) => sample_iid(spec, n, base_seed),
        SweepSource::Series { data, .. } => subsample_without_replacement(data, n, base_seed),
    };
    let synth_seed = derive_seed(config.seed, &[tag::SYNTH, n as u64, k as u64, trial]);
    generate_batch(
        &base,
        &SmoteConfig::fixed_rank(k, synth_seed),
        config.draws_per_trial,
    )
}

fn distance_to_reference(config: &SweepConfig, sample: &Sample, reference: &Sample) -> Result<f64> {
    Ok(match config.metric {
        MetricName::Ks2 => ks_two_sample(sample, reference)?.value,
        MetricName::W1 => wasserstein1(sample, reference)?.value,
        other => unreachable!("distance_to_reference called with {other}"),
    })
}

/// Groups the flat per-item values (trial innermost) back into one row per
/// (n, k) cell, reducing sequentially in enumeration order.
fn aggregate_rows(config: &SweepConfig, values: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(config.n_grid.len() * config.k_values.len());
    let mut offset = 0;
    for &n in &config.n_grid {
        for &k in &config.k_values {
            let cell = &values[offset..offset + config.trials];
            offset += config.trials;
            let (mean, std_error) = mean_and_std_error(cell);
            rows.push(SweepRow {
                n,
                k,
                mean,
                std_error,
                trials: config.trials,
            });
        }
    }
    rows
}
