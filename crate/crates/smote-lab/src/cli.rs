//! Command-line front end: every experiment as a subcommand.
//!
//! Each subcommand can be driven by flags, by a JSON config file, or both;
//! flags always win on conflict. Validation collects every failure before
//! reporting, and every run writes a provenance sidecar that is itself a
//! valid config file reproducing the run byte for byte.
//!
//! Exit codes: 0 success, 1 flag or config validation failure, 2 runtime
//! failure (missing files, degenerate data, I/O).

use crate::data_io::{
    format_sig, load_column, normalize_minmax, render_line_plot, write_spacing_csv,
    write_sweep_csv, write_tailprob_csv, ColumnSelector, DatasetRef, PlotSeries, PlotSpec,
};
use crate::dist::DistributionSpec;
use crate::error::{Error, FieldError, Result};
use crate::experiments::{
    run_density_overlay, run_kl_sweep, run_ks_sweep, run_spacing_check, run_tail_prob_check,
    run_wasserstein_sweep, tag, OverlayResult, SpacingResult, SweepConfig, SweepResult,
    SweepSource, TailProbConfig, TailProbResult,
};
use crate::metrics::MetricName;
use crate::rng::derive_seed;
use crate::sampling::{generate_batch, SmoteConfig, SmoteVariant};
use clap::{Args, CommandFactory, FromArgMatches};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_TRIALS: usize = 50;
const DEFAULT_DRAWS: usize = 2000;
const DEFAULT_N_GRID: [usize; 4] = [8, 20, 70, 200];
const DEFAULT_K_VALUES: [usize; 2] = [1, 5];
const DEFAULT_SPACING_N: [usize; 3] = [9, 49, 99];
const DEFAULT_SPACING_TRIALS: usize = 100_000;
const DEFAULT_TAIL_TRIALS: usize = 10_000;
const DEFAULT_TAIL_N: usize = 50;
const DEFAULT_TAIL_EPSILON: f64 = 0.1;
const DEFAULT_OVERLAY_N: [usize; 3] = [8, 20, 70];
const DEFAULT_GRID_POINTS: usize = 201;
const DEFAULT_SAMPLE_N: usize = 20;
const DEFAULT_SAMPLE_COUNT: usize = 10;
const PROVENANCE_FILE: &str = "provenance.json";

/// The KL n grid used when none is given: 8, 12, ..., 72.
fn default_kl_grid() -> Vec<usize> {
    (8..=72).step_by(4).collect()
}

// ---------------------------------------------------------------------------
// Flag definitions. Every value flag is an Option so that "not given on the
// command line" is distinguishable from "given"; defaults live in the
// validation layer and are documented in the help strings.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Args)]
struct CommonFlags {
    /// JSON config file; explicit flags override its fields
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV/SVG/provenance outputs [default: .]
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Worker thread cap; also settable via SMOTE_LAB_THREADS
    /// [default: machine parallelism]. Never affects results.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct SourceFlags {
    /// Reference distribution: uniform, gaussian, or exponential
    /// [default: uniform]
    #[arg(long, value_name = "KIND")]
    dist: Option<String>,
    /// Distribution parameters, comma separated (a,b for uniform;
    /// mean,std for gaussian; rate for exponential)
    /// [default: 0,1 / 0,1 / 1]
    #[arg(
        long,
        value_name = "P,..",
        value_delimiter = ',',
        requires = "dist",
        allow_negative_numbers = true
    )]
    dist_params: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
struct DataFlags {
    /// Delimited text file to use as the base data (instead of --dist)
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    /// Column in --data, by header name or 0-based index
    #[arg(long, value_name = "NAME")]
    column: Option<String>,
    /// Field delimiter in --data [default: ,]
    #[arg(long, value_name = "CHAR")]
    delimiter: Option<char>,
    /// Parse decimal commas (2,6 means 2.6) in --data
    #[arg(long)]
    decimal_comma: bool,
    /// Drop rows of --data equal to this value
    #[arg(long, value_name = "VALUE", allow_negative_numbers = true)]
    missing_sentinel: Option<f64>,
    /// Min-max normalize the loaded column onto [0, 1]
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Clone, Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    source: SourceFlags,
    #[command(flatten)]
    data: DataFlags,
    /// Base sample size drawn from --dist [default: 20]
    #[arg(long)]
    n: Option<usize>,
    /// Neighbor rank (fixed_rank) or pool size (random_from_pool)
    /// [default: 1]
    #[arg(long)]
    k: Option<usize>,
    /// Number of synthetic values to generate [default: 10]
    #[arg(long)]
    count: Option<usize>,
    /// Neighbor choice: fixed_rank or random_from_pool
    /// [default: fixed_rank]
    #[arg(long, value_name = "VARIANT")]
    variant: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    source: SourceFlags,
    #[command(flatten)]
    data: DataFlags,
    /// Base sample sizes, comma separated, strictly ascending
    /// [default: 8,20,70,200]
    #[arg(long, value_name = "N,..", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Neighbor ranks, comma separated [default: 1,5]
    #[arg(long, value_name = "K,..", value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Monte Carlo trials per (n, k) cell [default: 50]
    #[arg(long)]
    trials: Option<usize>,
    /// Synthetic draws per trial [default: 2000]
    #[arg(long)]
    draws_per_trial: Option<usize>,
    /// Score the reference against itself; distances must be exactly zero
    #[arg(long)]
    calibration: bool,
    /// Compare against the analytic CDF instead of a reference draw
    /// (ks-sweep only)
    #[arg(long)]
    one_sample: bool,
}

#[derive(Debug, Clone, Args)]
struct KlSweepArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    source: SourceFlags,
    /// Base sample sizes, comma separated, strictly ascending
    /// [default: 8,12,16,...,72]
    #[arg(long, value_name = "N,..", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Neighbor ranks, comma separated [default: 1,5]
    #[arg(long, value_name = "K,..", value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Monte Carlo trials per (n, k) cell [default: 50]
    #[arg(long)]
    trials: Option<usize>,
    /// Synthetic draws per trial [default: 2000]
    #[arg(long)]
    draws_per_trial: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct OverlayArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    source: SourceFlags,
    /// Base sample sizes to overlay, comma separated [default: 8,20,70]
    #[arg(long, value_name = "N,..", value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Neighbor rank [default: 1]
    #[arg(long)]
    k: Option<usize>,
    /// Synthetic draws per curve [default: 2000]
    #[arg(long)]
    draws: Option<usize>,
    /// Left edge of the density grid [default: near the 0.001 quantile]
    #[arg(long, allow_negative_numbers = true)]
    grid_lo: Option<f64>,
    /// Right edge of the density grid [default: near the 0.999 quantile]
    #[arg(long, allow_negative_numbers = true)]
    grid_hi: Option<f64>,
    /// Number of grid points [default: 201]
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct SpacingArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Sample sizes to check, comma separated [default: 9,49,99]
    #[arg(long = "n", value_name = "N,..", value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Monte Carlo trials [default: 100000]
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct TailProbArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    source: SourceFlags,
    /// Base sample size [default: 50]
    #[arg(long)]
    n: Option<usize>,
    /// Neighbor ranks, comma separated, strictly ascending
    /// [default: 1,2,...,10]
    #[arg(long, value_name = "K,..", value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    /// Distance threshold [default: 0.1]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo trials [default: 10000]
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Clone, clap::Subcommand)]
enum Command {
    /// Generate synthetic values and print them
    Sample(SampleArgs),
    /// Sweep the KS distance between synthetic draws and a reference
    /// over an (n, k) grid
    KsSweep(SweepArgs),
    /// Sweep the Wasserstein-1 distance over an (n, k) grid
    W1Sweep(SweepArgs),
    /// Sweep the histogram KL divergence over an (n, k) grid
    KlSweep(KlSweepArgs),
    /// Overlay synthetic-draw density estimates on the reference pdf
    Overlay(OverlayArgs),
    /// Check the mean uniform order-statistic spacing against 1/(n+1)
    SpacingCheck(SpacingArgs),
    /// Estimate neighbor-distance tail probabilities, monotone in k
    TailprobCheck(TailProbArgs),
}

#[derive(Debug, clap::Parser)]
#[command(
    name = "smote-lab",
    version,
    about = "Deterministic synthetic sampling and distance experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

// ---------------------------------------------------------------------------
// Raw config: the JSON schema. Every field optional; the same struct is
// what a provenance sidecar contains, with every applicable field filled.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    dist: Option<DistributionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    data: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delimiter: Option<char>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimal_comma: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    missing_sentinel: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_grid: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_values: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_values: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    draws_per_trial: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    calibration: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    one_sample: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    draws: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_dir: Option<String>,
    params: RawParams,
}

impl RawParams {
    /// Names of the fields that are set, for checking a config against the
    /// parameter set its command actually accepts.
    fn set_fields(&self) -> Vec<&'static str> {
        let mut set = Vec::new();
        macro_rules! probe {
            ($($field:ident),*) => {
                $(if self.$field.is_some() { set.push(stringify!($field)); })*
            };
        }
        probe!(
            dist, data, column, delimiter, decimal_comma, missing_sentinel, normalize, n, k,
            count, variant, n_grid, k_values, n_values, trials, draws_per_trial, calibration,
            one_sample, draws, grid_lo, grid_hi, grid_points, epsilon
        );
        set
    }
}

// ---------------------------------------------------------------------------
// Normalized config: every default filled in, every value validated.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Sample,
    KsSweep,
    W1Sweep,
    KlSweep,
    Overlay,
    SpacingCheck,
    TailprobCheck,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Sample => "sample",
            CommandKind::KsSweep => "ks-sweep",
            CommandKind::W1Sweep => "w1-sweep",
            CommandKind::KlSweep => "kl-sweep",
            CommandKind::Overlay => "overlay",
            CommandKind::SpacingCheck => "spacing-check",
            CommandKind::TailprobCheck => "tailprob-check",
        }
    }

    fn from_str(s: &str) -> Option<Self> {
        Some(match s {
            "sample" => CommandKind::Sample,
            "ks-sweep" => CommandKind::KsSweep,
            "w1-sweep" => CommandKind::W1Sweep,
            "kl-sweep" => CommandKind::KlSweep,
            "overlay" => CommandKind::Overlay,
            "spacing-check" => CommandKind::SpacingCheck,
            "tailprob-check" => CommandKind::TailprobCheck,
            _ => return None,
        })
    }
}

/// Where base data comes from: an analytic family or a dataset column.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceParams {
    Dist(DistributionSpec),
    Data {
        path: PathBuf,
        column: ColumnSelector,
        delimiter: char,
        decimal_comma: bool,
        missing_sentinel: Option<f64>,
        normalize: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleParams {
    pub source: SourceParams,
    /// Base sample size; set for analytic sources, None for data sources
    /// where the whole cleaned column is the base sample.
    pub n: Option<usize>,
    pub k: usize,
    pub count: usize,
    pub variant: SmoteVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub source: SourceParams,
    pub n_grid: Vec<usize>,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub draws_per_trial: usize,
    pub calibration: bool,
    pub one_sample: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlSweepParams {
    pub spec: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub draws_per_trial: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayParams {
    pub spec: DistributionSpec,
    pub n_values: Vec<usize>,
    pub k: usize,
    pub draws: usize,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacingParams {
    pub n_values: Vec<usize>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailProbParams {
    pub spec: DistributionSpec,
    pub n: usize,
    pub k_values: Vec<usize>,
    pub epsilon: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandParams {
    Sample(SampleParams),
    KsSweep(SweepParams),
    W1Sweep(SweepParams),
    KlSweep(KlSweepParams),
    Overlay(OverlayParams),
    SpacingCheck(SpacingParams),
    TailprobCheck(TailProbParams),
}

/// A fully validated run description: command, parameters with all
/// defaults filled, seed, and output directory. A run is a pure function
/// of this value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub params: CommandParams,
}

// ---------------------------------------------------------------------------
// Validation. All checks run and every failure is reported, not just the
// first.
// ---------------------------------------------------------------------------

/// Validates a raw JSON config and fills in documented defaults.
///
/// Returns every validation failure at once as an `InvalidConfig` error.
pub fn validate_config(raw: &serde_json::Value) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_value(raw.clone())
        .map_err(|e| Error::config("config", e.to_string()))?;
    normalize_raw(raw, &[])
}

fn normalize_raw(raw: RawConfig, pre_errors: &[FieldError]) -> Result<RunConfig> {
    let mut errors: Vec<FieldError> = pre_errors.to_vec();

    let command = match raw.command.as_deref() {
        None => {
            errors.push(FieldError::new("command", "missing; one of sample, ks-sweep, w1-sweep, kl-sweep, overlay, spacing-check, tailprob-check"));
            return Err(Error::InvalidConfig { errors });
        }
        Some(name) => match CommandKind::from_str(name) {
            Some(kind) => kind,
            None => {
                errors.push(FieldError::new(
                    "command",
                    format!("unknown command {name:?}"),
                ));
                return Err(Error::InvalidConfig { errors });
            }
        },
    };

    let seed = match raw.seed {
        None => DEFAULT_SEED,
        Some(s) if s >= 0 => s as u64,
        Some(s) => {
            errors.push(FieldError::new("seed", format!("must be >= 0, got {s}")));
            DEFAULT_SEED
        }
    };
    let out_dir = PathBuf::from(raw.out_dir.as_deref().unwrap_or("."));

    check_allowed_fields(command, &raw.params, &mut errors);
    let params = normalize_params(command, &raw.params, &mut errors);

    match (params, errors.is_empty()) {
        (Some(params), true) => Ok(RunConfig {
            command,
            seed,
            out_dir,
            params,
        }),
        _ => Err(Error::InvalidConfig { errors }),
    }
}

fn allowed_fields(command: CommandKind) -> &'static [&'static str] {
    const DATA_FIELDS: [&str; 6] = [
        "data",
        "column",
        "delimiter",
        "decimal_comma",
        "missing_sentinel",
        "normalize",
    ];
    match command {
        CommandKind::Sample => &[
            "dist",
            DATA_FIELDS[0],
            DATA_FIELDS[1],
            DATA_FIELDS[2],
            DATA_FIELDS[3],
            DATA_FIELDS[4],
            DATA_FIELDS[5],
            "n",
            "k",
            "count",
            "variant",
        ],
        CommandKind::KsSweep => &[
            "dist",
            "data",
            "column",
            "delimiter",
            "decimal_comma",
            "missing_sentinel",
            "normalize",
            "n_grid",
            "k_values",
            "trials",
            "draws_per_trial",
            "calibration",
            "one_sample",
        ],
        CommandKind::W1Sweep => &[
            "dist",
            "data",
            "column",
            "delimiter",
            "decimal_comma",
            "missing_sentinel",
            "normalize",
            "n_grid",
            "k_values",
            "trials",
            "draws_per_trial",
            "calibration",
        ],
        CommandKind::KlSweep => &["dist", "n_grid", "k_values", "trials", "draws_per_trial"],
        CommandKind::Overlay => &[
            "dist",
            "n_values",
            "k",
            "draws",
            "grid_lo",
            "grid_hi",
            "grid_points",
        ],
        CommandKind::SpacingCheck => &["n_values", "trials"],
        CommandKind::TailprobCheck => &["dist", "n", "k_values", "epsilon", "trials"],
    }
}

fn check_allowed_fields(command: CommandKind, params: &RawParams, errors: &mut Vec<FieldError>) {
    let allowed = allowed_fields(command);
    for field in params.set_fields() {
        if !allowed.contains(&field) {
            errors.push(FieldError::new(
                field,
                format!("not a parameter of {}", command.as_str()),
            ));
        }
    }
}

/// Positive-integer field with a default; pushes an error and returns the
/// default when out of range so later cross-field checks can still run.
fn positive(
    field: &str,
    value: Option<i64>,
    default: usize,
    errors: &mut Vec<FieldError>,
) -> usize {
    match value {
        None => default,
        Some(v) if v >= 1 => v as usize,
        Some(v) => {
            errors.push(FieldError::new(field, format!("must be >= 1, got {v}")));
            default
        }
    }
}

fn positive_list(
    field: &str,
    value: Option<&[i64]>,
    default: &[usize],
    errors: &mut Vec<FieldError>,
) -> Vec<usize> {
    match value {
        None => default.to_vec(),
        Some([]) => {
            errors.push(FieldError::new(field, "must not be empty"));
            default.to_vec()
        }
        Some(values) => {
            if let Some(&bad) = values.iter().find(|&&v| v < 1) {
                errors.push(FieldError::new(field, format!("must be >= 1, got {bad}")));
                return default.to_vec();
            }
            values.iter().map(|&v| v as usize).collect()
        }
    }
}

fn ascending_grid(field: &str, grid: &[usize], min_n: usize, errors: &mut Vec<FieldError>) {
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        errors.push(FieldError::new(field, "must be strictly ascending"));
    }
    if grid.iter().any(|&n| n < min_n) {
        errors.push(FieldError::new(field, format!("entries must be >= {min_n}")));
    }
}

/// Checks every rank against the smallest base sample size; the error
/// names both fields because the constraint ties them together.
fn ranks_fit_grid(
    k_field: &str,
    n_field: &str,
    k_values: &[usize],
    min_n: usize,
    errors: &mut Vec<FieldError>,
) {
    if let Some(&bad) = k_values.iter().find(|&&k| k >= min_n) {
        errors.push(FieldError::new(
            k_field,
            format!("rank {bad} needs n > {bad}, but {n_field} has minimum {min_n}"),
        ));
    }
}

fn normalize_source(
    command: CommandKind,
    params: &RawParams,
    errors: &mut Vec<FieldError>,
) -> SourceParams {
    let analytic_only = !matches!(
        command,
        CommandKind::Sample | CommandKind::KsSweep | CommandKind::W1Sweep
    );
    if params.dist.is_some() && params.data.is_some() {
        errors.push(FieldError::new(
            "dist",
            "dist and data are mutually exclusive; give one base source",
        ));
    }
    if let Some(data) = &params.data {
        if analytic_only {
            errors.push(FieldError::new(
                "data",
                format!("{} works on analytic distributions only", command.as_str()),
            ));
        }
        let column = match &params.column {
            None => {
                errors.push(FieldError::new("column", "required when data is set"));
                ColumnSelector::Index(0)
            }
            Some(raw) => parse_column(raw),
        };
        return SourceParams::Data {
            path: PathBuf::from(data),
            column,
            delimiter: params.delimiter.unwrap_or(','),
            decimal_comma: params.decimal_comma.unwrap_or(false),
            missing_sentinel: params.missing_sentinel,
            normalize: params.normalize.unwrap_or(false),
        };
    }
    for (field, set) in [
        ("column", params.column.is_some()),
        ("delimiter", params.delimiter.is_some()),
        ("decimal_comma", params.decimal_comma == Some(true)),
        ("missing_sentinel", params.missing_sentinel.is_some()),
        ("normalize", params.normalize == Some(true)),
    ] {
        if set {
            errors.push(FieldError::new(field, "only applies when data is set"));
        }
    }
    SourceParams::Dist(
        params
            .dist
            .unwrap_or_else(DistributionSpec::standard_uniform),
    )
}

/// A column selector: all-digit strings (optionally `#`-prefixed) address
/// by position, anything else by header name.
fn parse_column(raw: &str) -> ColumnSelector {
    let digits = raw.strip_prefix('#').unwrap_or(raw);
    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        if let Ok(idx) = digits.parse() {
            return ColumnSelector::Index(idx);
        }
    }
    ColumnSelector::Name(raw.to_string())
}

fn require_analytic(
    command: CommandKind,
    params: &RawParams,
    errors: &mut Vec<FieldError>,
) -> DistributionSpec {
    match normalize_source(command, params, errors) {
        SourceParams::Dist(spec) => spec,
        SourceParams::Data { .. } => DistributionSpec::standard_uniform(),
    }
}

fn normalize_params(
    command: CommandKind,
    params: &RawParams,
    errors: &mut Vec<FieldError>,
) -> Option<CommandParams> {
    let normalized = match command {
        CommandKind::Sample => {
            let source = normalize_source(command, params, errors);
            let n = match (&source, params.n) {
                (SourceParams::Dist(_), value) => {
                    Some(positive("n", value, DEFAULT_SAMPLE_N, errors))
                }
                (SourceParams::Data { .. }, None) => None,
                (SourceParams::Data { .. }, Some(_)) => {
                    errors.push(FieldError::new(
                        "n",
                        "applies to dist sources; a data source uses the whole cleaned column",
                    ));
                    None
                }
            };
            let k = positive("k", params.k, 1, errors);
            if let Some(n) = n {
                if n < 2 {
                    errors.push(FieldError::new("n", "must be at least 2"));
                } else if k >= n {
                    errors.push(FieldError::new(
                        "k",
                        format!("rank {k} needs n > {k}, but n is {n}"),
                    ));
                }
            }
            let count = positive("count", params.count, DEFAULT_SAMPLE_COUNT, errors);
            let variant = match params.variant.as_deref() {
                None | Some("fixed_rank") => SmoteVariant::FixedRank,
                Some("random_from_pool") => SmoteVariant::RandomFromPool,
                Some(other) => {
                    errors.push(FieldError::new(
                        "variant",
                        format!("must be fixed_rank or random_from_pool, got {other:?}"),
                    ));
                    SmoteVariant::FixedRank
                }
            };
            CommandParams::Sample(SampleParams {
                source,
                n,
                k,
                count,
                variant,
            })
        }
        CommandKind::KsSweep | CommandKind::W1Sweep => {
            let source = normalize_source(command, params, errors);
            let n_grid = positive_list("n_grid", params.n_grid.as_deref(), &DEFAULT_N_GRID, errors);
            ascending_grid("n_grid", &n_grid, 2, errors);
            let k_values = positive_list(
                "k_values",
                params.k_values.as_deref(),
                &DEFAULT_K_VALUES,
                errors,
            );
            if let Some(&min_n) = n_grid.iter().min() {
                ranks_fit_grid("k_values", "n_grid", &k_values, min_n, errors);
            }
            let trials = positive("trials", params.trials, DEFAULT_TRIALS, errors);
            let draws_per_trial =
                positive("draws_per_trial", params.draws_per_trial, DEFAULT_DRAWS, errors);
            let one_sample = params.one_sample.unwrap_or(false);
            let calibration = params.calibration.unwrap_or(false);
            if one_sample && matches!(source, SourceParams::Data { .. }) {
                errors.push(FieldError::new(
                    "one_sample",
                    "needs an analytic dist to compare against",
                ));
            }
            if one_sample && calibration {
                errors.push(FieldError::new(
                    "calibration",
                    "calibration is two-sample; drop one_sample",
                ));
            }
            let sweep = SweepParams {
                source,
                n_grid,
                k_values,
                trials,
                draws_per_trial,
                calibration,
                one_sample,
            };
            if command == CommandKind::KsSweep {
                CommandParams::KsSweep(sweep)
            } else {
                CommandParams::W1Sweep(sweep)
            }
        }
        CommandKind::KlSweep => {
            let spec = require_analytic(command, params, errors);
            let n_grid =
                positive_list("n_grid", params.n_grid.as_deref(), &default_kl_grid(), errors);
            ascending_grid("n_grid", &n_grid, 2, errors);
            let k_values = positive_list(
                "k_values",
                params.k_values.as_deref(),
                &DEFAULT_K_VALUES,
                errors,
            );
            if let Some(&min_n) = n_grid.iter().min() {
                ranks_fit_grid("k_values", "n_grid", &k_values, min_n, errors);
            }
            CommandParams::KlSweep(KlSweepParams {
                spec,
                n_grid,
                k_values,
                trials: positive("trials", params.trials, DEFAULT_TRIALS, errors),
                draws_per_trial: positive(
                    "draws_per_trial",
                    params.draws_per_trial,
                    DEFAULT_DRAWS,
                    errors,
                ),
            })
        }
        CommandKind::Overlay => {
            let spec = require_analytic(command, params, errors);
            let n_values = positive_list(
                "n_values",
                params.n_values.as_deref(),
                &DEFAULT_OVERLAY_N,
                errors,
            );
            if n_values.iter().any(|&n| n < 2) {
                errors.push(FieldError::new("n_values", "entries must be >= 2"));
            }
            let k = positive("k", params.k, 1, errors);
            if let Some(&min_n) = n_values.iter().min() {
                ranks_fit_grid("k", "n_values", &[k], min_n, errors);
            }
            let draws = positive("draws", params.draws, DEFAULT_DRAWS, errors);
            if draws < 2 {
                errors.push(FieldError::new("draws", "must be at least 2"));
            }
            let (default_lo, default_hi) = overlay_default_grid(&spec);
            let grid_lo = params.grid_lo.unwrap_or(default_lo);
            let grid_hi = params.grid_hi.unwrap_or(default_hi);
            if !grid_lo.is_finite() || !grid_hi.is_finite() || grid_lo >= grid_hi {
                errors.push(FieldError::new(
                    "grid_lo",
                    format!("need finite grid_lo < grid_hi, got [{grid_lo}, {grid_hi}]"),
                ));
            }
            let grid_points = positive("grid_points", params.grid_points, DEFAULT_GRID_POINTS, errors);
            if grid_points < 2 {
                errors.push(FieldError::new("grid_points", "must be at least 2"));
            }
            CommandParams::Overlay(OverlayParams {
                spec,
                n_values,
                k,
                draws,
                grid_lo,
                grid_hi,
                grid_points,
            })
        }
        CommandKind::SpacingCheck => {
            let n_values = positive_list(
                "n_values",
                params.n_values.as_deref(),
                &DEFAULT_SPACING_N,
                errors,
            );
            if n_values.iter().any(|&n| n < 2) {
                errors.push(FieldError::new("n_values", "entries must be >= 2"));
            }
            let trials = positive("trials", params.trials, DEFAULT_SPACING_TRIALS, errors);
            if trials < 1000 {
                errors.push(FieldError::new(
                    "trials",
                    "need at least 1000 trials for stable standard errors",
                ));
            }
            CommandParams::SpacingCheck(SpacingParams { n_values, trials })
        }
        CommandKind::TailprobCheck => {
            let spec = require_analytic(command, params, errors);
            let n = positive("n", params.n, DEFAULT_TAIL_N, errors);
            if n < 2 {
                errors.push(FieldError::new("n", "must be at least 2"));
            }
            let default_k: Vec<usize> = (1..=10.min(n.saturating_sub(1).max(1))).collect();
            let k_values =
                positive_list("k_values", params.k_values.as_deref(), &default_k, errors);
            if !k_values.windows(2).all(|w| w[0] < w[1]) {
                errors.push(FieldError::new("k_values", "must be strictly ascending"));
            }
            if n >= 2 {
                ranks_fit_grid("k_values", "n", &k_values, n, errors);
            }
            let epsilon = params.epsilon.unwrap_or(DEFAULT_TAIL_EPSILON);
            if !epsilon.is_finite() || epsilon <= 0.0 {
                errors.push(FieldError::new(
                    "epsilon",
                    format!("must be a positive finite number, got {epsilon}"),
                ));
            }
            CommandParams::TailprobCheck(TailProbParams {
                spec,
                n,
                k_values,
                epsilon,
                trials: positive("trials", params.trials, DEFAULT_TAIL_TRIALS, errors),
            })
        }
    };
    Some(normalized)
}

/// Default overlay grid: the central 99.8% of the reference, padded by 5%
/// so KDE tails stay visible.
fn overlay_default_grid(spec: &DistributionSpec) -> (f64, f64) {
    let lo = crate::dist::quantile(spec, 0.001).unwrap_or(0.0);
    let hi = crate::dist::quantile(spec, 0.999).unwrap_or(1.0);
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

// ---------------------------------------------------------------------------
// Flag -> raw merging. Flags override config-file fields one to one.
// ---------------------------------------------------------------------------

fn load_raw_config(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::config("config", format!("file not found: {}", path.display()))
        } else {
            Error::config("config", format!("cannot read {}: {e}", path.display()))
        }
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))
}

fn spec_from_flags(flags: &SourceFlags) -> std::result::Result<DistributionSpec, FieldError> {
    let Some(kind) = flags.dist.as_deref() else {
        unreachable!("caller checks dist is set");
    };
    let params = flags.dist_params.as_deref();
    let build = |kind: &str, params: Option<&[f64]>| -> Result<DistributionSpec> {
        match (kind, params) {
            ("uniform", None) => Ok(DistributionSpec::standard_uniform()),
            ("uniform", Some(&[a, b])) => DistributionSpec::uniform(a, b),
            ("gaussian" | "normal", None) => Ok(DistributionSpec::standard_gaussian()),
            ("gaussian" | "normal", Some(&[mean, std])) => DistributionSpec::gaussian(mean, std),
            ("exponential", None) => Ok(DistributionSpec::standard_exponential()),
            ("exponential", Some(&[rate])) => DistributionSpec::exponential(rate),
            ("uniform" | "gaussian" | "normal" | "exponential", Some(p)) => {
                Err(Error::InvalidDistribution {
                    reason: format!("{kind} takes a different parameter count than {}", p.len()),
                })
            }
            _ => Err(Error::InvalidDistribution {
                reason: format!("unknown kind {kind:?}; use uniform, gaussian, or exponential"),
            }),
        }
    };
    build(&kind.to_ascii_lowercase(), params)
        .map_err(|e| FieldError::new("dist", e.to_string()))
}

struct MergedConfig {
    raw: RawConfig,
    pre_errors: Vec<FieldError>,
    threads: Option<usize>,
}

fn merge_common(
    command: CommandKind,
    common: &CommonFlags,
) -> Result<(RawConfig, Vec<FieldError>)> {
    let mut raw = match &common.config {
        Some(path) => load_raw_config(path)?,
        None => RawConfig::default(),
    };
    raw.command = Some(command.as_str().to_string());
    if let Some(seed) = common.seed {
        raw.seed = Some(seed as i64);
    }
    if let Some(dir) = &common.out_dir {
        raw.out_dir = Some(dir.display().to_string());
    }
    Ok((raw, Vec::new()))
}

fn merge_source(flags: &SourceFlags, raw: &mut RawParams, pre_errors: &mut Vec<FieldError>) {
    if flags.dist.is_some() {
        match spec_from_flags(flags) {
            Ok(spec) => raw.dist = Some(spec),
            Err(err) => pre_errors.push(err),
        }
    }
}

fn merge_data(flags: &DataFlags, raw: &mut RawParams) {
    if let Some(path) = &flags.data {
        raw.data = Some(path.display().to_string());
        // A data flag replaces a config-file dist outright.
        raw.dist = None;
    }
    if let Some(column) = &flags.column {
        raw.column = Some(column.clone());
    }
    if let Some(delimiter) = flags.delimiter {
        raw.delimiter = Some(delimiter);
    }
    if flags.decimal_comma {
        raw.decimal_comma = Some(true);
    }
    if let Some(sentinel) = flags.missing_sentinel {
        raw.missing_sentinel = Some(sentinel);
    }
    if flags.normalize {
        raw.normalize = Some(true);
    }
}

fn set_positive(target: &mut Option<i64>, value: Option<usize>) {
    if let Some(v) = value {
        *target = Some(v as i64);
    }
}

fn set_list(target: &mut Option<Vec<i64>>, value: &Option<Vec<usize>>) {
    if let Some(v) = value {
        *target = Some(v.iter().map(|&x| x as i64).collect());
    }
}

fn merge_command(command: &Command) -> Result<MergedConfig> {
    let (kind, common) = match command {
        Command::Sample(args) => (CommandKind::Sample, &args.common),
        Command::KsSweep(args) => (CommandKind::KsSweep, &args.common),
        Command::W1Sweep(args) => (CommandKind::W1Sweep, &args.common),
        Command::KlSweep(args) => (CommandKind::KlSweep, &args.common),
        Command::Overlay(args) => (CommandKind::Overlay, &args.common),
        Command::SpacingCheck(args) => (CommandKind::SpacingCheck, &args.common),
        Command::TailprobCheck(args) => (CommandKind::TailprobCheck, &args.common),
    };
    let (mut raw, mut pre_errors) = merge_common(kind, common)?;

    match command {
        Command::Sample(args) => {
            merge_source(&args.source, &mut raw.params, &mut pre_errors);
            merge_data(&args.data, &mut raw.params);
            set_positive(&mut raw.params.n, args.n);
            set_positive(&mut raw.params.k, args.k);
            set_positive(&mut raw.params.count, args.count);
            if let Some(variant) = &args.variant {
                raw.params.variant = Some(variant.clone());
            }
        }
        Command::KsSweep(args) | Command::W1Sweep(args) => {
            merge_source(&args.source, &mut raw.params, &mut pre_errors);
            merge_data(&args.data, &mut raw.params);
            set_list(&mut raw.params.n_grid, &args.n_grid);
            set_list(&mut raw.params.k_values, &args.k_values);
            set_positive(&mut raw.params.trials, args.trials);
            set_positive(&mut raw.params.draws_per_trial, args.draws_per_trial);
            if args.calibration {
                raw.params.calibration = Some(true);
            }
            if args.one_sample {
                raw.params.one_sample = Some(true);
            }
        }
        Command::KlSweep(args) => {
            merge_source(&args.source, &mut raw.params, &mut pre_errors);
            set_list(&mut raw.params.n_grid, &args.n_grid);
            set_list(&mut raw.params.k_values, &args.k_values);
            set_positive(&mut raw.params.trials, args.trials);
            set_positive(&mut raw.params.draws_per_trial, args.draws_per_trial);
        }
        Command::Overlay(args) => {
            merge_source(&args.source, &mut raw.params, &mut pre_errors);
            set_list(&mut raw.params.n_values, &args.n_values);
            set_positive(&mut raw.params.k, args.k);
            set_positive(&mut raw.params.draws, args.draws);
            if let Some(lo) = args.grid_lo {
                raw.params.grid_lo = Some(lo);
            }
            if let Some(hi) = args.grid_hi {
                raw.params.grid_hi = Some(hi);
            }
            set_positive(&mut raw.params.grid_points, args.grid_points);
        }
        Command::SpacingCheck(args) => {
            set_list(&mut raw.params.n_values, &args.n_values);
            set_positive(&mut raw.params.trials, args.trials);
        }
        Command::TailprobCheck(args) => {
            merge_source(&args.source, &mut raw.params, &mut pre_errors);
            set_positive(&mut raw.params.n, args.n);
            set_list(&mut raw.params.k_values, &args.k_values);
            if let Some(eps) = args.epsilon {
                raw.params.epsilon = Some(eps);
            }
            set_positive(&mut raw.params.trials, args.trials);
        }
    }

    Ok(MergedConfig {
        raw,
        pre_errors,
        threads: common.threads,
    })
}

// ---------------------------------------------------------------------------
// Provenance: a fully materialized raw config, itself valid as --config.
// ---------------------------------------------------------------------------

fn source_to_raw(source: &SourceParams, raw: &mut RawParams) {
    match source {
        SourceParams::Dist(spec) => raw.dist = Some(*spec),
        SourceParams::Data {
            path,
            column,
            delimiter,
            decimal_comma,
            missing_sentinel,
            normalize,
        } => {
            raw.data = Some(path.display().to_string());
            raw.column = Some(match column {
                ColumnSelector::Name(name) => name.clone(),
                ColumnSelector::Index(idx) => format!("#{idx}"),
            });
            raw.delimiter = Some(*delimiter);
            raw.decimal_comma = Some(*decimal_comma);
            raw.missing_sentinel = *missing_sentinel;
            raw.normalize = Some(*normalize);
        }
    }
}

fn config_to_raw(config: &RunConfig) -> RawConfig {
    let mut params = RawParams::default();
    match &config.params {
        CommandParams::Sample(p) => {
            source_to_raw(&p.source, &mut params);
            params.n = p.n.map(|n| n as i64);
            params.k = Some(p.k as i64);
            params.count = Some(p.count as i64);
            params.variant = Some(
                match p.variant {
                    SmoteVariant::FixedRank => "fixed_rank",
                    SmoteVariant::RandomFromPool => "random_from_pool",
                }
                .to_string(),
            );
        }
        CommandParams::KsSweep(p) | CommandParams::W1Sweep(p) => {
            source_to_raw(&p.source, &mut params);
            params.n_grid = Some(p.n_grid.iter().map(|&n| n as i64).collect());
            params.k_values = Some(p.k_values.iter().map(|&k| k as i64).collect());
            params.trials = Some(p.trials as i64);
            params.draws_per_trial = Some(p.draws_per_trial as i64);
            params.calibration = Some(p.calibration);
            if matches!(config.params, CommandParams::KsSweep(_)) {
                params.one_sample = Some(p.one_sample);
            }
        }
        CommandParams::KlSweep(p) => {
            params.dist = Some(p.spec);
            params.n_grid = Some(p.n_grid.iter().map(|&n| n as i64).collect());
            params.k_values = Some(p.k_values.iter().map(|&k| k as i64).collect());
            params.trials = Some(p.trials as i64);
            params.draws_per_trial = Some(p.draws_per_trial as i64);
        }
        CommandParams::Overlay(p) => {
            params.dist = Some(p.spec);
            params.n_values = Some(p.n_values.iter().map(|&n| n as i64).collect());
            params.k = Some(p.k as i64);
            params.draws = Some(p.draws as i64);
            params.grid_lo = Some(p.grid_lo);
            params.grid_hi = Some(p.grid_hi);
            params.grid_points = Some(p.grid_points as i64);
        }
        CommandParams::SpacingCheck(p) => {
            params.n_values = Some(p.n_values.iter().map(|&n| n as i64).collect());
            params.trials = Some(p.trials as i64);
        }
        CommandParams::TailprobCheck(p) => {
            params.dist = Some(p.spec);
            params.n = Some(p.n as i64);
            params.k_values = Some(p.k_values.iter().map(|&k| k as i64).collect());
            params.epsilon = Some(p.epsilon);
            params.trials = Some(p.trials as i64);
        }
    }
    RawConfig {
        command: Some(config.command.as_str().to_string()),
        seed: Some(config.seed as i64),
        out_dir: Some(config.out_dir.display().to_string()),
        params,
    }
}

fn write_provenance(config: &RunConfig) -> Result<PathBuf> {
    let raw = config_to_raw(config);
    let mut json =
        serde_json::to_string_pretty(&raw).expect("raw config serializes infallibly");
    json.push('\n');
    let path = config.out_dir.join(PROVENANCE_FILE);
    std::fs::write(&path, json).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

fn resolve_sweep_source(source: &SourceParams) -> Result<SweepSource> {
    match source {
        SourceParams::Dist(spec) => Ok(SweepSource::Analytic(*spec)),
        SourceParams::Data {
            path,
            column,
            delimiter,
            decimal_comma,
            missing_sentinel,
            normalize,
        } => {
            let mut dataset = DatasetRef::new(path.clone(), column.clone());
            dataset.delimiter = *delimiter as u8;
            dataset.decimal_comma = *decimal_comma;
            dataset.missing_sentinel = *missing_sentinel;
            let loaded = load_column(&dataset)?;
            if loaded.dropped() > 0 {
                eprintln!(
                    "note: dropped {} row(s) from {} while cleaning",
                    loaded.dropped(),
                    path.display()
                );
            }
            let data = if *normalize {
                normalize_minmax(&loaded.sample)?.0
            } else {
                loaded.sample
            };
            Ok(SweepSource::Series {
                label: column.to_string(),
                data,
            })
        }
    }
}

fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

fn print_sweep_rows(result: &SweepResult) {
    for row in &result.rows {
        println!(
            "n={} k={} mean={} se={} trials={}",
            row.n,
            row.k,
            sig6(row.mean),
            sig6(row.std_error),
            row.trials
        );
    }
}

fn sweep_plot_spec(result: &SweepResult, y_label: &str, title: &str) -> PlotSpec {
    let mut series = Vec::new();
    for &k in &result.config.k_values {
        let points: Vec<(f64, f64)> = result
            .config
            .n_grid
            .iter()
            .zip(result.means_for_k(k))
            .map(|(&n, mean)| (n as f64, mean))
            .collect();
        series.push(PlotSeries::new(format!("k={k}"), points));
    }
    PlotSpec {
        title: title.to_string(),
        x_label: "n".to_string(),
        y_label: y_label.to_string(),
        series,
    }
}

fn run_sweep_command(config: &RunConfig, params: &SweepParams, w1: bool) -> Result<()> {
    let source = resolve_sweep_source(&params.source)?;
    let label = source.label();
    let metric = if w1 {
        MetricName::W1
    } else if params.one_sample {
        MetricName::Ks1
    } else {
        MetricName::Ks2
    };
    let sweep_config = SweepConfig {
        source,
        n_grid: params.n_grid.clone(),
        k_values: params.k_values.clone(),
        trials: params.trials,
        draws_per_trial: params.draws_per_trial,
        metric,
        seed: config.seed,
        calibration: params.calibration,
    };
    let result = if w1 {
        run_wasserstein_sweep(sweep_config)?
    } else {
        run_ks_sweep(sweep_config)?
    };
    print_sweep_rows(&result);

    let stem = if w1 { "w1_sweep" } else { "ks_sweep" };
    let csv_path = config.out_dir.join(format!("{stem}.csv"));
    write_sweep_csv(&result, &csv_path)?;
    let (y_label, title) = if w1 {
        ("mean W1 distance", format!("W1 vs n ({label})"))
    } else {
        ("mean KS distance", format!("KS vs n ({label})"))
    };
    let svg_path = config.out_dir.join(format!("{stem}.svg"));
    render_line_plot(&sweep_plot_spec(&result, y_label, &title), &svg_path)?;
    let provenance = write_provenance(config)?;
    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        svg_path.display(),
        provenance.display()
    );
    Ok(())
}

fn run_kl_command(config: &RunConfig, params: &KlSweepParams) -> Result<()> {
    let sweep_config = SweepConfig {
        source: SweepSource::Analytic(params.spec),
        n_grid: params.n_grid.clone(),
        k_values: params.k_values.clone(),
        trials: params.trials,
        draws_per_trial: params.draws_per_trial,
        metric: MetricName::Kl,
        seed: config.seed,
        calibration: false,
    };
    let result = run_kl_sweep(sweep_config)?;
    print_sweep_rows(&result);

    let csv_path = config.out_dir.join("kl_sweep.csv");
    write_sweep_csv(&result, &csv_path)?;
    let svg_path = config.out_dir.join("kl_sweep.svg");
    let title = format!("KL vs n ({})", params.spec);
    render_line_plot(
        &sweep_plot_spec(&result, "mean KL divergence", &title),
        &svg_path,
    )?;
    let provenance = write_provenance(config)?;
    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        svg_path.display(),
        provenance.display()
    );
    Ok(())
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}

fn run_overlay_command(config: &RunConfig, params: &OverlayParams) -> Result<()> {
    let grid = linspace(params.grid_lo, params.grid_hi, params.grid_points);
    let result = run_density_overlay(
        &params.spec,
        &params.n_values,
        params.k,
        params.draws,
        &grid,
        config.seed,
    )?;
    for curve in &result.curves {
        println!(
            "n={} k={} draws={} grid_points={}",
            curve.n,
            params.k,
            params.draws,
            grid.len()
        );
    }

    let csv_path = config.out_dir.join("overlay.csv");
    write_overlay_csv(&result, &csv_path)?;
    let svg_path = config.out_dir.join("overlay.svg");
    let mut series = vec![PlotSeries::new(
        "reference",
        result
            .grid
            .iter()
            .zip(&result.reference_pdf)
            .map(|(&x, &y)| (x, y))
            .collect(),
    )];
    for curve in &result.curves {
        series.push(PlotSeries::new(
            format!("n={}", curve.n),
            result
                .grid
                .iter()
                .zip(&curve.density)
                .map(|(&x, &y)| (x, y))
                .collect(),
        ));
    }
    render_line_plot(
        &PlotSpec {
            title: format!("density of synthetic draws ({}, k={})", params.spec, params.k),
            x_label: "x".to_string(),
            y_label: "density".to_string(),
            series,
        },
        &svg_path,
    )?;
    let provenance = write_provenance(config)?;
    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        svg_path.display(),
        provenance.display()
    );
    Ok(())
}

/// Long-format overlay table: `x,series,density` with the reference pdf
/// first, then one block per n.
fn write_overlay_csv(result: &OverlayResult, path: &Path) -> Result<()> {
    let mut out = String::from("x,series,density\n");
    for (&x, &d) in result.grid.iter().zip(&result.reference_pdf) {
        writeln!(out, "{},reference,{}", format_sig(x, 9), format_sig(d, 9))
            .expect("writing to a String cannot fail");
    }
    for curve in &result.curves {
        for (&x, &d) in result.grid.iter().zip(&curve.density) {
            writeln!(
                out,
                "{},n={},{}",
                format_sig(x, 9),
                curve.n,
                format_sig(d, 9)
            )
            .expect("writing to a String cannot fail");
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

fn run_spacing_command(config: &RunConfig, params: &SpacingParams) -> Result<()> {
    let result = run_spacing_check(&params.n_values, params.trials, config.seed)?;
    print_spacing_rows(&result);
    let csv_path = config.out_dir.join("spacing.csv");
    write_spacing_csv(&result, &csv_path)?;
    let provenance = write_provenance(config)?;
    println!("wrote {}, {}", csv_path.display(), provenance.display());
    Ok(())
}

fn print_spacing_rows(result: &SpacingResult) {
    for row in &result.rows {
        println!(
            "n={} k={} mean={} expected={} abs_dev={} se={}",
            row.n,
            row.k,
            sig6(row.mean_spacing),
            sig6(row.expected),
            sig6(row.abs_dev),
            sig6(row.std_error)
        );
    }
}

fn run_tailprob_command(config: &RunConfig, params: &TailProbParams) -> Result<()> {
    let result = run_tail_prob_check(TailProbConfig {
        spec: params.spec,
        n: params.n,
        k_values: params.k_values.clone(),
        epsilon: params.epsilon,
        trials: params.trials,
        seed: config.seed,
    })?;
    print_tailprob_rows(&result);
    let csv_path = config.out_dir.join("tailprob.csv");
    write_tailprob_csv(&result, &csv_path)?;
    let provenance = write_provenance(config)?;
    println!("wrote {}, {}", csv_path.display(), provenance.display());
    Ok(())
}

fn print_tailprob_rows(result: &TailProbResult) {
    for row in &result.rows {
        println!(
            "k={} exceed={} p_hat={} trials={}",
            row.k,
            row.exceed_count,
            sig6(row.p_hat),
            result.config.trials
        );
    }
}

fn run_sample_command(config: &RunConfig, params: &SampleParams) -> Result<()> {
    let base = match &params.source {
        SourceParams::Dist(spec) => {
            let n = params.n.expect("validated: dist sources carry n");
            crate::dist::sample_iid(spec, n, derive_seed(config.seed, &[tag::BASE]))
        }
        SourceParams::Data {
            path,
            column,
            delimiter,
            decimal_comma,
            missing_sentinel,
            normalize,
        } => {
            let mut dataset = DatasetRef::new(path.clone(), column.clone());
            dataset.delimiter = *delimiter as u8;
            dataset.decimal_comma = *decimal_comma;
            dataset.missing_sentinel = *missing_sentinel;
            let loaded = load_column(&dataset)?;
            if loaded.dropped() > 0 {
                eprintln!(
                    "note: dropped {} row(s) from {} while cleaning",
                    loaded.dropped(),
                    path.display()
                );
            }
            if *normalize {
                normalize_minmax(&loaded.sample)?.0
            } else {
                loaded.sample
            }
        }
    };
    let smote = SmoteConfig {
        rank: params.k,
        variant: params.variant,
        seed: derive_seed(config.seed, &[tag::SYNTH]),
    };
    let batch = generate_batch(&base, &smote, params.count)?;
    let values = batch.values_1d()?;
    for &z in values {
        println!("{}", format_sig(z, 9));
    }
    let csv_path = config.out_dir.join("sample.csv");
    write_sample_csv(values, &csv_path)?;
    let provenance = write_provenance(config)?;
    println!("wrote {}, {}", csv_path.display(), provenance.display());
    Ok(())
}

fn write_sample_csv(values: &[f64], path: &Path) -> Result<()> {
    let mut out = String::from("z\n");
    for &z in values {
        writeln!(out, "{}", format_sig(z, 9)).expect("writing to a String cannot fail");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

fn execute(config: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| Error::io(config.out_dir.display().to_string(), e))?;
    match &config.params {
        CommandParams::Sample(p) => run_sample_command(config, p),
        CommandParams::KsSweep(p) => run_sweep_command(config, p, false),
        CommandParams::W1Sweep(p) => run_sweep_command(config, p, true),
        CommandParams::KlSweep(p) => run_kl_command(config, p),
        CommandParams::Overlay(p) => run_overlay_command(config, p),
        CommandParams::SpacingCheck(p) => run_spacing_command(config, p),
        CommandParams::TailprobCheck(p) => run_tailprob_command(config, p),
    }
}

/// Thread cap resolution: flag beats SMOTE_LAB_THREADS beats machine
/// default. The cap changes wall time only, never results.
fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(Error::config("threads", "must be >= 1"));
        }
        return Ok(Some(n));
    }
    match std::env::var("SMOTE_LAB_THREADS") {
        Err(_) => Ok(None),
        Ok(text) => match text.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::config(
                "threads",
                format!("SMOTE_LAB_THREADS must be a positive integer, got {text:?}"),
            )),
        },
    }
}

fn install_thread_pool(threads: Option<usize>) {
    if let Some(n) = threads {
        // Ignore the error from a pool that already exists (tests calling
        // run() twice in-process); results do not depend on pool size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Entry point behind `main`. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(argv) {
        Ok(matches) => matches,
        Err(err) => {
            let code = if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                0
            } else {
                1
            };
            let _ = err.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return 1;
        }
    };

    let merged = match merge_command(&cli.command) {
        Ok(merged) => merged,
        Err(err) => {
            eprintln!("error: {err}");
            return 1;
        }
    };
    let threads = match resolve_threads(merged.threads) {
        Ok(threads) => threads,
        Err(err) => {
            eprintln!("error: {err}");
            return 1;
        }
    };
    let config = match normalize_raw(merged.raw, &merged.pre_errors) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return 1;
        }
    };

    install_thread_pool(threads);
    match execute(&config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn validate(value: serde_json::Value) -> Result<RunConfig> {
        validate_config(&value)
    }

    fn field_errors(err: Error) -> Vec<FieldError> {
        match err {
            Error::InvalidConfig { errors } => errors,
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_fills_documented_defaults() {
        let config = validate(json!({"command": "ks-sweep", "params": {}})).unwrap();
        assert_eq!(config.command, CommandKind::KsSweep);
        assert_eq!(config.seed, 42);
        assert_eq!(config.out_dir, PathBuf::from("."));
        let CommandParams::KsSweep(p) = &config.params else {
            panic!("wrong params variant");
        };
        assert_eq!(p.n_grid, vec![8, 20, 70, 200]);
        assert_eq!(p.k_values, vec![1, 5]);
        assert_eq!(p.trials, 50);
        assert_eq!(p.draws_per_trial, 2000);
        assert!(!p.calibration && !p.one_sample);
        assert_eq!(
            p.source,
            SourceParams::Dist(DistributionSpec::standard_uniform())
        );
    }

    #[test]
    fn kl_default_grid_steps_by_four() {
        let config = validate(json!({"command": "kl-sweep", "params": {}})).unwrap();
        let CommandParams::KlSweep(p) = &config.params else {
            panic!("wrong params variant");
        };
        assert_eq!(p.n_grid.first(), Some(&8));
        assert_eq!(p.n_grid.last(), Some(&72));
        assert_eq!(p.n_grid.len(), 17);
        assert!(p.n_grid.windows(2).all(|w| w[1] - w[0] == 4));
    }

    #[test]
    fn all_failures_are_reported_at_once() {
        let err = validate(json!({
            "command": "ks-sweep",
            "params": {"n_grid": [4, 8], "k_values": [1, 5], "trials": -3}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        let fields: Vec<&str> = errors.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"k_values"), "{errors:?}");
        assert!(fields.contains(&"trials"), "{errors:?}");
        assert_eq!(errors.len(), 2, "{errors:?}");
    }

    #[test]
    fn rank_error_names_both_fields() {
        let err = validate(json!({
            "command": "ks-sweep",
            "params": {"n_grid": [4, 8], "k_values": [5]}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].field, "k_values");
        assert!(errors[0].message.contains("n_grid"), "{}", errors[0].message);
    }

    #[test]
    fn fields_of_other_commands_are_rejected() {
        let err = validate(json!({
            "command": "spacing-check",
            "params": {"epsilon": 0.5, "trials": 5000}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].field, "epsilon");
        assert!(errors[0].message.contains("spacing-check"));
    }

    #[test]
    fn unknown_command_is_an_error() {
        let err = validate(json!({"command": "frobnicate", "params": {}})).unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors[0].field, "command");
    }

    #[test]
    fn data_source_requires_column() {
        let err = validate(json!({
            "command": "w1-sweep",
            "params": {"data": "x.csv"}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert!(errors.iter().any(|e| e.field == "column"));
    }

    #[test]
    fn data_only_fields_need_a_data_source() {
        let err = validate(json!({
            "command": "ks-sweep",
            "params": {"normalize": true}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors[0].field, "normalize");
    }

    #[test]
    fn kl_sweep_rejects_data_sources() {
        let err = validate(json!({
            "command": "kl-sweep",
            "params": {"data": "x.csv", "column": "a"}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert!(errors.iter().any(|e| e.field == "data"));
    }

    #[test]
    fn column_selector_parses_names_and_indices() {
        assert_eq!(parse_column("median_income"), ColumnSelector::Name("median_income".into()));
        assert_eq!(parse_column("3"), ColumnSelector::Index(3));
        assert_eq!(parse_column("#7"), ColumnSelector::Index(7));
        assert_eq!(parse_column("3rd"), ColumnSelector::Name("3rd".into()));
    }

    #[test]
    fn spacing_trials_floor_is_enforced() {
        let err = validate(json!({
            "command": "spacing-check",
            "params": {"trials": 10}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors[0].field, "trials");
    }

    #[test]
    fn tailprob_default_ranks_run_one_to_ten() {
        let config = validate(json!({"command": "tailprob-check", "params": {}})).unwrap();
        let CommandParams::TailprobCheck(p) = &config.params else {
            panic!("wrong params variant");
        };
        assert_eq!(p.k_values, (1..=10).collect::<Vec<_>>());
        assert_eq!(p.n, 50);
        assert_eq!(p.epsilon, 0.1);
        assert_eq!(p.trials, 10_000);
    }

    #[test]
    fn provenance_round_trips_to_the_same_config() {
        let config = validate(json!({
            "command": "ks-sweep",
            "seed": 7,
            "out_dir": "out",
            "params": {"n_grid": [8, 20], "k_values": [1, 3], "trials": 5}
        }))
        .unwrap();
        let raw = config_to_raw(&config);
        let value = serde_json::to_value(&raw).unwrap();
        let replayed = validate_config(&value).unwrap();
        assert_eq!(replayed, config);
    }

    #[test]
    fn provenance_round_trips_for_every_command() {
        for params in [
            json!({"command": "sample", "params": {}}),
            json!({"command": "sample", "params": {"variant": "random_from_pool", "k": 3}}),
            json!({"command": "w1-sweep", "params": {}}),
            json!({"command": "kl-sweep", "params": {}}),
            json!({"command": "overlay", "params": {"dist": {"kind": "gaussian", "params": [0.0, 1.0]}}}),
            json!({"command": "spacing-check", "params": {}}),
            json!({"command": "tailprob-check", "params": {"epsilon": 0.25}}),
        ] {
            let config = validate(params.clone()).unwrap();
            let raw = config_to_raw(&config);
            let replayed = validate_config(&serde_json::to_value(&raw).unwrap()).unwrap();
            assert_eq!(replayed, config, "for {params}");
        }
    }

    #[test]
    fn unknown_json_fields_are_rejected() {
        let err = validate(json!({
            "command": "ks-sweep",
            "params": {},
            "bogus": 1
        }))
        .unwrap_err();
        let errors = field_errors(err);
        assert_eq!(errors[0].field, "config");
        assert!(errors[0].message.contains("bogus"));
    }

    #[test]
    fn overlay_grid_defaults_cover_the_bulk_of_the_support() {
        let config = validate(json!({"command": "overlay", "params": {}})).unwrap();
        let CommandParams::Overlay(p) = &config.params else {
            panic!("wrong params variant");
        };
        // Uniform(0,1): quantiles 0.001/0.999 padded by 5% of their span
        assert!(p.grid_lo < 0.001 && p.grid_lo > -0.2);
        assert!(p.grid_hi > 0.999 && p.grid_hi < 1.2);
        assert_eq!(p.grid_points, 201);
    }

    #[test]
    fn negative_seed_is_collected_not_fatal() {
        let err = validate(json!({
            "command": "ks-sweep",
            "seed": -1,
            "params": {"trials": 0}
        }))
        .unwrap_err();
        let errors = field_errors(err);
        let fields: Vec<&str> = errors.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"seed"));
        assert!(fields.contains(&"trials"));
    }
}
