//! Density overlays: the estimated marginal density of synthetic draws at
//! several sample sizes, next to the analytic density they should approach.

use super::sweep::marginal_z_draws;
use super::tag;
use crate::dist::{pdf, DistributionSpec};
use crate::error::{Error, Result};
use crate::metrics::kde_density;
use rayon::prelude::*;

/// The estimated density of Z at one base sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayCurve {
    pub n: usize,
    pub density: Vec<f64>,
}

/// Aligned curves over one grid: the analytic reference and one estimate
/// per configured sample size.
#[derive(Debug, Clone)]
pub struct OverlayResult {
    pub grid: Vec<f64>,
    pub reference_pdf: Vec<f64>,
    pub curves: Vec<OverlayCurve>,
}

/// Estimates the marginal density of Z for each `n`, using fresh base
/// samples per draw group, and evaluates everything on `grid`.
pub fn run_density_overlay(
    spec: &DistributionSpec,
    n_values: &[usize],
    k: usize,
    draws: usize,
    grid: &[f64],
    seed: u64,
) -> Result<OverlayResult> {
    if n_values.is_empty() {
        return Err(Error::config("n_values", "must not be empty"));
    }
    let n_min = *n_values.iter().min().expect("non-empty");
    if n_min < 2 {
        return Err(Error::config("n_values", "sample sizes must be at least 2"));
    }
    if k == 0 || k >= n_min {
        return Err(Error::config(
            "k",
            format!("rank {k} must satisfy 1 <= k <= n-1 for every n (min n is {n_min})"),
        ));
    }
    if draws < 2 {
        return Err(Error::config(
            "draws",
            "density estimation needs at least 2 draws",
        ));
    }
    if grid.is_empty() {
        return Err(Error::config("grid", "must not be empty"));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::config("grid", "grid points must be finite"));
    }

    let curves: Vec<OverlayCurve> = n_values
        .par_iter()
        .map(|&n| {
            let z = marginal_z_draws(
                spec,
                n,
                k,
                draws,
                seed,
                &[tag::OVERLAY_BASE, tag::OVERLAY_SYNTH],
                0,
            )?;
            Ok(OverlayCurve {
                n,
                density: kde_density(&z, grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(OverlayResult {
        grid: grid.to_vec(),
        reference_pdf: grid.iter().map(|&g| pdf(spec, g)).collect(),
        curves,
    })
}
