//! Gaussian kernel density estimation for overlay plots.

use crate::dist::standard_normal_pdf;
use crate::error::{Error, Result};
use crate::sampling::Sample;

/// Silverman's rule of thumb, `1.06 * sigma * n^(-1/5)`, with the sample
/// standard deviation (n-1 denominator).
pub fn silverman_bandwidth(sample: &Sample) -> Result<f64> {
    let values = sample.values_1d()?;
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, required: 2 });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::DegenerateSupport {
            reason: "all sample values equal, kernel bandwidth would be zero".into(),
        });
    }
    Ok(1.06 * std * (n as f64).powf(-0.2))
}

/// Kernel density with Silverman bandwidth, evaluated at each grid point.
pub fn kde_density(sample: &Sample, grid: &[f64]) -> Result<Vec<f64>> {
    let h = silverman_bandwidth(sample)?;
    kde_density_with_bandwidth(sample, grid, h)
}

/// Kernel density with an explicit bandwidth `h > 0`:
/// `f(g) = (1/(n h)) sum_i phi((g - x_i)/h)`.
pub fn kde_density_with_bandwidth(sample: &Sample, grid: &[f64], h: f64) -> Result<Vec<f64>> {
    let values = sample.values_1d()?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DomainError {
            reason: format!("kernel bandwidth must be positive and finite, got {h}"),
        });
    }
    let scale = 1.0 / (values.len() as f64 * h);
    Ok(grid
        .iter()
        .map(|&g| {
            values
                .iter()
                .map(|&x| standard_normal_pdf((g - x) / h))
                .sum::<f64>()
                * scale
        })
        .collect())
}
