//! Synthetic point generation by nearest-neighbor interpolation.
//!
//! Two procedures are implemented:
//!
//! - fixed rank: pick a base point uniformly, take its rank-k nearest
//!   neighbor, and interpolate `Z = X_i + lambda * (X_(i,k) - X_i)` with
//!   `lambda ~ U(0,1)`;
//! - random pool: as above, but the neighbor rank is itself drawn uniformly
//!   from `{1..K}` before interpolating.
//!
//! Draw order is frozen: base index, then (pool variant only) the rank
//! choice, then lambda. One [`UniformSource`] draw each. Batch generation
//! assigns every synthetic point its own counter-based stream derived from
//! the seed, so output is independent of thread count and execution order.

use crate::error::{Error, Result};
use crate::rng::{unit_to_index, DrawStream, UniformSource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest sample size for which a batch precomputes the full neighbor
/// ordering table instead of scanning per draw.
const MAX_CACHED_N: usize = 512;

/// Draws per parallel work item in batch generation.
const BATCH_CHUNK: usize = 1024;

/// An ordered collection of d-dimensional points, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    dim: usize,
}

impl Sample {
    /// Builds a sample from flat row-major data (`data.len() = n * dim`).
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DomainError {
                reason: "dimension must be at least 1".into(),
            });
        }
        if data.len() % dim != 0 {
            return Err(Error::DomainError {
                reason: format!(
                    "flat data length {} is not a multiple of dimension {}",
                    data.len(),
                    dim
                ),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index });
        }
        Ok(Sample { data, dim })
    }

    /// Builds a 1-D sample.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Sample::new(values.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.data[index * self.dim..(index + 1) * self.dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// The underlying values of a 1-D sample.
    pub fn values_1d(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::NotOneDimensional { dim: self.dim });
        }
        Ok(&self.data)
    }

    /// Flat row-major view, `len() * dim()` values.
    pub fn flat(&self) -> &[f64] {
        &self.data
    }
}

/// A single d-dimensional point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The value of a 1-D point. Panics on higher dimensions.
    pub fn value(&self) -> f64 {
        assert_eq!(self.coords.len(), 1, "value() requires a 1-D point");
        self.coords[0]
    }
}

/// Which neighbor-selection rule a configuration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoteVariant {
    /// Always interpolate toward the rank-k neighbor.
    FixedRank,
    /// Draw the rank uniformly from `{1..K}` per synthetic point.
    RandomFromPool,
}

/// Parameters of a synthetic-sampling run.
///
/// `rank` is the neighbor rank k for [`SmoteVariant::FixedRank`] and the
/// pool size K for [`SmoteVariant::RandomFromPool`]; it must satisfy
/// `1 <= rank <= n - 1` for the sample it is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoteConfig {
    pub rank: usize,
    pub variant: SmoteVariant,
    pub seed: u64,
}

impl SmoteConfig {
    pub fn fixed_rank(rank: usize, seed: u64) -> Self {
        SmoteConfig {
            rank,
            variant: SmoteVariant::FixedRank,
            seed,
        }
    }

    pub fn random_pool(pool: usize, seed: u64) -> Self {
        SmoteConfig {
            rank: pool,
            variant: SmoteVariant::RandomFromPool,
            seed,
        }
    }
}

/// All co-sample indices of one base point, sorted by ascending distance.
///
/// Ties are broken by ascending original index, making the ordering a
/// deterministic function of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborOrdering {
    base_index: usize,
    ordered_indices: Vec<usize>,
    distances: Vec<f64>,
}

impl NeighborOrdering {
    pub fn base_index(&self) -> usize {
        self.base_index
    }

    pub fn ordered_indices(&self) -> &[usize] {
        &self.ordered_indices
    }

    /// Distances aligned with [`ordered_indices`](Self::ordered_indices);
    /// non-decreasing.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Index of the rank-k neighbor (k is 1-based).
    pub fn neighbor_at_rank(&self, rank: usize) -> Option<usize> {
        self.ordered_indices.get(rank - 1).copied()
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sorts all other indices of `sample` by ascending Euclidean distance to
/// the point at `base_index`, ties broken by ascending index.
pub fn neighbor_ordering(sample: &Sample, base_index: usize) -> Result<NeighborOrdering> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, required: 2 });
    }
    if base_index >= n {
        return Err(Error::IndexOutOfRange {
            index: base_index,
            n,
        });
    }
    let base = sample.point(base_index);
    let mut pairs: Vec<(usize, f64)> = (0..n)
        .filter(|&i| i != base_index)
        .map(|i| (i, euclidean(base, sample.point(i))))
        .collect();
    pairs.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let (ordered_indices, distances) = pairs.into_iter().unzip();
    Ok(NeighborOrdering {
        base_index,
        ordered_indices,
        distances,
    })
}

/// Finds the rank-k neighbor of one base point without sorting the whole
/// co-sample: O(n) selection under the same (distance, index) order as
/// [`neighbor_ordering`].
pub fn kth_neighbor(sample: &Sample, base_index: usize, rank: usize) -> Result<usize> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, required: 2 });
    }
    if base_index >= n {
        return Err(Error::IndexOutOfRange {
            index: base_index,
            n,
        });
    }
    validate_rank(rank, n)?;
    let base = sample.point(base_index);
    let mut pairs: Vec<(usize, f64)> = (0..n)
        .filter(|&i| i != base_index)
        .map(|i| (i, euclidean(base, sample.point(i))))
        .collect();
    let (_, kth, _) =
        pairs.select_nth_unstable_by(rank - 1, |a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(kth.0)
}

fn validate_rank(rank: usize, n: usize) -> Result<()> {
    if rank == 0 || rank > n - 1 {
        return Err(Error::RankOutOfRange { rank, max: n - 1 });
    }
    Ok(())
}

/// How a batch resolves neighbor queries.
enum NeighborLookup<'a> {
    /// Full ordering table, one entry per base index.
    Cached(&'a [NeighborOrdering]),
    /// Per-draw O(n) selection.
    OnDemand,
}

impl NeighborLookup<'_> {
    fn neighbor(&self, sample: &Sample, base: usize, rank: usize) -> usize {
        match self {
            NeighborLookup::Cached(table) => table[base]
                .neighbor_at_rank(rank)
                .expect("rank validated against sample size"),
            NeighborLookup::OnDemand => {
                kth_neighbor(sample, base, rank).expect("rank validated against sample size")
            }
        }
    }
}

/// One synthetic draw; writes the interpolated point into `out`.
fn draw_into(
    sample: &Sample,
    config: &SmoteConfig,
    lookup: &NeighborLookup<'_>,
    src: &mut impl UniformSource,
    out: &mut [f64],
) {
    let n = sample.len();
    let base = unit_to_index(src.next_unit(), n);
    let rank = match config.variant {
        SmoteVariant::FixedRank => config.rank,
        SmoteVariant::RandomFromPool => 1 + unit_to_index(src.next_unit(), config.rank),
    };
    let neighbor = lookup.neighbor(sample, base, rank);
    let lambda = src.next_unit();
    let base_pt = sample.point(base);
    let nb_pt = sample.point(neighbor);
    for (slot, (&x, &y)) in out.iter_mut().zip(base_pt.iter().zip(nb_pt)) {
        *slot = x + lambda * (y - x);
    }
}

/// Draws one synthetic point toward the rank-k nearest neighbor.
///
/// Consumes exactly two uniform draws: base index, then lambda.
pub fn smote_k(
    sample: &Sample,
    config: &SmoteConfig,
    src: &mut impl UniformSource,
) -> Result<Point> {
    if config.variant != SmoteVariant::FixedRank {
        return Err(Error::DomainError {
            reason: "smote_k requires the fixed-rank variant".into(),
        });
    }
    single_draw(sample, config, src)
}

/// Draws one synthetic point toward a neighbor chosen uniformly from the
/// K nearest.
///
/// Consumes exactly three uniform draws: base index, pool choice, lambda.
/// The pool-choice draw is consumed even when `K = 1`.
pub fn smote_big_k(
    sample: &Sample,
    config: &SmoteConfig,
    src: &mut impl UniformSource,
) -> Result<Point> {
    if config.variant != SmoteVariant::RandomFromPool {
        return Err(Error::DomainError {
            reason: "smote_big_k requires the random-pool variant".into(),
        });
    }
    single_draw(sample, config, src)
}

fn single_draw(
    sample: &Sample,
    config: &SmoteConfig,
    src: &mut impl UniformSource,
) -> Result<Point> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, required: 2 });
    }
    validate_rank(config.rank, n)?;
    let mut coords = vec![0.0; sample.dim()];
    draw_into(sample, config, &NeighborLookup::OnDemand, src, &mut coords);
    Ok(Point::new(coords))
}

/// Generates `count` synthetic points.
///
/// Synthetic point `j` draws from the counter-based stream
/// `(config.seed, j)`, so the batch is a pure function of
/// `(sample, config, count)` at any thread count. For small samples that
/// are drawn from many times the full neighbor ordering table is built
/// once and shared.
pub fn generate_batch(sample: &Sample, config: &SmoteConfig, count: usize) -> Result<Sample> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, required: 2 });
    }
    validate_rank(config.rank, n)?;
    if count == 0 {
        return Err(Error::InvalidCount);
    }

    let table: Option<Vec<NeighborOrdering>> = if n <= MAX_CACHED_N && count >= n {
        Some(
            (0..n)
                .map(|i| neighbor_ordering(sample, i).expect("validated sample"))
                .collect(),
        )
    } else {
        None
    };
    let lookup = match &table {
        Some(t) => NeighborLookup::Cached(t),
        None => NeighborLookup::OnDemand,
    };

    let dim = sample.dim();
    let mut data = vec![0.0; count * dim];
    data.par_chunks_mut(BATCH_CHUNK * dim)
        .enumerate()
        .for_each(|(chunk_idx, out_chunk)| {
            let first_draw = chunk_idx * BATCH_CHUNK;
            for (local, out) in out_chunk.chunks_exact_mut(dim).enumerate() {
                let draw = (first_draw + local) as u64;
                let mut src = DrawStream::new(config.seed, draw);
                draw_into(sample, config, &lookup, &mut src, out);
            }
        });

    Sample::new(data, dim)
}
