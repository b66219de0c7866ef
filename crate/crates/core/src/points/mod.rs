//! Node sets, generators and radius queries.

mod csv_io;
mod halton;
mod index;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use csv_io::{read_points_csv, read_queries_csv, write_points_csv};
pub use halton::radical_inverse;
use index::GridIndex;

/// Default probe density for [`fill_distance`].
pub const DEFAULT_PROBE_RESOLUTION: usize = 512;

/// Axis-aligned box the nodes are declared to live in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn unit(dim: usize) -> Self {
        BoundingBox {
            min: vec![0.0; dim],
            max: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

/// Distinct nodes in `R^dim` with one sample per node and a radius index.
///
/// Immutable once built; all queries take `&self`.
#[derive(Debug, Clone)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    values: Vec<f64>,
    bounds: BoundingBox,
    index: GridIndex,
}

impl PointSet {
    /// Builds a point set from flattened coordinates (`dim` entries per node).
    ///
    /// The bounding box defaults to the tight box around the nodes.
    pub fn new(dim: usize, coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "coordinate buffer of length {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        let n = coords.len() / dim;
        if values.len() != n {
            return Err(Error::invalid(format!(
                "{} values supplied for {} nodes",
                values.len(),
                n
            )));
        }
        if n == 0 {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        if let Some(bad) = coords.iter().chain(&values).position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite entry at flat position {bad}")));
        }
        check_distinct(dim, &coords)?;

        let mut bounds = BoundingBox {
            min: vec![f64::INFINITY; dim],
            max: vec![f64::NEG_INFINITY; dim],
        };
        for p in coords.chunks_exact(dim) {
            for (k, &v) in p.iter().enumerate() {
                bounds.min[k] = bounds.min[k].min(v);
                bounds.max[k] = bounds.max[k].max(v);
            }
        }
        let index = GridIndex::build(dim, &coords);
        Ok(PointSet {
            dim,
            coords,
            values,
            bounds,
            index,
        })
    }

    /// Replaces the bounding box. Every node must lie inside it.
    pub fn with_bounds(mut self, bounds: BoundingBox) -> Result<Self> {
        if bounds.dim() != self.dim || bounds.max.len() != self.dim {
            return Err(Error::invalid("bounding box dimension mismatch"));
        }
        if let Some(i) = (0..self.len()).find(|&i| !bounds.contains(self.node(i))) {
            return Err(Error::invalid(format!("node {i} lies outside the bounding box")));
        }
        self.bounds = bounds;
        Ok(self)
    }

    /// Same nodes carrying new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::invalid(format!(
                "{} values supplied for {} nodes",
                values.len(),
                self.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite value"));
        }
        Ok(PointSet {
            values,
            ..self.clone()
        })
    }

    /// Resamples the values from a 2-D field.
    pub fn resample(&self, field: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::invalid("resample needs a 2-D point set"));
        }
        let values = self.coords.chunks_exact(2).map(|p| field(p[0], p[1])).collect();
        self.with_values(values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &BoundingBox {
        &self.bounds
    }

    /// Indices of nodes with `|x_i - center| < radius`, ascending.
    pub fn neighbors_within(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.index
            .for_each_within(&self.coords, center, radius, |i, _| out.push(i));
        out.sort_unstable();
        out
    }

    /// Like [`neighbors_within`](Self::neighbors_within) but also returns
    /// the distances, sorted by index.
    pub fn neighbors_with_distance(&self, center: &[f64], radius: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.index
            .for_each_within(&self.coords, center, radius, |i, d| out.push((i, d)));
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }

    /// Nearest node and its distance.
    pub fn nearest(&self, center: &[f64]) -> (usize, f64) {
        self.index
            .nearest(&self.coords, center)
            .expect("point sets are never empty")
    }
}

fn check_distinct(dim: usize, coords: &[f64]) -> Result<()> {
    let n = coords.len() / dim;
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| &coords[i * dim..(i + 1) * dim];
    order.sort_unstable_by(|&a, &b| {
        key(a)
            .iter()
            .zip(key(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for w in order.windows(2) {
        if key(w[0]) == key(w[1]) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(Error::DuplicateNodes(a, b));
        }
    }
    Ok(())
}

/// The `(2^l + 1)^2` regular grid `{(i/2^l, j/2^l)}` in row-major order
/// (x varies fastest), sampling `field` at every node.
pub fn regular_grid(level: u32, field: impl Fn(f64, f64) -> f64) -> Result<PointSet> {
    if level < 1 {
        return Err(Error::invalid("grid level must be at least 1"));
    }
    if level > 20 {
        return Err(Error::invalid("grid level above 20 is not supported"));
    }
    let m = 1usize << level;
    let step = m as f64;
    let side = m + 1;
    let mut coords = Vec::with_capacity(2 * side * side);
    let mut values = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            let (x, y) = (i as f64 / step, j as f64 / step);
            coords.extend_from_slice(&[x, y]);
            values.push(field(x, y));
        }
    }
    PointSet::new(2, coords, values)?.with_bounds(BoundingBox::unit(2))
}

/// First index used by [`halton_points`]. Index 0 maps to the origin.
pub const HALTON_START: u64 = 1;

/// `count` Halton points in bases (2, 3) starting at index 1.
pub fn halton_points(count: usize, field: impl Fn(f64, f64) -> f64) -> Result<PointSet> {
    halton_points_from(HALTON_START, count, field)
}

/// Halton points `(phi_2(k), phi_3(k))` for `k = start .. start + count`.
pub fn halton_points_from(
    start: u64,
    count: usize,
    field: impl Fn(f64, f64) -> f64,
) -> Result<PointSet> {
    if count < 1 {
        return Err(Error::invalid("halton point count must be at least 1"));
    }
    let mut coords = Vec::with_capacity(2 * count);
    let mut values = Vec::with_capacity(count);
    for k in start..start + count as u64 {
        let (x, y) = (radical_inverse(k, 2), radical_inverse(k, 3));
        coords.extend_from_slice(&[x, y]);
        values.push(field(x, y));
    }
    PointSet::new(2, coords, values)?.with_bounds(BoundingBox::unit(2))
}

/// Estimate of the fill distance over the bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillDistanceEstimate {
    pub h: f64,
    pub probe_resolution: usize,
}

impl FillDistanceEstimate {
    /// Diagonal of one probe cell; bounds the underestimate of `h`.
    pub fn probe_cell_diagonal(&self, bounds: &BoundingBox) -> f64 {
        let r = (self.probe_resolution - 1) as f64;
        bounds
            .min
            .iter()
            .zip(&bounds.max)
            .map(|(lo, hi)| ((hi - lo) / r).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Largest nearest-node distance over a `probe_resolution^dim` lattice
/// spanning the bounding box (corners included).
pub fn fill_distance(ps: &PointSet, probe_resolution: usize) -> Result<FillDistanceEstimate> {
    if probe_resolution < 2 {
        return Err(Error::invalid("probe resolution must be at least 2"));
    }
    let dim = ps.dim();
    let total = probe_resolution
        .checked_pow(dim as u32)
        .filter(|&t| t <= 1 << 30)
        .ok_or_else(|| Error::invalid("probe lattice too large"))?;
    let bounds = ps.bounds();
    let r = (probe_resolution - 1) as f64;
    let h = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut rem = flat;
            let mut p = vec![0.0; dim];
            for (k, pk) in p.iter_mut().enumerate() {
                let idx = rem % probe_resolution;
                rem /= probe_resolution;
                let t = idx as f64 / r;
                *pk = bounds.min[k] + t * (bounds.max[k] - bounds.min[k]);
            }
            ps.nearest(&p).1
        })
        .reduce(|| 0.0, f64::max);
    if h <= 0.0 {
        return Err(Error::invalid("fill distance estimate is zero; bounding box is degenerate"));
    }
    Ok(FillDistanceEstimate {
        h,
        probe_resolution,
    })
}
