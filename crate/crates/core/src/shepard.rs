//! Normalized kernel weights and the linear Shepard quasi-interpolant.

use crate::error::{Error, Result};
use crate::kernels::RadialKernel;
use crate::points::PointSet;

/// Sparse weights at one evaluation point, sorted by node index.
///
/// Only nodes with a strictly positive kernel value appear.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    point: Vec<f64>,
    entries: Vec<(usize, f64)>,
}

impl WeightVector {
    /// Builds a weight vector from `(index, weight)` pairs. Entries are
    /// sorted by index; no normalization happens here.
    pub fn from_entries(point: Vec<f64>, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, _)| i);
        WeightVector { point, entries }
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    /// Weight of node `i`, zero when absent.
    pub fn get(&self, i: usize) -> f64 {
        self.entries
            .binary_search_by_key(&i, |&(j, _)| j)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    /// `sum_i w_i values[i]`, accumulated in ascending index order.
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * values[i]).sum()
    }
}

/// Optimal Shepard weights `W_i(x) = omega_i(x) / sum_j omega_j(x)`.
pub fn shepard_weights<K: RadialKernel + ?Sized>(
    ps: &PointSet,
    kernel: &K,
    x: &[f64],
) -> Result<WeightVector> {
    check_point(ps, x)?;
    let radius = kernel.support_radius();
    let mut entries: Vec<(usize, f64)> = ps
        .neighbors_with_distance(x, radius)
        .into_iter()
        .map(|(i, d)| (i, kernel.weight(d)))
        .filter(|&(_, w)| w > 0.0)
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptySupport {
            point: x.to_vec(),
            radius,
        });
    }
    let total: f64 = entries.iter().map(|&(_, w)| w).sum();
    for e in &mut entries {
        e.1 /= total;
    }
    Ok(WeightVector {
        point: x.to_vec(),
        entries,
    })
}

/// Linear Shepard value `sum_i W_i(x) f_i`.
pub fn eval_shepard<K: RadialKernel + ?Sized>(ps: &PointSet, kernel: &K, x: &[f64]) -> Result<f64> {
    Ok(shepard_weights(ps, kernel, x)?.dot(ps.values()))
}

pub(crate) fn check_point(ps: &PointSet, x: &[f64]) -> Result<()> {
    if x.len() != ps.dim() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, point set is {}-dimensional",
            x.len(),
            ps.dim()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("evaluation point is not finite"));
    }
    Ok(())
}
