//! Ball stencils, degree-one least-squares fits and smoothness indicators.
//!
//! The indicator of node `i` is the mean absolute residual of the best
//! affine fit to the data on the ball of radius `c h` around `x_i`. It is
//! `O(h^2)` where the data is smooth and stays `O(1)` when a jump crosses
//! the ball.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::PointSet;

/// Default stencil radius multiplier.
pub const DEFAULT_STENCIL_C: f64 = 2.5;

/// Factor applied to the stencil radius while it holds too few nodes.
pub const ENLARGEMENT_FACTOR: f64 = 1.5;

/// Relative pivot size below which the design matrix is treated as rank
/// deficient.
const RANK_TOL: f64 = 1e-10;

/// Stencil radius rule `delta_i = c h`, with a minimum member count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusRule {
    pub c: f64,
    pub h: f64,
    pub min_size: usize,
}

impl RadiusRule {
    /// Rule with the default minimum size `2 (dim + 1)`.
    pub fn new(c: f64, h: f64, dim: usize) -> Result<Self> {
        Self::with_min_size(c, h, default_min_size(dim))
    }

    pub fn with_min_size(c: f64, h: f64, min_size: usize) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(format!("stencil multiplier must be positive, got {c}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("fill distance must be positive, got {h}")));
        }
        if min_size == 0 {
            return Err(Error::invalid("minimum stencil size must be positive"));
        }
        Ok(RadiusRule { c, h, min_size })
    }

    pub fn radius(&self) -> f64 {
        self.c * self.h
    }
}

pub fn default_min_size(dim: usize) -> usize {
    2 * (dim + 1)
}

/// Nodes strictly inside the ball of radius `radius` around node `center_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub center_index: usize,
    /// Ascending node indices; always contains `center_index`.
    pub member_indices: Vec<usize>,
    pub radius: f64,
    /// Number of times the initial radius was multiplied by
    /// [`ENLARGEMENT_FACTOR`].
    pub enlargements: u32,
}

/// Builds the stencil of node `i`, enlarging the radius until it holds at
/// least `rule.min_size` nodes.
pub fn build_stencil(ps: &PointSet, i: usize, rule: &RadiusRule) -> Result<Stencil> {
    if i >= ps.len() {
        return Err(Error::invalid(format!("node index {i} out of range for {} nodes", ps.len())));
    }
    if ps.len() < rule.min_size {
        return Err(Error::TooFewPoints {
            needed: rule.min_size,
            got: ps.len(),
        });
    }
    let center = ps.node(i);
    let mut radius = rule.radius();
    let mut enlargements = 0;
    loop {
        let members = ps.neighbors_within(center, radius);
        if members.len() >= rule.min_size {
            return Ok(Stencil {
                center_index: i,
                member_indices: members,
                radius,
                enlargements,
            });
        }
        radius *= ENLARGEMENT_FACTOR;
        enlargements += 1;
    }
}

/// Affine least-squares fit `p(x) = a + sum_k b_k x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    /// `(a, b_1, ..., b_dim)` in absolute coordinates.
    pub coeffs: Vec<f64>,
    pub residual_mean_abs: f64,
    /// The design matrix was rank deficient and the best constant was used.
    pub rank_deficient: bool,
}

impl LinearFit {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs[0] + self.coeffs[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }
}

/// Least-squares affine fit through `points` (rows of equal length).
///
/// Coordinates are shifted to the centroid before factorization.
pub fn linear_lsq_fit(points: &[&[f64]], values: &[f64]) -> Result<LinearFit> {
    let dim = points.first().map_or(0, |p| p.len());
    if dim == 0 {
        return Err(Error::TooFewPoints { needed: 2, got: points.len() });
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("points have mixed dimensions"));
    }
    let mut center = vec![0.0; dim];
    for p in points {
        for k in 0..dim {
            center[k] += p[k];
        }
    }
    for c in &mut center {
        *c /= points.len() as f64;
    }
    fit_centered(points, values, &center)
}

/// Affine fit with the design matrix centered at `center`.
fn fit_centered(points: &[&[f64]], values: &[f64], center: &[f64]) -> Result<LinearFit> {
    let dim = center.len();
    let m = points.len();
    let n = dim + 1;
    if values.len() != m {
        return Err(Error::invalid(format!("{} values for {} points", values.len(), m)));
    }
    if m < n {
        return Err(Error::TooFewPoints { needed: n, got: m });
    }

    // Column-major design matrix [1 | x - center].
    let mut a = vec![0.0; m * n];
    for (r, p) in points.iter().enumerate() {
        a[r] = 1.0;
        for k in 0..dim {
            a[(k + 1) * m + r] = p[k] - center[k];
        }
    }
    let col_norms: Vec<f64> = (0..n).map(|j| norm(&a[j * m..(j + 1) * m])).collect();

    let centered = match householder_solve(&mut a, m, n, values, &col_norms) {
        Some(sol) => sol,
        None => {
            let mean = values.iter().sum::<f64>() / m as f64;
            return Ok(finish(points, values, center, {
                let mut c = vec![0.0; n];
                c[0] = mean;
                c
            }, true));
        }
    };
    Ok(finish(points, values, center, centered, false))
}

fn finish(
    points: &[&[f64]],
    values: &[f64],
    center: &[f64],
    centered: Vec<f64>,
    rank_deficient: bool,
) -> LinearFit {
    let dim = center.len();
    let abs_sum: f64 = points
        .iter()
        .zip(values)
        .map(|(p, &v)| {
            let fit = centered[0]
                + (0..dim).map(|k| centered[k + 1] * (p[k] - center[k])).sum::<f64>();
            (v - fit).abs()
        })
        .sum();
    let mut coeffs = centered.clone();
    coeffs[0] -= (0..dim).map(|k| centered[k + 1] * center[k]).sum::<f64>();
    LinearFit {
        coeffs,
        residual_mean_abs: abs_sum / points.len() as f64,
        rank_deficient,
    }
}

fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// Householder QR least squares on a column-major `m x n` matrix, consumed
/// in place. Returns `None` when a pivot falls below `RANK_TOL` relative to
/// its original column norm.
fn householder_solve(
    a: &mut [f64],
    m: usize,
    n: usize,
    rhs: &[f64],
    col_norms: &[f64],
) -> Option<Vec<f64>> {
    let mut b = rhs.to_vec();
    let mut diag = vec![0.0; n];
    for j in 0..n {
        let (head, tail) = a.split_at_mut((j + 1) * m);
        let col = &mut head[j * m..];
        let alpha = norm(&col[j..]);
        if alpha <= RANK_TOL * col_norms[j] || alpha == 0.0 {
            return None;
        }
        let alpha = if col[j] > 0.0 { -alpha } else { alpha };
        // v = col[j..] - alpha e_1, stored in place.
        col[j] -= alpha;
        let vnorm2: f64 = col[j..].iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for k in 0..(n - j - 1) {
            let other = &mut tail[k * m..(k + 1) * m];
            let s: f64 = col[j..].iter().zip(&other[j..]).map(|(v, o)| v * o).sum();
            let f = 2.0 * s / vnorm2;
            for (o, v) in other[j..].iter_mut().zip(&col[j..]) {
                *o -= f * v;
            }
        }
        let s: f64 = col[j..].iter().zip(&b[j..]).map(|(v, o)| v * o).sum();
        let f = 2.0 * s / vnorm2;
        for (o, v) in b[j..].iter_mut().zip(&col[j..]) {
            *o -= f * v;
        }
    }
    // Back substitution with R (diag on the diagonal, upper part in `a`).
    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        let mut s = b[j];
        for k in (j + 1)..n {
            s -= a[k * m + j] * x[k];
        }
        x[j] = s / diag[j];
    }
    Some(x)
}

/// Fit of the stencil data, centered at the stencil's center node.
pub fn stencil_fit(ps: &PointSet, stencil: &Stencil) -> Result<LinearFit> {
    let pts: Vec<&[f64]> = stencil.member_indices.iter().map(|&j| ps.node(j)).collect();
    let vals: Vec<f64> = stencil.member_indices.iter().map(|&j| ps.values()[j]).collect();
    fit_centered(&pts, &vals, ps.node(stencil.center_index))
}

/// Mean absolute residual of the affine fit on node `i`'s stencil.
pub fn smoothness_indicator(ps: &PointSet, i: usize, rule: &RadiusRule) -> Result<f64> {
    let stencil = build_stencil(ps, i, rule)?;
    Ok(stencil_fit(ps, &stencil)?.residual_mean_abs)
}

/// Per-node stencil bookkeeping kept next to the indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilInfo {
    pub radius: f64,
    pub members: usize,
    pub enlargements: u32,
    pub rank_deficient: bool,
}

/// Indicators `I_i` for every node of a point set, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorVector {
    indicators: Vec<f64>,
    stencils: Vec<StencilInfo>,
    rule: RadiusRule,
}

impl IndicatorVector {
    /// Wraps precomputed indicators. Entries must be finite and non-negative.
    pub fn from_values(indicators: Vec<f64>, rule: RadiusRule) -> Result<Self> {
        if indicators.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("indicators must be finite and non-negative"));
        }
        let stencils = vec![
            StencilInfo {
                radius: rule.radius(),
                members: 0,
                enlargements: 0,
                rank_deficient: false,
            };
            indicators.len()
        ];
        Ok(IndicatorVector {
            indicators,
            stencils,
            rule,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.indicators
    }

    pub fn get(&self, i: usize) -> f64 {
        self.indicators[i]
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }

    pub fn stencils(&self) -> &[StencilInfo] {
        &self.stencils
    }

    pub fn rule(&self) -> &RadiusRule {
        &self.rule
    }

    /// Nodes whose stencil radius had to grow.
    pub fn enlarged_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.stencils
            .iter()
            .enumerate()
            .filter(|(_, s)| s.enlargements > 0)
            .map(|(i, _)| i)
    }
}

/// Indicators for all nodes. Fits run in parallel; output is in node order.
pub fn all_indicators(ps: &PointSet, rule: &RadiusRule) -> Result<IndicatorVector> {
    let per_node: Vec<(f64, StencilInfo)> = (0..ps.len())
        .into_par_iter()
        .map(|i| {
            let stencil = build_stencil(ps, i, rule)?;
            let fit = stencil_fit(ps, &stencil)?;
            Ok((
                fit.residual_mean_abs,
                StencilInfo {
                    radius: stencil.radius,
                    members: stencil.member_indices.len(),
                    enlargements: stencil.enlargements,
                    rank_deficient: fit.rank_deficient,
                },
            ))
        })
        .collect::<Result<_>>()?;
    let (indicators, stencils) = per_node.into_iter().unzip();
    Ok(IndicatorVector {
        indicators,
        stencils,
        rule: *rule,
    })
}
