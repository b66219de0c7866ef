//! Nonlinear (WENO) reweighting of Shepard weights.
//!
//! Each optimal Shepard weight is damped by `(epsilon + I_i)^t`, where
//! `I_i` is the node's smoothness indicator, then the damped weights are
//! renormalized over the kernel support. Nodes whose stencil is crossed by
//! a discontinuity carry `I_i = O(1)` and end up with negligible weight next
//! to nodes with `I_i = O(h^2)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{RadialKernel, WeightKernel};
use crate::points::{fill_distance, PointSet, DEFAULT_PROBE_RESOLUTION};
use crate::shepard::{shepard_weights, WeightVector};
use crate::smoothness::{all_indicators, IndicatorVector, RadiusRule};

pub const DEFAULT_WENO_EPSILON: f64 = 1e-14;
pub const DEFAULT_WENO_T: u32 = 4;

/// Regularizer `epsilon` and exponent `t` of the damping factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WenoConfig {
    epsilon: f64,
    t: u32,
}

impl Default for WenoConfig {
    fn default() -> Self {
        WenoConfig {
            epsilon: DEFAULT_WENO_EPSILON,
            t: DEFAULT_WENO_T,
        }
    }
}

impl WenoConfig {
    pub fn new(epsilon: f64, t: u32) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::invalid(format!("weno epsilon must be positive, got {epsilon}")));
        }
        if t < 1 {
            return Err(Error::invalid("weno exponent t must be at least 1"));
        }
        // 1 / epsilon^t has to stay finite.
        if (t as f64) * epsilon.log10() < -300.0 {
            return Err(Error::invalid(format!("epsilon^t underflows for epsilon={epsilon}, t={t}")));
        }
        Ok(WenoConfig { epsilon, t })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    #[inline]
    fn damping(&self, indicator: f64) -> f64 {
        (self.epsilon + indicator).powi(self.t as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Weno,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Weno => "weno",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Mode::Linear),
            "weno" => Ok(Mode::Weno),
            other => Err(Error::invalid(format!("unknown mode `{other}`"))),
        }
    }
}

/// `W_i / (epsilon + I_i)^t`, renormalized over the entries of `w`.
pub fn nonlinear_weights(
    w: &WeightVector,
    indicators: &IndicatorVector,
    cfg: &WenoConfig,
) -> Result<WeightVector> {
    if w.is_empty() {
        return Err(Error::invalid("nonlinear weights need a nonempty weight vector"));
    }
    let mut alpha: Vec<(usize, f64)> = w
        .entries()
        .iter()
        .map(|&(i, wi)| (i, wi / cfg.damping(indicators.get(i))))
        .collect();
    let total: f64 = alpha.iter().map(|&(_, a)| a).sum();
    for a in &mut alpha {
        a.1 /= total;
    }
    Ok(WeightVector::from_entries(w.point().to_vec(), alpha))
}

/// Immutable linear or WENO-Shepard quasi-interpolant.
///
/// Cloning is cheap: nodes and indicators are shared.
#[derive(Debug, Clone)]
pub struct Interpolant<K = WeightKernel> {
    points: Arc<PointSet>,
    kernel: K,
    indicators: Arc<IndicatorVector>,
    weno: WenoConfig,
    mode: Mode,
}

impl<K: RadialKernel> Interpolant<K> {
    pub fn new(
        points: Arc<PointSet>,
        kernel: K,
        indicators: Arc<IndicatorVector>,
        weno: WenoConfig,
        mode: Mode,
    ) -> Result<Self> {
        if indicators.len() != points.len() {
            return Err(Error::invalid(format!(
                "{} indicators for {} nodes",
                indicators.len(),
                points.len()
            )));
        }
        Ok(Interpolant {
            points,
            kernel,
            indicators,
            weno,
            mode,
        })
    }

    /// Computes indicators with stencil radius `c h`, where `h` is the
    /// estimated fill distance of `points`.
    pub fn build(points: PointSet, kernel: K, stencil_c: f64, weno: WenoConfig, mode: Mode) -> Result<Self> {
        let h = fill_distance(&points, DEFAULT_PROBE_RESOLUTION)?.h;
        let rule = RadiusRule::new(stencil_c, h, points.dim())?;
        let indicators = all_indicators(&points, &rule)?;
        Self::new(Arc::new(points), kernel, Arc::new(indicators), weno, mode)
    }

    /// Same data and indicators, different mode.
    pub fn with_mode(&self, mode: Mode) -> Self
    where
        K: Clone,
    {
        Interpolant {
            mode,
            ..self.clone()
        }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn indicators(&self) -> &IndicatorVector {
        &self.indicators
    }

    pub fn weno(&self) -> &WenoConfig {
        &self.weno
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Weights used at `x` in the current mode.
    pub fn weights(&self, x: &[f64]) -> Result<WeightVector> {
        let w = shepard_weights(&self.points, &self.kernel, x)?;
        match self.mode {
            Mode::Linear => Ok(w),
            Mode::Weno => nonlinear_weights(&w, &self.indicators, &self.weno),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.weights(x)?.dot(self.points.values()))
    }

    /// Evaluates every point independently, keeping per-point errors.
    pub fn eval_each<P: AsRef<[f64]> + Sync>(&self, xs: &[P]) -> Vec<Result<f64>> {
        xs.par_iter().map(|x| self.eval(x.as_ref())).collect()
    }

    /// Evaluates all points in input order. Uncovered points are gathered
    /// into a single [`Error::UncoveredPoints`].
    pub fn eval_batch<P: AsRef<[f64]> + Sync>(&self, xs: &[P]) -> Result<Vec<f64>> {
        let results = self.eval_each(xs);
        let mut values = Vec::with_capacity(xs.len());
        let mut uncovered = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => values.push(v),
                Err(Error::EmptySupport { .. }) => uncovered.push(i),
                Err(e) => return Err(e),
            }
        }
        if uncovered.is_empty() {
            Ok(values)
        } else {
            let points = uncovered.iter().map(|&i| xs[i].as_ref().to_vec()).collect();
            Err(Error::UncoveredPoints {
                indices: uncovered,
                points,
            })
        }
    }
}
