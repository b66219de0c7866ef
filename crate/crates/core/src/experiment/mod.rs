//! Convergence studies and discontinuity reconstructions on the unit square.

mod convergence;
mod discontinuity;
mod metrics;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{shape_parameter_for_level, KernelFamily, WeightKernel};
use crate::points::{
    fill_distance, halton_points, read_points_csv, regular_grid, FillDistanceEstimate, PointSet,
    DEFAULT_PROBE_RESOLUTION,
};
use crate::smoothness::{default_min_size, RadiusRule, DEFAULT_STENCIL_C};
use crate::test_functions::TestField;
use crate::weno::{Mode, WenoConfig};

pub use convergence::{convergence_study, ConvergenceReport, ConvergenceRow, UncoveredPoint};
pub use discontinuity::{
    diffusion_width, discontinuity_experiment, DiscontinuityReport, ErrorField, ModeSummary,
};
pub use metrics::{convergence_rate, error_metrics, Rate};

/// Default evaluation grid density per axis.
pub const DEFAULT_EVAL_GRID_N: usize = 101;
/// Errors at or below this are treated as exact reproduction when rates
/// are computed.
pub const EXACT_ERROR_TOL: f64 = 1e-12;

/// Where the nodes of each level come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointSource {
    /// `(2^l + 1)^2` regular grid.
    Grid,
    /// `(2^l + 1)^2` Halton points.
    Halton,
    /// Node coordinates from an `x,y,f` file; values are resampled from the
    /// configured field. Only valid with a single level.
    Csv { path: PathBuf },
}

/// How the kernel shape parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ShapeRule {
    /// `floor((2^l + 1) / 2) / sqrt(2)` at level `l`.
    Level,
    Explicit { eps_shape: f64 },
}

impl ShapeRule {
    pub fn eps_shape(&self, level: u32) -> Result<f64> {
        match *self {
            ShapeRule::Level => shape_parameter_for_level(level),
            ShapeRule::Explicit { eps_shape } => Ok(eps_shape),
        }
    }
}

/// Everything needed to rerun an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub levels: Vec<u32>,
    pub kernel: KernelFamily,
    pub shape: ShapeRule,
    pub points: PointSource,
    pub field: TestField,
    pub eval_grid_n: usize,
    pub stencil_c: f64,
    /// `None` means `2 (dim + 1)`.
    pub stencil_min_size: Option<usize>,
    pub weno: WenoConfig,
    pub modes: Vec<Mode>,
    pub probe_resolution: usize,
    pub allow_uncovered: bool,
    /// Band parameter: WENO accuracy is measured at distance `>= h (1 + eps0)`
    /// from the discontinuity.
    pub eps0: f64,
    /// Error level that counts as diffusion.
    pub diffusion_threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            levels: vec![4, 5, 6, 7],
            kernel: KernelFamily::WendlandC2,
            shape: ShapeRule::Level,
            points: PointSource::Grid,
            field: TestField::Franke,
            eval_grid_n: DEFAULT_EVAL_GRID_N,
            stencil_c: DEFAULT_STENCIL_C,
            stencil_min_size: None,
            weno: WenoConfig::default(),
            modes: vec![Mode::Linear, Mode::Weno],
            probe_resolution: DEFAULT_PROBE_RESOLUTION,
            allow_uncovered: false,
            eps0: 0.5,
            diffusion_threshold: 0.1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::invalid("at least one level is required"));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("levels must be strictly ascending"));
        }
        if self.levels[0] < 1 {
            return Err(Error::invalid("levels start at 1"));
        }
        if matches!(self.points, PointSource::Csv { .. }) && self.levels.len() != 1 {
            return Err(Error::invalid("a CSV point source takes exactly one level"));
        }
        if self.eval_grid_n < 2 {
            return Err(Error::invalid("eval_grid_n must be at least 2"));
        }
        if !(self.stencil_c.is_finite() && self.stencil_c > 0.0) {
            return Err(Error::invalid("stencil_c must be positive"));
        }
        if self.stencil_min_size == Some(0) {
            return Err(Error::invalid("stencil_min_size must be positive"));
        }
        if self.modes.is_empty() {
            return Err(Error::invalid("at least one mode is required"));
        }
        if self.probe_resolution < 2 {
            return Err(Error::invalid("probe_resolution must be at least 2"));
        }
        if !(self.eps0.is_finite() && self.eps0 >= 0.0) {
            return Err(Error::invalid("eps0 must be non-negative"));
        }
        if !(self.diffusion_threshold > 0.0 && self.diffusion_threshold.is_finite()) {
            return Err(Error::invalid("diffusion threshold must be positive"));
        }
        if let ShapeRule::Explicit { eps_shape } = self.shape {
            WeightKernel::new(self.kernel, eps_shape)?;
        }
        Ok(())
    }

    /// Nodes for `level`, sampled from the configured field.
    pub fn nodes(&self, level: u32) -> Result<PointSet> {
        let f = |x, y| self.field.eval(x, y);
        match &self.points {
            PointSource::Grid => regular_grid(level, f),
            PointSource::Halton => {
                let side = (1usize << level) + 1;
                halton_points(side * side, f)
            }
            PointSource::Csv { path } => read_points_csv(path)?.resample(f),
        }
    }

    pub fn kernel_for(&self, level: u32) -> Result<WeightKernel> {
        WeightKernel::new(self.kernel, self.shape.eps_shape(level)?)
    }

    pub fn radius_rule(&self, h: f64, dim: usize) -> Result<RadiusRule> {
        RadiusRule::with_min_size(
            self.stencil_c,
            h,
            self.stencil_min_size.unwrap_or_else(|| default_min_size(dim)),
        )
    }

    pub fn fill_distance(&self, ps: &PointSet) -> Result<FillDistanceEstimate> {
        fill_distance(ps, self.probe_resolution)
    }
}

/// Cell-centred `n x n` evaluation grid on the unit square, x fastest.
pub fn evaluation_grid(n: usize) -> Vec<[f64; 2]> {
    let step = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push([(i as f64 + 0.5) * step, (j as f64 + 0.5) * step]);
        }
    }
    out
}
