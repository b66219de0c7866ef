use std::sync::Arc;

use serde::Serialize;

use super::{evaluation_grid, ExperimentConfig};
use crate::error::{Error, Result};
use crate::smoothness::all_indicators;
use crate::test_functions::Geometry;
use crate::weno::{Interpolant, Mode};

/// Reconstruction and pointwise error on the evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorField {
    pub mode: Mode,
    pub n: usize,
    /// Fill distance of the node set the field was computed from.
    pub h: f64,
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub dist_gamma: Vec<f64>,
}

impl ErrorField {
    /// Largest error among points whose distance to the curve satisfies `keep`.
    pub fn max_error_where(&self, keep: impl Fn(f64) -> bool) -> Option<f64> {
        self.errors
            .iter()
            .zip(&self.dist_gamma)
            .filter(|(_, &d)| keep(d))
            .map(|(&e, _)| e)
            .reduce(f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Largest distance to the curve among points with error above
/// `threshold`, in units of the fill distance. Zero when no point exceeds it.
pub fn diffusion_width(ef: &ErrorField, threshold: f64) -> f64 {
    ef.errors
        .iter()
        .zip(&ef.dist_gamma)
        .filter(|(&e, _)| e > threshold)
        .map(|(_, &d)| d)
        .fold(0.0, f64::max)
        / ef.h
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub max_error: f64,
    /// Max error at distance `>= h (1 + eps0)` from the curve.
    pub band_max_error: Option<f64>,
    /// Max error within `c h` of the curve.
    pub near_max_error: Option<f64>,
    /// [`diffusion_width`] at the configured threshold.
    pub diffusion_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscontinuityReport {
    pub config: ExperimentConfig,
    pub level: u32,
    pub geometry: Geometry,
    pub h: f64,
    pub summaries: Vec<ModeSummary>,
    pub fields: Vec<ErrorField>,
}

impl DiscontinuityReport {
    pub fn field(&self, mode: Mode) -> Option<&ErrorField> {
        self.fields.iter().find(|f| f.mode == mode)
    }

    pub fn summary(&self, mode: Mode) -> Option<&ModeSummary> {
        self.summaries.iter().find(|s| s.mode == mode)
    }
}

/// Reconstructs the piecewise field at `level` with every configured mode.
pub fn discontinuity_experiment(cfg: &ExperimentConfig, level: u32) -> Result<DiscontinuityReport> {
    cfg.validate()?;
    let geometry = cfg
        .field
        .geometry()
        .ok_or_else(|| Error::invalid("discontinuity experiments need a piecewise field"))?;
    let ps = cfg.nodes(level)?;
    let h = cfg.fill_distance(&ps)?.h;
    let rule = cfg.radius_rule(h, ps.dim())?;
    let indicators = all_indicators(&ps, &rule)?;
    let base = Interpolant::new(
        Arc::new(ps),
        cfg.kernel_for(level)?,
        Arc::new(indicators),
        cfg.weno,
        cfg.modes[0],
    )?;

    let zs = evaluation_grid(cfg.eval_grid_n);
    let exact: Vec<f64> = zs.iter().map(|z| cfg.field.eval(z[0], z[1])).collect();
    let dist: Vec<f64> = zs.iter().map(|z| geometry.distance(z[0], z[1])).collect();
    let band = h * (1.0 + cfg.eps0);
    let near = rule.radius();

    let mut fields = Vec::new();
    let mut summaries = Vec::new();
    for &mode in &cfg.modes {
        let interp = base.with_mode(mode);
        let mut keep = vec![true; zs.len()];
        let values: Vec<f64> = match interp.eval_batch(&zs) {
            Ok(v) => v,
            Err(Error::UncoveredPoints { indices, .. }) if cfg.allow_uncovered => {
                for &i in &indices {
                    keep[i] = false;
                }
                interp
                    .eval_each(&zs)
                    .into_iter()
                    .map(|r| r.unwrap_or(f64::NAN))
                    .collect()
            }
            Err(e) => return Err(e),
        };
        let idx: Vec<usize> = (0..zs.len()).filter(|&i| keep[i]).collect();
        let field = ErrorField {
            mode,
            n: cfg.eval_grid_n,
            h,
            points: idx.iter().map(|&i| zs[i]).collect(),
            values: idx.iter().map(|&i| values[i]).collect(),
            errors: idx.iter().map(|&i| (exact[i] - values[i]).abs()).collect(),
            dist_gamma: idx.iter().map(|&i| dist[i]).collect(),
        };
        summaries.push(ModeSummary {
            mode,
            max_error: field.max_error(),
            band_max_error: field.max_error_where(|d| d >= band),
            near_max_error: field.max_error_where(|d| d <= near),
            diffusion_width: diffusion_width(&field, cfg.diffusion_threshold),
        });
        fields.push(field);
    }
    Ok(DiscontinuityReport {
        config: cfg.clone(),
        level,
        geometry,
        h,
        summaries,
        fields,
    })
}
