use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{convergence_rate, error_metrics, Rate};
use super::{evaluation_grid, ExperimentConfig, EXACT_ERROR_TOL};
use crate::error::{Error, Result};
use crate::smoothness::all_indicators;
use crate::weno::{Interpolant, Mode};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: u32,
    pub h: f64,
    pub mae: f64,
    pub rate_inf: Rate,
    pub rmse: f64,
    pub rate_2: Rate,
    pub method: Mode,
    pub nodes: usize,
    pub evaluated: usize,
    pub enlarged_stencils: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncoveredPoint {
    pub level: u32,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    /// Grouped by method (in configured order), ascending level inside.
    pub rows: Vec<ConvergenceRow>,
    pub uncovered: Vec<UncoveredPoint>,
}

impl ConvergenceReport {
    pub fn rows_for(&self, method: Mode) -> impl Iterator<Item = &ConvergenceRow> + '_ {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

struct LevelOutcome {
    level: u32,
    h: f64,
    nodes: usize,
    enlarged: usize,
    /// (mode, mae, rmse, evaluated)
    metrics: Vec<(Mode, f64, f64, usize)>,
    uncovered: Vec<UncoveredPoint>,
}

fn run_level(cfg: &ExperimentConfig, level: u32, zs: &[[f64; 2]]) -> Result<LevelOutcome> {
    let ps = cfg.nodes(level)?;
    let h = cfg.fill_distance(&ps)?.h;
    let rule = cfg.radius_rule(h, ps.dim())?;
    let indicators = all_indicators(&ps, &rule)?;
    let enlarged = indicators.enlarged_nodes().count();
    let nodes = ps.len();
    let base = Interpolant::new(
        Arc::new(ps),
        cfg.kernel_for(level)?,
        Arc::new(indicators),
        cfg.weno,
        cfg.modes[0],
    )?;
    let exact: Vec<f64> = zs.iter().map(|z| cfg.field.eval(z[0], z[1])).collect();

    let mut metrics = Vec::with_capacity(cfg.modes.len());
    let mut uncovered = Vec::new();
    for &mode in &cfg.modes {
        let interp = base.with_mode(mode);
        let results = interp.eval_each(zs);
        let mut errors = Vec::with_capacity(zs.len());
        let mut missing = Vec::new();
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => errors.push((exact[k] - v).abs()),
                Err(Error::EmptySupport { .. }) => missing.push(k),
                Err(e) => return Err(e),
            }
        }
        if !missing.is_empty() {
            if !cfg.allow_uncovered {
                return Err(Error::UncoveredPoints {
                    points: missing.iter().map(|&k| zs[k].to_vec()).collect(),
                    indices: missing,
                });
            }
            // Coverage is mode independent; record it once.
            if uncovered.is_empty() {
                uncovered = missing
                    .iter()
                    .map(|&k| UncoveredPoint {
                        level,
                        x: zs[k][0],
                        y: zs[k][1],
                    })
                    .collect();
            }
        }
        let (mae, rmse) = error_metrics(&errors)?;
        metrics.push((mode, mae, rmse, errors.len()));
    }
    Ok(LevelOutcome {
        level,
        h,
        nodes,
        enlarged,
        metrics,
        uncovered,
    })
}

fn rate_between(prev: (f64, f64), curr: (f64, f64)) -> Result<Rate> {
    let snap = |e: f64| if e <= EXACT_ERROR_TOL { 0.0 } else { e };
    convergence_rate((prev.0, snap(prev.1)), (curr.0, snap(curr.1)))
}

/// Builds both interpolants at every level, evaluates them on the
/// evaluation grid and tabulates maximum and RMS errors with observed rates.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let zs = evaluation_grid(cfg.eval_grid_n);
    let outcomes: Vec<LevelOutcome> = cfg
        .levels
        .par_iter()
        .map(|&l| run_level(cfg, l, &zs))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (m, &mode) in cfg.modes.iter().enumerate() {
        let mut prev: Option<(f64, f64, f64)> = None;
        for o in &outcomes {
            let (_, mae, rmse, evaluated) = o.metrics[m];
            let (rate_inf, rate_2) = match prev {
                None => (Rate::Undefined, Rate::Undefined),
                Some((h0, mae0, rmse0)) => (
                    rate_between((h0, mae0), (o.h, mae))?,
                    rate_between((h0, rmse0), (o.h, rmse))?,
                ),
            };
            rows.push(ConvergenceRow {
                level: o.level,
                h: o.h,
                mae,
                rate_inf,
                rmse,
                rate_2,
                method: mode,
                nodes: o.nodes,
                evaluated,
                enlarged_stencils: o.enlarged,
            });
            prev = Some((o.h, mae, rmse));
        }
    }
    let uncovered = outcomes.into_iter().flat_map(|o| o.uncovered).collect();
    Ok(ConvergenceReport {
        config: cfg.clone(),
        rows,
        uncovered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{PointSource, ShapeRule};
    use crate::test_functions::TestField;

    #[test]
    fn constant_field_is_exact() {
        let cfg = ExperimentConfig {
            levels: vec![3, 4],
            field: TestField::Constant { value: 7.0 },
            eval_grid_n: 30,
            ..Default::default()
        };
        let report = convergence_study(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        for row in &report.rows {
            assert!(row.mae <= 1e-12 && row.rmse <= 1e-12);
            if row.level == 4 {
                assert_eq!(row.rate_inf, Rate::Exact);
                assert_eq!(row.rate_2, Rate::Exact);
            } else {
                assert_eq!(row.rate_inf, Rate::Undefined);
            }
        }
    }

    #[test]
    fn rates_recompute_from_rows() {
        let cfg = ExperimentConfig {
            levels: vec![3, 4, 5],
            eval_grid_n: 40,
            ..Default::default()
        };
        let report = convergence_study(&cfg).unwrap();
        for mode in [Mode::Linear, Mode::Weno] {
            let rows: Vec<_> = report.rows_for(mode).collect();
            for w in rows.windows(2) {
                let r = ((w[0].rmse / w[1].rmse).ln() / (w[0].h / w[1].h).ln()) - w[1].rate_2.value().unwrap();
                assert!(r.abs() <= 1e-12);
                let r = ((w[0].mae / w[1].mae).ln() / (w[0].h / w[1].h).ln()) - w[1].rate_inf.value().unwrap();
                assert!(r.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn uncovered_points_abort_or_are_listed() {
        // A tiny explicit support leaves most evaluation points uncovered.
        let mut cfg = ExperimentConfig {
            levels: vec![3],
            shape: ShapeRule::Explicit { eps_shape: 40.0 },
            points: PointSource::Halton,
            eval_grid_n: 20,
            ..Default::default()
        };
        assert!(matches!(convergence_study(&cfg), Err(Error::UncoveredPoints { .. })));
        cfg.allow_uncovered = true;
        let report = convergence_study(&cfg).unwrap();
        assert!(!report.uncovered.is_empty());
        assert!(report.rows.iter().all(|r| r.evaluated + report.uncovered.len() == 400));
    }
}
