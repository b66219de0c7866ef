//! CSV and JSON serialization of experiment results.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{ConvergenceReport, DiscontinuityReport, ErrorField, Rate};
use crate::points::PointSet;
use crate::smoothness::IndicatorVector;

/// Formats a float with 17 significant digits, which round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_rate(r: Rate) -> String {
    match r {
        Rate::Undefined => String::new(),
        Rate::Exact => "exact".to_string(),
        Rate::Value(v) => fmt_f64(v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::invalid(format!("unknown report format `{other}`"))),
        }
    }
}

/// A result that can be rendered as CSV text and as a JSON document.
pub trait Report: Serialize {
    fn to_csv(&self) -> String;

    fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::invalid(format!("JSON serialization failed: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => Ok(self.to_csv()),
            ReportFormat::Json => self.to_json(),
        }
    }
}

impl Report for ConvergenceReport {
    fn to_csv(&self) -> String {
        let mut s = String::from("l,h,MAE,rate_inf,RMSE,rate_2,method\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.level,
                fmt_f64(r.h),
                fmt_f64(r.mae),
                fmt_rate(r.rate_inf),
                fmt_f64(r.rmse),
                fmt_rate(r.rate_2),
                r.method
            );
        }
        s
    }
}

impl Report for ErrorField {
    fn to_csv(&self) -> String {
        let mut s = String::from("x,y,value,error,dist_gamma\n");
        for k in 0..self.points.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_f64(self.points[k][0]),
                fmt_f64(self.points[k][1]),
                fmt_f64(self.values[k]),
                fmt_f64(self.errors[k]),
                fmt_f64(self.dist_gamma[k])
            );
        }
        s
    }
}

/// CSV form is the per-mode summary table; the error fields themselves are
/// emitted separately.
impl Report for DiscontinuityReport {
    fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut s = String::from(
            "l,h,geometry,method,max_error,band_max_error,near_max_error,diffusion_width\n",
        );
        for m in &self.summaries {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                self.level,
                fmt_f64(self.h),
                self.geometry,
                m.mode,
                fmt_f64(m.max_error),
                opt(m.band_max_error),
                opt(m.near_max_error),
                fmt_f64(m.diffusion_width)
            );
        }
        s
    }
}

/// `i,x,y,I` rows for a two-dimensional node set.
pub fn indicators_csv(ps: &PointSet, indicators: &IndicatorVector) -> Result<String> {
    if ps.dim() != 2 {
        return Err(Error::invalid("indicator dump needs two-dimensional nodes"));
    }
    if ps.len() != indicators.len() {
        return Err(Error::invalid("indicators do not match the node set"));
    }
    let mut s = String::from("i,x,y,I\n");
    for i in 0..ps.len() {
        let p = ps.node(i);
        let _ = writeln!(
            s,
            "{},{},{},{}",
            i,
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(indicators.get(i))
        );
    }
    Ok(s)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Renders `report` in `format` and writes it to `path`.
pub fn emit_report<R: Report + ?Sized>(report: &R, format: ReportFormat, path: &Path) -> Result<()> {
    write_text(path, &report.render(format)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{convergence_study, ConvergenceRow, ExperimentConfig};
    use crate::weno::Mode;

    fn report() -> ConvergenceReport {
        let row = |level, h, e: f64, rate, method| ConvergenceRow {
            level,
            h,
            mae: e,
            rate_inf: rate,
            rmse: e / 2.0,
            rate_2: rate,
            method,
            nodes: 0,
            evaluated: 0,
            enlarged_stencils: 0,
        };
        ConvergenceReport {
            config: ExperimentConfig::default(),
            rows: vec![
                row(4, 0.25, 0.1, Rate::Undefined, Mode::Linear),
                row(5, 0.125, 0.025, Rate::Value(2.0), Mode::Linear),
                row(4, 0.25, 0.0, Rate::Undefined, Mode::Weno),
                row(5, 0.125, 0.0, Rate::Exact, Mode::Weno),
            ],
            uncovered: vec![],
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, 6.6941e-4, f64::MAX, f64::MIN_POSITIVE, -2.5] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn convergence_schema() {
        let csv = report().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "l,h,MAE,rate_inf,RMSE,rate_2,method");
        assert_eq!(
            lines[1],
            "4,2.5000000000000000e-1,1.0000000000000001e-1,,5.0000000000000003e-2,,linear"
        );
        assert!(lines[2].ends_with(",2.0000000000000000e0,linear"));
        assert!(lines[4].contains(",exact,") && lines[4].ends_with(",exact,weno"));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_mirror_has_config() {
        let v: serde_json::Value = serde_json::from_str(&report().to_json().unwrap()).unwrap();
        assert_eq!(v["config"]["levels"], serde_json::json!([4, 5, 6, 7]));
        assert_eq!(v["config"]["kernel"], "w2");
        assert!(v["rows"][0]["rate_inf"].is_null());
        assert_eq!(v["rows"][3]["rate_2"], "exact");
    }

    #[test]
    fn error_field_schema() {
        let ef = ErrorField {
            mode: Mode::Weno,
            n: 1,
            h: 0.5,
            points: vec![[0.5, 0.5]],
            values: vec![1.0],
            errors: vec![0.25],
            dist_gamma: vec![0.0],
        };
        assert_eq!(
            ef.to_csv(),
            "x,y,value,error,dist_gamma\n5.0000000000000000e-1,5.0000000000000000e-1,\
             1.0000000000000000e0,2.5000000000000000e-1,0.0000000000000000e0\n"
        );
    }

    #[test]
    fn emitted_rates_recompute() {
        let cfg = ExperimentConfig {
            levels: vec![3, 4, 5],
            eval_grid_n: 25,
            ..Default::default()
        };
        let csv = convergence_study(&cfg).unwrap().to_csv();
        let rows: Vec<Vec<String>> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        for w in rows.windows(2).filter(|w| w[0][6] == w[1][6]) {
            let f = |r: &Vec<String>, k: usize| r[k].parse::<f64>().unwrap();
            let hr = (f(&w[0], 1) / f(&w[1], 1)).ln();
            for (e, r) in [(2, 3), (4, 5)] {
                let rate = (f(&w[0], e) / f(&w[1], e)).ln() / hr;
                assert!((rate - f(&w[1], r)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn io_error_names_path() {
        let path = Path::new("/nonexistent-dir/for/sure/out.csv");
        let err = emit_report(&report(), ReportFormat::Csv, path).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/for/sure/out.csv"));
    }
}
