mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use wenoshep_core::experiment::{
    convergence_study, discontinuity_experiment, ExperimentConfig, ShapeRule,
};
use wenoshep_core::points::{read_points_csv, read_queries_csv, DEFAULT_PROBE_RESOLUTION};
use wenoshep_core::report::{emit_report, fmt_f64, indicators_csv, write_text, ReportFormat};
use wenoshep_core::smoothness::default_min_size;
use wenoshep_core::{
    all_indicators, fill_distance, Error as CoreError, Geometry, Interpolant, KernelFamily, Mode,
    RadiusRule, TestField, WeightKernel, WenoConfig,
};

use config::{
    parse_eps_rule, parse_field, parse_from, parse_levels, parse_modes, parse_points, usage,
    FileConfig, UsageError,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_UNCOVERED: u8 = 2;
const EXIT_MALFORMED: u8 = 3;

#[derive(Parser)]
#[command(name = "wenoshep", version, about = "Linear and WENO-Shepard experiments on scattered data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table of maximum and RMS errors over refinement levels.
    Converge(ConvergeArgs),
    /// Reconstruction of a piecewise field with a jump across a curve.
    Discont(DiscontArgs),
    /// Evaluate an interpolant built from a node file at query points.
    Eval(EvalArgs),
}

/// Options shared by every subcommand. Each may also be set in the config file.
#[derive(Args)]
struct Shared {
    /// `key=value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight kernel: w2 or w4.
    #[arg(long)]
    kernel: Option<String>,
    /// Explicit kernel shape parameter instead of the level rule.
    #[arg(long)]
    eps_shape: Option<String>,
    /// Shape parameter rule; `level` ties the support to the level.
    #[arg(long)]
    eps_rule: Option<String>,
    /// Stencil radius multiplier for the smoothness indicators.
    #[arg(long)]
    stencil_c: Option<String>,
    /// Minimum number of stencil members.
    #[arg(long)]
    stencil_min_size: Option<String>,
    /// Regularization added to the indicators in the nonlinear weights.
    #[arg(long)]
    weno_epsilon: Option<String>,
    /// Power applied to the regularized indicators.
    #[arg(long)]
    weno_t: Option<String>,
    /// linear, weno or both.
    #[arg(long)]
    mode: Option<String>,
    /// Probe grid resolution per axis for the fill distance.
    #[arg(long)]
    probe_resolution: Option<String>,
    /// Skip evaluation points with empty support instead of aborting.
    #[arg(long)]
    allow_uncovered: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    shared: Shared,
    /// grid, halton, or a path to an x,y,f file.
    #[arg(long)]
    points: Option<String>,
    /// Levels, e.g. 4..7 or 4,5,6.
    #[arg(long)]
    levels: Option<String>,
    /// franke, piecewise, line, circle, square or constant:VALUE.
    #[arg(long)]
    field: Option<String>,
    /// Jump curve of the piecewise field: line, circle or square.
    #[arg(long)]
    gamma: Option<String>,
    /// Evaluation grid points per axis.
    #[arg(long)]
    eval_grid_n: Option<String>,
    /// csv, json or both.
    #[arg(long)]
    format: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscontArgs {
    #[command(flatten)]
    shared: Shared,
    /// line, circle or square.
    #[arg(long)]
    gamma: Option<String>,
    /// grid, halton, or a path to an x,y,f file.
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    eval_grid_n: Option<String>,
    /// Band parameter: accuracy is measured at distance >= h (1 + eps0).
    #[arg(long)]
    eps0: Option<String>,
    /// Error level counted as diffusion.
    #[arg(long)]
    threshold: Option<String>,
    /// Also write indicators.csv.
    #[arg(long)]
    dump_indicators: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    shared: Shared,
    /// Nodes with values, header x,y,f.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Query points, header x,y.
    #[arg(long)]
    query: Option<PathBuf>,
    /// Take the shape parameter from the level rule.
    #[arg(long)]
    level: Option<String>,
    /// Output CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_MALFORMED)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::EmptySupport { .. } | CoreError::UncoveredPoints { .. } => EXIT_UNCOVERED,
                CoreError::Io { .. } => EXIT_FAILURE,
                _ => EXIT_MALFORMED,
            };
        }
        if cause.is::<UsageError>() {
            return EXIT_MALFORMED;
        }
    }
    EXIT_FAILURE
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Converge(args) => converge(args),
        Command::Discont(args) => discont(args),
        Command::Eval(args) => eval(args),
    }
}

fn path_arg(file: &FileConfig, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>> {
    match flag {
        Some(p) => Ok(Some(p)),
        None => file.pick(key, None, |s| Ok(PathBuf::from(s))),
    }
}

/// Fills the fields of `cfg` controlled by the shared options.
fn apply_shared(cfg: &mut ExperimentConfig, s: &Shared, file: &FileConfig) -> Result<()> {
    if let Some(k) = file.pick("kernel", s.kernel.as_deref(), parse_from::<KernelFamily>)? {
        cfg.kernel = k;
    }
    let eps_shape = file.pick("eps_shape", s.eps_shape.as_deref(), parse_from::<f64>)?;
    let level_rule = file.pick("eps_rule", s.eps_rule.as_deref(), parse_eps_rule)?.is_some();
    match (eps_shape, level_rule) {
        (Some(_), true) => return Err(usage("eps-shape and eps-rule are mutually exclusive")),
        (Some(e), false) => cfg.shape = ShapeRule::Explicit { eps_shape: e },
        (None, _) => cfg.shape = ShapeRule::Level,
    }
    if let Some(c) = file.pick("stencil_c", s.stencil_c.as_deref(), parse_from::<f64>)? {
        cfg.stencil_c = c;
    }
    cfg.stencil_min_size =
        file.pick("stencil_min_size", s.stencil_min_size.as_deref(), parse_from::<usize>)?;
    cfg.weno = weno_config(s, file)?;
    if let Some(m) = file.pick("mode", s.mode.as_deref(), parse_modes)? {
        cfg.modes = m;
    }
    if let Some(r) = file.pick("probe_resolution", s.probe_resolution.as_deref(), parse_from::<usize>)? {
        cfg.probe_resolution = r;
    }
    cfg.allow_uncovered = file.switch("allow_uncovered", s.allow_uncovered)?;
    Ok(())
}

fn weno_config(s: &Shared, file: &FileConfig) -> Result<WenoConfig> {
    let d = WenoConfig::default();
    let eps = file.pick("weno_epsilon", s.weno_epsilon.as_deref(), parse_from::<f64>)?;
    let t = file.pick("weno_t", s.weno_t.as_deref(), parse_from::<u32>)?;
    WenoConfig::new(eps.unwrap_or(d.epsilon()), t.unwrap_or(d.t())).map_err(|e| usage(e.to_string()))
}

fn validated(cfg: ExperimentConfig) -> Result<ExperimentConfig> {
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn converge(args: ConvergeArgs) -> Result<()> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut cfg = ExperimentConfig::default();
    apply_shared(&mut cfg, &args.shared, &file)?;
    if let Some(p) = file.pick("points", args.points.as_deref(), parse_points)? {
        cfg.points = p;
    }
    if let Some(l) = file.pick("levels", args.levels.as_deref(), parse_levels)? {
        cfg.levels = l;
    }
    if let Some(f) = file.pick("field", args.field.as_deref(), parse_field)? {
        cfg.field = f;
    }
    if let Some(g) = file.pick("gamma", args.gamma.as_deref(), parse_from::<Geometry>)? {
        match cfg.field {
            TestField::Piecewise { .. } => cfg.field = TestField::Piecewise { geometry: g },
            _ => return Err(usage("gamma applies only to the piecewise field")),
        }
    }
    if let Some(n) = file.pick("eval_grid_n", args.eval_grid_n.as_deref(), parse_from::<usize>)? {
        cfg.eval_grid_n = n;
    }
    let formats = file
        .pick("format", args.format.as_deref(), parse_formats)?
        .unwrap_or_else(|| vec![ReportFormat::Csv, ReportFormat::Json]);
    let out = path_arg(&file, "out", args.out)?.ok_or_else(|| usage("--out is required"))?;
    let cfg = validated(cfg)?;

    let report = convergence_study(&cfg)?;
    create_dir(&out)?;
    for format in formats {
        let name = match format {
            ReportFormat::Csv => "convergence.csv",
            ReportFormat::Json => "convergence.json",
        };
        emit_report(&report, format, &out.join(name))?;
    }
    if !report.uncovered.is_empty() {
        let mut text = String::from("l,x,y\n");
        for u in &report.uncovered {
            text.push_str(&format!("{},{},{}\n", u.level, fmt_f64(u.x), fmt_f64(u.y)));
        }
        write_text(&out.join("uncovered.csv"), &text)?;
        eprintln!("warning: {} uncovered evaluation point(s) excluded", report.uncovered.len());
    }
    Ok(())
}

fn parse_formats(s: &str) -> Result<Vec<ReportFormat>, String> {
    if s.trim().eq_ignore_ascii_case("both") {
        return Ok(vec![ReportFormat::Csv, ReportFormat::Json]);
    }
    Ok(vec![parse_from::<ReportFormat>(s)?])
}

fn discont(args: DiscontArgs) -> Result<()> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut cfg = ExperimentConfig::default();
    apply_shared(&mut cfg, &args.shared, &file)?;
    let geometry = file
        .pick("gamma", args.gamma.as_deref(), parse_from::<Geometry>)?
        .unwrap_or(Geometry::Line);
    cfg.field = TestField::Piecewise { geometry };
    if let Some(p) = file.pick("points", args.points.as_deref(), parse_points)? {
        cfg.points = p;
    }
    let level = file.pick("level", args.level.as_deref(), parse_from::<u32>)?.unwrap_or(6);
    cfg.levels = vec![level];
    if let Some(n) = file.pick("eval_grid_n", args.eval_grid_n.as_deref(), parse_from::<usize>)? {
        cfg.eval_grid_n = n;
    }
    if let Some(e) = file.pick("eps0", args.eps0.as_deref(), parse_from::<f64>)? {
        cfg.eps0 = e;
    }
    if let Some(t) = file.pick("threshold", args.threshold.as_deref(), parse_from::<f64>)? {
        cfg.diffusion_threshold = t;
    }
    let dump = file.switch("dump_indicators", args.dump_indicators)?;
    let out = path_arg(&file, "out", args.out)?.ok_or_else(|| usage("--out is required"))?;
    let cfg = validated(cfg)?;

    let report = discontinuity_experiment(&cfg, level)?;
    create_dir(&out)?;
    emit_report(&report, ReportFormat::Csv, &out.join("summary.csv"))?;
    emit_report(&report, ReportFormat::Json, &out.join("summary.json"))?;
    for field in &report.fields {
        emit_report(field, ReportFormat::Csv, &out.join(format!("error_{}.csv", field.mode)))?;
    }
    if dump {
        let ps = cfg.nodes(level)?;
        let h = cfg.fill_distance(&ps)?.h;
        let indicators = all_indicators(&ps, &cfg.radius_rule(h, ps.dim())?)?;
        write_text(&out.join("indicators.csv"), &indicators_csv(&ps, &indicators)?)?;
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let s = &args.shared;
    let file = FileConfig::load(s.config.as_deref())?;
    let data = path_arg(&file, "data", args.data)?.ok_or_else(|| usage("--data is required"))?;
    let query = path_arg(&file, "query", args.query)?.ok_or_else(|| usage("--query is required"))?;
    let out = path_arg(&file, "out", args.out)?.ok_or_else(|| usage("--out is required"))?;
    let family = file
        .pick("kernel", s.kernel.as_deref(), parse_from::<KernelFamily>)?
        .unwrap_or(KernelFamily::WendlandC2);
    let eps_shape = file.pick("eps_shape", s.eps_shape.as_deref(), parse_from::<f64>)?;
    let level = file.pick("level", args.level.as_deref(), parse_from::<u32>)?;
    let level_rule = file.pick("eps_rule", s.eps_rule.as_deref(), parse_eps_rule)?.is_some();
    if level_rule && (eps_shape.is_some() || level.is_none()) {
        return Err(usage("eps-rule=level needs --level and no --eps-shape"));
    }
    let c = file
        .pick("stencil_c", s.stencil_c.as_deref(), parse_from::<f64>)?
        .unwrap_or(wenoshep_core::smoothness::DEFAULT_STENCIL_C);
    let min_size = file.pick("stencil_min_size", s.stencil_min_size.as_deref(), parse_from::<usize>)?;
    let weno = weno_config(s, &file)?;
    let modes = file.pick("mode", s.mode.as_deref(), parse_modes)?.unwrap_or(vec![Mode::Weno]);
    let [mode] = modes[..] else {
        return Err(usage("eval takes a single mode"));
    };
    let probes = file
        .pick("probe_resolution", s.probe_resolution.as_deref(), parse_from::<usize>)?
        .unwrap_or(DEFAULT_PROBE_RESOLUTION);
    let allow_uncovered = file.switch("allow_uncovered", s.allow_uncovered)?;

    let ps = read_points_csv(&data)?;
    let queries = read_queries_csv(&query)?;
    let h = fill_distance(&ps, probes)?.h;
    let kernel = match (eps_shape, level) {
        (Some(e), _) => WeightKernel::new(family, e),
        (None, Some(l)) => WeightKernel::for_level(family, l),
        // Support radius of four fill distances, as the level rule gives on grids.
        (None, None) => WeightKernel::new(family, 1.0 / (4.0 * h)),
    }
    .map_err(|e| usage(e.to_string()))?;
    let rule = RadiusRule::with_min_size(c, h, min_size.unwrap_or_else(|| default_min_size(ps.dim())))
        .map_err(|e| usage(e.to_string()))?;
    let indicators = all_indicators(&ps, &rule)?;
    let interp = Interpolant::new(Arc::new(ps), kernel, Arc::new(indicators), weno, mode)?;

    let mut text = String::from("x,y,value\n");
    let mut skipped = 0usize;
    if allow_uncovered {
        for (q, r) in queries.iter().zip(interp.eval_each(&queries)) {
            match r {
                Ok(v) => text.push_str(&format!("{},{},{}\n", fmt_f64(q[0]), fmt_f64(q[1]), fmt_f64(v))),
                Err(CoreError::EmptySupport { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    } else {
        for (q, v) in queries.iter().zip(interp.eval_batch(&queries)?) {
            text.push_str(&format!("{},{},{}\n", fmt_f64(q[0]), fmt_f64(q[1]), fmt_f64(v)));
        }
    }
    write_text(&out, &text)?;
    if skipped > 0 {
        eprintln!("warning: {skipped} uncovered query point(s) skipped");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let uncovered: anyhow::Error = CoreError::UncoveredPoints {
            indices: vec![0],
            points: vec![vec![0.0, 0.0]],
        }
        .into();
        assert_eq!(exit_code(&uncovered), EXIT_UNCOVERED);
        let malformed: anyhow::Error = CoreError::Malformed {
            path: "a.csv".into(),
            message: "bad".into(),
        }
        .into();
        assert_eq!(exit_code(&malformed.context("reading input")), EXIT_MALFORMED);
        assert_eq!(exit_code(&usage("bad flag")), EXIT_MALFORMED);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), EXIT_FAILURE);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn csv_points_need_single_level() {
        use wenoshep_core::experiment::PointSource;
        let cfg = ExperimentConfig {
            points: PointSource::Csv { path: "nodes.csv".into() },
            ..Default::default()
        };
        assert!(validated(cfg).is_err());
    }
}
