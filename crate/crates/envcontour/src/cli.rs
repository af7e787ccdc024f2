//! Command-line front end. Arguments are resolved into a [`RunConfig`] with
//! every time in hours; that config is echoed next to the outputs and can
//! be fed back through `replay` to reproduce them.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use envcontour_core::calibration::{
    calibrate, generate_synthetic, reference_model, CalibrationOptions, MetOceanSeries, SyntheticSpec,
};
use envcontour_core::contour::{build_contour, three_case_experiment, ContourConfig, ContourResult, ThreeCaseResult};
use envcontour_core::hitting::{
    gaussian_ce, ou_ct_radius, ou_iid_crossing, ou_iid_crossing_approx, ContourTarget, CENSORING_WARN_FRACTION,
};
use envcontour_core::process::{
    PathSimulator, SeaStateModel, SeaStateSimulator, TimeGrid, TrendMode, DEFAULT_YEAR_HOURS,
};
use envcontour_core::{Error as CoreError, UnitVector};

use crate::error::{AppError, AppResult};
use crate::formats::{self, EstimateRow};
use crate::svg;
use crate::units::Duration;

#[derive(Debug, Parser)]
#[command(name = "envcontour", version, about = "Convex environmental contours for non-stationary sea states")]
pub struct Cli {
    /// Hours per year when reading `y` suffixes
    #[arg(long, global = true, default_value_t = DEFAULT_YEAR_HOURS)]
    pub year_hours: f64,

    /// Worker threads; outputs do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Fit the sea-state model to a `t_hours,hs_m,tz_s` series
    Calibrate(CalibrateArgs),
    /// Write one simulated path of a model
    Simulate(SimulateArgs),
    /// Estimate a contour from a model
    Contour(ContourArgs),
    /// Compare OU and i.i.d. contour radii over a range of return periods
    OuStudy(OuStudyArgs),
    /// Write an hourly synthetic series for calibration
    Synth(SynthArgs),
    /// Re-run a command from its echoed config
    Replay {
        /// Config file written by an earlier run
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Input CSV with header `t_hours,hs_m,tz_s`
    pub input: PathBuf,
    /// Output model JSON
    pub output: PathBuf,
    /// Fourier harmonics of the seasonal terms
    #[arg(long, default_value_t = CalibrationOptions::default().n_harmonics)]
    pub harmonics: usize,
    /// Knots of the wave-height smoothers
    #[arg(long, default_value_t = CalibrationOptions::default().n_knots)]
    pub knots: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model JSON
    #[arg(long)]
    pub model: PathBuf,
    /// Output CSV with header `t_hours,hs_m,tz_s`
    #[arg(long, short)]
    pub output: PathBuf,
    /// Length of the path
    #[arg(long, default_value = "1y")]
    pub duration: Duration,
    /// Step length
    #[arg(long, default_value = "3h")]
    pub dt: Duration,
    /// Start time relative to the calibration reference
    #[arg(long, default_value = "0h", allow_hyphen_values = true)]
    pub t0: Duration,
    #[arg(long, default_value = "true")]
    pub trend_mode: TrendMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Path index within the seed
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    /// Model JSON
    #[arg(long)]
    pub model: PathBuf,
    /// Directory for grid, polygon, estimate, diagnostics and config files
    #[arg(long, short)]
    pub out_dir: PathBuf,
    /// Survival horizon of the quantile target
    #[arg(long, conflicts_with = "t_r")]
    pub t_s: Option<Duration>,
    /// Survival probability of the quantile target [default: e^-1]
    #[arg(long, conflicts_with = "t_r")]
    pub q_s: Option<f64>,
    /// Return period; selects the mean-hitting-time target
    #[arg(long)]
    pub t_r: Option<Duration>,
    /// Censoring cap for the return-period target [default: 20 t_r]
    #[arg(long, requires = "t_r")]
    pub horizon_cap: Option<Duration>,
    #[arg(long, default_value_t = envcontour_core::contour::DEFAULT_DIRS)]
    pub n_dirs: usize,
    #[arg(long, default_value_t = envcontour_core::contour::DEFAULT_PATHS)]
    pub n_paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "frozen-end")]
    pub trend_mode: TrendMode,
    /// Step length
    #[arg(long, default_value = "3h")]
    pub dt: Duration,
    /// Start time relative to the calibration reference
    #[arg(long, default_value = "0h", allow_hyphen_values = true)]
    pub t0: Duration,
    /// Properness tolerance [default: 3 pooled standard errors]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run all three trend modes with shared random numbers and report the gaps
    #[arg(long, conflicts_with_all = ["t_r", "trend_mode"])]
    pub three_cases: bool,
    /// Also write an SVG plot
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct OuStudyArgs {
    /// Mean-reversion rate (1/h)
    #[arg(long, default_value_t = 0.016)]
    pub theta: f64,
    /// Step length of the i.i.d. comparison
    #[arg(long, default_value = "3h")]
    pub dt: Duration,
    #[arg(long, default_value = "1y")]
    pub t_r_min: Duration,
    #[arg(long, default_value = "1000y")]
    pub t_r_max: Duration,
    /// Log-spaced return periods in the range
    #[arg(long, default_value_t = 61)]
    pub points: usize,
    /// Output CSV
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator model JSON [default: built-in reference model]
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output CSV with header `t_hours,hs_m,tz_s`
    #[arg(long, short)]
    pub output: PathBuf,
    /// Length of the series; it ends at t = 0 unless `--start` is given
    #[arg(long, default_value = "60y")]
    pub duration: Duration,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<Duration>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the generator model as JSON
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

/// Fully resolved run, as echoed next to the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub year_hours: f64,
    pub threads: Option<usize>,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Calibrate(CalibrateConfig),
    Simulate(SimulateConfig),
    Contour(ContourRunConfig),
    OuStudy(OuStudyConfig),
    Synth(SynthConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrateConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub options: CalibrationOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub model: PathBuf,
    pub output: PathBuf,
    pub duration_hours: f64,
    pub dt_hours: f64,
    pub t0_hours: f64,
    pub trend_mode: TrendMode,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRunConfig {
    pub model: PathBuf,
    pub out_dir: PathBuf,
    pub target: ContourTarget,
    /// `None` for the three-case experiment.
    pub trend_mode: Option<TrendMode>,
    pub dt_hours: f64,
    pub t0_hours: f64,
    pub estimator: ContourConfig,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuStudyConfig {
    pub theta: f64,
    pub dt_hours: f64,
    pub t_r_min_hours: f64,
    pub t_r_max_hours: f64,
    pub points: usize,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// `None` selects the built-in reference model.
    pub model: Option<PathBuf>,
    pub output: PathBuf,
    pub duration_hours: f64,
    pub start_hours: Option<f64>,
    pub seed: u64,
    pub model_out: Option<PathBuf>,
}

fn positive(what: &str, x: f64) -> AppResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(AppError::Input(format!("{what} must be positive, got {x}")))
    }
}

impl Cli {
    /// Turns parsed arguments into a config, or reads one back for `replay`.
    pub fn resolve(self) -> AppResult<RunConfig> {
        let yh = positive("--year-hours", self.year_hours)?;
        let h = |d: Duration| d.to_hours(yh);
        let command = match self.command {
            CliCommand::Replay { config } => {
                let mut cfg: RunConfig = serde_json::from_reader(formats::open(&config)?)
                    .map_err(|e| AppError::Input(format!("{}: {e}", config.display())))?;
                if self.threads.is_some() {
                    cfg.threads = self.threads;
                }
                return Ok(cfg);
            }
            CliCommand::Calibrate(a) => Command::Calibrate(CalibrateConfig {
                input: a.input,
                output: a.output,
                options: CalibrationOptions { n_harmonics: a.harmonics, n_knots: a.knots, year_hours: yh },
            }),
            CliCommand::Simulate(a) => Command::Simulate(SimulateConfig {
                model: a.model,
                output: a.output,
                duration_hours: h(a.duration),
                dt_hours: h(a.dt),
                t0_hours: h(a.t0),
                trend_mode: a.trend_mode,
                seed: a.seed,
                stream: a.stream,
            }),
            CliCommand::Contour(a) => {
                let target = match a.t_r {
                    Some(t_r) => ContourTarget::return_period(h(t_r))?,
                    None => ContourTarget::quantile(
                        h(a.t_s.unwrap_or(Duration::years(50.0))),
                        a.q_s.unwrap_or((-1.0f64).exp()),
                    )?,
                };
                Command::Contour(ContourRunConfig {
                    model: a.model,
                    out_dir: a.out_dir,
                    target,
                    trend_mode: (!a.three_cases).then_some(a.trend_mode),
                    dt_hours: h(a.dt),
                    t0_hours: h(a.t0),
                    estimator: ContourConfig {
                        n_dirs: a.n_dirs,
                        n_paths: a.n_paths,
                        seed: a.seed,
                        tol: a.tol,
                        horizon_cap: a.horizon_cap.map(h),
                    },
                    svg: a.svg,
                })
            }
            CliCommand::OuStudy(a) => Command::OuStudy(OuStudyConfig {
                theta: a.theta,
                dt_hours: h(a.dt),
                t_r_min_hours: h(a.t_r_min),
                t_r_max_hours: h(a.t_r_max),
                points: a.points,
                output: a.output,
            }),
            CliCommand::Synth(a) => Command::Synth(SynthConfig {
                model: a.model,
                output: a.output,
                duration_hours: h(a.duration),
                start_hours: a.start.map(h),
                seed: a.seed,
                model_out: a.model_out,
            }),
        };
        Ok(RunConfig { version: env!("CARGO_PKG_VERSION").into(), year_hours: yh, threads: self.threads, command })
    }
}

impl RunConfig {
    /// Where the effective config is echoed.
    pub fn echo_path(&self) -> PathBuf {
        match &self.command {
            Command::Calibrate(c) => c.output.with_extension("config.json"),
            Command::Simulate(c) => c.output.with_extension("config.json"),
            Command::Contour(c) => c.out_dir.join("config.json"),
            Command::OuStudy(c) => c.output.with_extension("config.json"),
            Command::Synth(c) => c.output.with_extension("config.json"),
        }
    }

    pub fn run(&self) -> AppResult<()> {
        if let Some(n) = self.threads {
            if n == 0 {
                return Err(AppError::Input("--threads must be at least 1".into()));
            }
            // Fails only when a pool already exists, as in repeated in-process runs.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        match &self.command {
            Command::Calibrate(c) => run_calibrate(c)?,
            Command::Simulate(c) => run_simulate(c)?,
            Command::Contour(c) => run_contour(c, self.year_hours)?,
            Command::OuStudy(c) => run_ou_study(c, self.year_hours)?,
            Command::Synth(c) => run_synth(c)?,
        }
        let echo = self.echo_path();
        formats::write_file(&echo, |w| formats::write_json(w, self))?;
        eprintln!("effective config: {}", echo.display());
        Ok(())
    }
}

fn load_model(path: &Path) -> AppResult<SeaStateModel> {
    formats::read_model(formats::open(path)?).map_err(|e| match e {
        AppError::Input(m) => AppError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn run_calibrate(c: &CalibrateConfig) -> AppResult<()> {
    let ingest = formats::read_series(formats::open(&c.input)?)?;
    for msg in &ingest.malformed {
        eprintln!("warning: skipped {msg}");
    }
    if ingest.dropped > 0 {
        eprintln!("warning: dropped {} row(s) with non-positive values or repeated timestamps", ingest.dropped);
    }
    eprintln!("warnings: {}", ingest.warning_count());
    let cal = calibrate(&ingest.series, &c.options)?;
    formats::write_file(&c.output, |w| formats::write_json(w, &cal.model))?;
    let (wb, ln) = (&cal.weibull, &cal.lognormal);
    println!("rows                   {}", cal.n_rows);
    println!("skipped rows           {}", ingest.warning_count());
    println!("loc (m)                {}", wb.loc);
    println!("c1 (m)                 {:.6}", wb.c1);
    println!("c2 (m/year)            {:.6e} ± {:.2e}", wb.c2, wb.c2_std_error);
    println!("k ratio                {:.6}", wb.k_ratio);
    println!("k' annual mean         {:.6}", wb.k_norm.annual_mean());
    println!("std. residual variance {:.6}", ln.standardized_variance);
    println!("backfit iterations     {} (mean), {} (variance)", ln.backfit_iterations.0, ln.backfit_iterations.1);
    println!("model written to {}", c.output.display());
    Ok(())
}

fn run_simulate(c: &SimulateConfig) -> AppResult<()> {
    let model = load_model(&c.model)?;
    let grid =
        TimeGrid::covering(positive("--dt", c.dt_hours)?, positive("--duration", c.duration_hours)?, c.t0_hours)?;
    let sim = SeaStateSimulator::new(model, grid, c.trend_mode)?;
    let (mut t, mut hs, mut tz) = (Vec::new(), Vec::new(), Vec::new());
    for (i, v) in sim.path(c.seed, c.stream).enumerate() {
        t.push(grid.step_time(i));
        hs.push(v.y);
        tz.push(v.x);
    }
    let rows = MetOceanSeries::new(t, hs, tz)?;
    formats::write_file(&c.output, |w| formats::write_series(w, &rows))?;
    println!("{} steps written to {}", rows.len(), c.output.display());
    Ok(())
}

/// Summary written to `diagnostics.json` for one contour.
#[derive(Debug, Clone, Serialize)]
pub struct ContourDiagnostics {
    pub trend_mode: Option<TrendMode>,
    pub construction: envcontour_core::contour::Construction,
    pub proper: bool,
    pub tol: f64,
    pub properness_gap: Option<f64>,
    pub max_violation: f64,
    pub pooled_std_error: f64,
    pub clamped_directions: usize,
    pub degenerate: bool,
    pub max_censored_fraction: f64,
    pub vertices: usize,
    pub warnings: Vec<String>,
}

impl ContourDiagnostics {
    fn new(mode: Option<TrendMode>, r: &ContourResult) -> Self {
        let max_cens = r.censored_fractions.iter().copied().fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if !r.proper {
            warnings.push("thresholds are not a support function within tolerance; hull construction used".into());
        }
        if r.degenerate {
            warnings.push("hull degenerated to the centre point".into());
        }
        let heavy = r.censored_fractions.iter().filter(|&&f| f > CENSORING_WARN_FRACTION).count();
        if heavy > 0 {
            warnings.push(format!("{heavy} direction(s) had more than half the paths censored"));
        }
        Self {
            trend_mode: mode,
            construction: r.construction,
            proper: r.proper,
            tol: r.tol,
            properness_gap: r.properness_gap,
            max_violation: r.max_violation,
            pooled_std_error: r.pooled_std_error(),
            clamped_directions: r.clamped,
            degenerate: r.degenerate,
            max_censored_fraction: max_cens,
            vertices: r.polygon.len(),
            warnings,
        }
    }
}

fn estimate_rows(r: &ContourResult, n_paths: usize) -> Vec<EstimateRow> {
    r.grid
        .iter()
        .enumerate()
        .map(|(i, (u, c))| EstimateRow {
            angle_rad: u.angle(),
            c_value: c,
            std_err: r.std_errors[i],
            n_paths,
            censored_frac: r.censored_fractions.get(i).copied().unwrap_or(0.0),
        })
        .collect()
}

fn write_contour_files(dir: &Path, r: &ContourResult, n_paths: usize) -> AppResult<()> {
    formats::write_file(&dir.join("grid.csv"), |w| formats::write_grid(w, &r.grid))?;
    formats::write_file(&dir.join("polygon.csv"), |w| formats::write_polygon(w, &r.polygon))?;
    formats::write_file(&dir.join("estimates.csv"), |w| formats::write_estimates(w, &estimate_rows(r, n_paths)))
}

fn write_svg(path: &Path, contours: &[(&str, &ContourResult)]) -> AppResult<()> {
    let polys: Vec<(&str, &envcontour_core::Polygon)> = contours.iter().map(|(l, r)| (*l, &r.polygon)).collect();
    let body = svg::render(&polys);
    std::fs::write(path, body).map_err(|e| AppError::io(path, e))
}

/// Grid index closest to the upward direction `(0, 1)`.
pub fn upward_index(n_dirs: usize) -> usize {
    (n_dirs as f64 / 4.0).round() as usize % n_dirs
}

fn run_contour(c: &ContourRunConfig, year_hours: f64) -> AppResult<()> {
    let model = load_model(&c.model)?;
    let dt = positive("--dt", c.dt_hours)?;
    match c.trend_mode {
        Some(mode) => {
            let horizon = match c.target {
                ContourTarget::Quantile { t_s, .. } => t_s,
                ContourTarget::ReturnPeriod { t_r } => c.estimator.horizon_cap.unwrap_or(20.0 * t_r).max(t_r),
            };
            let grid = TimeGrid::covering(dt, horizon, c.t0_hours)?;
            let sim = SeaStateSimulator::new(model, grid, mode)?;
            let r = build_contour(&sim, &c.target, &c.estimator)?;
            write_contour_files(&c.out_dir, &r, c.estimator.n_paths)?;
            let diag = ContourDiagnostics::new(Some(mode), &r);
            formats::write_file(&c.out_dir.join("diagnostics.json"), |w| formats::write_json(w, &diag))?;
            if c.svg {
                write_svg(&c.out_dir.join("contour.svg"), &[(mode.as_str(), &r)])?;
            }
            for w in &diag.warnings {
                eprintln!("warning: {w}");
            }
            let up = upward_index(r.grid.n_dirs());
            println!("target        {}", describe_target(&c.target, year_hours));
            println!("trend mode    {}", mode.as_str());
            println!("construction  {:?} (proper: {})", r.construction, r.proper);
            println!(
                "C at u={:.3}  {:.4} ± {:.4}",
                r.grid.direction(up).angle(),
                r.grid.threshold(up),
                r.std_errors[up]
            );
            println!("vertices      {}", r.polygon.len());
            println!("outputs in {}", c.out_dir.display());
        }
        None => {
            let (t_s, q_s) = match c.target {
                ContourTarget::Quantile { t_s, q_s } => (t_s, q_s),
                ContourTarget::ReturnPeriod { .. } => {
                    return Err(AppError::Input("--three-cases needs a quantile target".into()))
                }
            };
            let r = three_case_experiment(&model, c.t0_hours, dt, t_s, q_s, &c.estimator)?;
            write_three_cases(c, &r)?;
            let up = upward_index(r.n_dirs());
            let g = r.gaps[up];
            let best = r.argmax_outer_gap();
            println!("target          {}", describe_target(&c.target, year_hours));
            for (mode, res) in &r.cases {
                println!("{:<15} C(up) = {:.4} ± {:.4}", mode.as_str(), res.grid.threshold(up), res.std_errors[up]);
            }
            println!("end - true      {:.4} ± {:.4}", g[0].gap, g[0].std_error);
            println!("true - start    {:.4} ± {:.4}", g[1].gap, g[1].std_error);
            println!("end - start     {:.4} ± {:.4}", g[2].gap, g[2].std_error);
            println!(
                "largest end - start gap {:.4} at angle {:.4} rad",
                r.gaps[best][2].gap,
                UnitVector::on_grid(best, r.n_dirs()).angle()
            );
            println!("outputs in {}", c.out_dir.display());
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ThreeCaseDiagnostics {
    cases: Vec<ContourDiagnostics>,
    n_batches: usize,
    upward_gaps: [envcontour_core::contour::PairedGap; 3],
    max_outer_gap: f64,
    max_outer_gap_angle_rad: f64,
}

fn write_three_cases(c: &ContourRunConfig, r: &ThreeCaseResult) -> AppResult<()> {
    for (mode, res) in &r.cases {
        write_contour_files(&c.out_dir.join(mode.as_str()), res, c.estimator.n_paths)?;
    }
    let n = r.n_dirs();
    formats::write_file(&c.out_dir.join("gaps.csv"), |w| {
        let mut wtr = csv::Writer::from_writer(w);
        let header = [
            "angle_rad",
            "end_minus_true",
            "end_minus_true_se",
            "true_minus_start",
            "true_minus_start_se",
            "end_minus_start",
            "end_minus_start_se",
        ];
        let io = |e: csv::Error| AppError::Input(e.to_string());
        wtr.write_record(header).map_err(io)?;
        for (i, g) in r.gaps.iter().enumerate() {
            let mut row = vec![format!("{}", UnitVector::on_grid(i, n).angle())];
            for p in g {
                row.push(format!("{}", p.gap));
                row.push(format!("{}", p.std_error));
            }
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| AppError::Input(e.to_string()))
    })?;
    let best = r.argmax_outer_gap();
    let diag = ThreeCaseDiagnostics {
        cases: r.cases.iter().map(|(m, res)| ContourDiagnostics::new(Some(*m), res)).collect(),
        n_batches: r.n_batches,
        upward_gaps: r.gaps[upward_index(n)],
        max_outer_gap: r.gaps[best][2].gap,
        max_outer_gap_angle_rad: UnitVector::on_grid(best, n).angle(),
    };
    formats::write_file(&c.out_dir.join("diagnostics.json"), |w| formats::write_json(w, &diag))?;
    if c.svg {
        let labels: Vec<(&str, &ContourResult)> = r.cases.iter().map(|(m, res)| (m.as_str(), res)).collect();
        write_svg(&c.out_dir.join("contour.svg"), &labels)?;
    }
    Ok(())
}

fn describe_target(t: &ContourTarget, year_hours: f64) -> String {
    match *t {
        ContourTarget::Quantile { t_s, q_s } => format!("quantile, t_s = {} y, q_s = {q_s:.6}", t_s / year_hours),
        ContourTarget::ReturnPeriod { t_r } => format!("return period, t_r = {} y", t_r / year_hours),
    }
}

/// Crossing of the OU and i.i.d. radius curves, as written by `ou-study`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossingReport {
    pub theta: f64,
    pub dt_hours: f64,
    /// `None` when the exact equation has no root in the search range.
    pub radius: Option<f64>,
    pub t_r_exact_hours: Option<f64>,
    pub t_r_approx_hours: f64,
}

fn run_ou_study(c: &OuStudyConfig, year_hours: f64) -> AppResult<()> {
    let theta = positive("--theta", c.theta)?;
    let dt = positive("--dt", c.dt_hours)?;
    let (lo, hi) = (positive("--t-r-min", c.t_r_min_hours)?, positive("--t-r-max", c.t_r_max_hours)?);
    if hi < lo {
        return Err(AppError::Input(format!("--t-r-max ({hi} h) is below --t-r-min ({lo} h)")));
    }
    if lo <= dt {
        return Err(AppError::Input(format!("--t-r-min ({lo} h) must exceed the step --dt ({dt} h)")));
    }
    if c.points == 0 {
        return Err(AppError::Input("--points must be at least 1".into()));
    }
    let t_rs: Vec<f64> = if c.points == 1 {
        vec![lo]
    } else {
        let step = (hi / lo).ln() / (c.points - 1) as f64;
        (0..c.points).map(|i| if i + 1 == c.points { hi } else { lo * (step * i as f64).exp() }).collect()
    };
    formats::write_file(&c.output, |w| {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| AppError::Input(e.to_string());
        wtr.write_record(["t_r_hours", "t_r_years", "radius_ou", "radius_iid", "ratio"]).map_err(io)?;
        for &t_r in &t_rs {
            let ou = ou_ct_radius(t_r, theta)?;
            let iid = gaussian_ce(dt / t_r)?;
            let row = [t_r, t_r / year_hours, ou, iid, ou / iid].map(|x| format!("{x}"));
            wtr.write_record(&row).map_err(io)?;
        }
        wtr.flush().map_err(|e| AppError::Input(e.to_string()))
    })?;
    let report = match ou_iid_crossing(theta, dt) {
        Ok(x) => CrossingReport {
            theta,
            dt_hours: dt,
            radius: Some(x.radius),
            t_r_exact_hours: Some(x.t_r_exact),
            t_r_approx_hours: x.t_r_approx,
        },
        Err(CoreError::NoCrossing) => CrossingReport {
            theta,
            dt_hours: dt,
            radius: None,
            t_r_exact_hours: None,
            t_r_approx_hours: ou_iid_crossing_approx(theta, dt),
        },
        Err(e) => return Err(e.into()),
    };
    formats::write_file(&c.output.with_extension("crossing.json"), |w| formats::write_json(w, &report))?;
    println!("{} return periods written to {}", t_rs.len(), c.output.display());
    match (report.radius, report.t_r_exact_hours) {
        (Some(r), Some(t)) => println!("crossing (exact)  t_r = {:.1} y at radius {r:.4}", t / year_hours),
        _ => println!("crossing (exact)  none in radius range (0, 40]"),
    }
    println!("crossing (approx) t_r = {:.1} y", report.t_r_approx_hours / year_hours);
    Ok(())
}

fn run_synth(c: &SynthConfig) -> AppResult<()> {
    let model = match &c.model {
        Some(p) => load_model(p)?,
        None => reference_model(),
    };
    let spec =
        SyntheticSpec { model, duration_hours: positive("--duration", c.duration_hours)?, start_hours: c.start_hours };
    let series = generate_synthetic(&spec, c.seed)?;
    formats::write_file(&c.output, |w| formats::write_series(w, &series))?;
    if let Some(p) = &c.model_out {
        formats::write_file(p, |w| formats::write_json(w, &spec.model))?;
    }
    println!("{} hourly rows written to {}", series.len(), c.output.display());
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.resolve().and_then(|cfg| cfg.run()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
