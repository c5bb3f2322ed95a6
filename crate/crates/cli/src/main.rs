//! `wavebounds`: upper and lower probabilities of the interval-speed
//! stochastic wave equation, with Monte Carlo and validation commands.
//!
//! Exit status: 0 success, 1 usage error, 2 domain error, 3 accuracy or
//! numerical error, 4 a validation suite ran but some check failed.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavebounds::montecarlo::{field_moments, mc_lower, mc_upper, GridResolution, NoiseRegion};
use wavebounds::validation::{run_suite, Suite, ValidationConfig};
use wavebounds::wavecore::covariance;
use wavebounds::{
    bound_curves, lower_probability, upper_probability, Error, Execution, McConfig, QuadratureConfig,
    SeriesConfig, SpaceTimePoint, Speed, SpeedInterval, ValueWindow,
};

use output::{CheckRow, CurveRow, Estimate, FieldRow, Format, Report};

const THREADS_VAR: &str = "WAVEBOUNDS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "wavebounds", version, about = "Upper/lower probabilities for the stochastic wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic upper probability P(X meets B).
    #[command(allow_negative_numbers = true)]
    Upper(BoundArgs),
    /// Analytic lower probability P(X inside B).
    #[command(allow_negative_numbers = true)]
    Lower(BoundArgs),
    /// Upper and lower distribution functions over a threshold grid.
    #[command(allow_negative_numbers = true)]
    Curve(CurveArgs),
    /// Path Monte Carlo estimate of the upper or lower probability.
    #[command(allow_negative_numbers = true)]
    Mc(McArgs),
    /// Covariances of the white-noise field solution for several speeds.
    #[command(allow_negative_numbers = true)]
    Field(FieldArgs),
    /// Run a validation suite.
    #[command(allow_negative_numbers = true)]
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x: f64,
    #[arg(long)]
    t: f64,
    #[arg(long = "c-min")]
    c_min: f64,
    #[arg(long = "c-max")]
    c_max: f64,
}

impl PointArgs {
    fn resolve(&self) -> wavebounds::Result<(SpaceTimePoint, SpeedInterval)> {
        Ok((SpaceTimePoint::new(self.x, self.t)?, SpeedInterval::new(self.c_min, self.c_max)?))
    }
}

#[derive(Args, Debug)]
struct WindowArgs {
    /// Lower window endpoint; `-inf` allowed.
    #[arg(long = "b-min", default_value = "-inf", allow_hyphen_values = true)]
    b_min: f64,
    /// Upper window endpoint; `inf` allowed.
    #[arg(long = "b-max", default_value = "inf", allow_hyphen_values = true)]
    b_max: f64,
}

#[derive(Args, Debug)]
struct NumericArgs {
    #[arg(long = "quad-tol", default_value_t = 1e-10)]
    quad_tol: f64,
    #[arg(long = "series-tol", default_value_t = 1e-12)]
    series_tol: f64,
    #[arg(long = "tail-sigmas", default_value_t = 12.0)]
    tail_sigmas: f64,
}

impl NumericArgs {
    fn configs(&self) -> (QuadratureConfig, SeriesConfig) {
        let quad = QuadratureConfig {
            abs_tol: self.quad_tol,
            tail_sigmas: self.tail_sigmas,
            ..QuadratureConfig::default()
        };
        let series = SeriesConfig {
            abs_tol: self.series_tol,
            ..SeriesConfig::default()
        };
        (quad, series)
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Threshold grid `lo:hi:step`.
    #[arg(long = "b-grid", allow_hyphen_values = true, value_parser = parse_grid)]
    b_grid: Grid,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Upper,
    Lower,
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    bridge: bool,
    #[arg(long, value_enum, default_value = "upper")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Noise region in space, `lo:hi`. Defaults to the widest cone.
    #[arg(long = "y-range", allow_hyphen_values = true, value_parser = parse_span)]
    y_range: Option<(f64, f64)>,
    /// Top of the noise region in time. Defaults to `t`.
    #[arg(long = "s-max")]
    s_max: Option<f64>,
    #[arg(long, default_value_t = 400)]
    ny: usize,
    #[arg(long, default_value_t = 200)]
    ns: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated speeds.
    #[arg(long, value_delimiter = ',', default_value = "1,4")]
    speeds: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// Cone vertex position. Defaults to the middle of the y-range.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Cone vertex time. Defaults to `s-max`, or 2 if neither is given.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Cov,
    Bm,
    Passage,
    Bounds,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Cov => Suite::Cov,
            SuiteArg::Bm => Suite::Bm,
            SuiteArg::Passage => Suite::Passage,
            SuiteArg::Bounds => Suite::Bounds,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    lo: f64,
    hi: f64,
    step: f64,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    };
    let g = Grid {
        lo: parse_f64(lo)?,
        hi: parse_f64(hi)?,
        step: parse_f64(step)?,
    };
    if !(g.lo.is_finite() && g.hi.is_finite() && g.lo <= g.hi) {
        return Err(format!("grid bounds must be finite with lo <= hi, got '{s}'"));
    }
    if !(g.step > 0.0 && g.step.is_finite()) {
        return Err(format!("grid step must be positive, got '{step}'"));
    }
    if (g.hi - g.lo) / g.step > 1e7 {
        return Err("grid has more than 10^7 points".to_string());
    }
    Ok(g)
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    Ok((parse_f64(lo)?, parse_f64(hi)?))
}

/// Failure of a command, mapped to an exit status.
enum Failure {
    Usage(String),
    Lib(Error),
    Io(std::io::Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn window(args: &WindowArgs) -> wavebounds::Result<ValueWindow> {
    ValueWindow::new(args.b_min, args.b_max)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Upper(a) => bound(a, upper_probability),
        Command::Lower(a) => bound(a, lower_probability),
        Command::Curve(a) => {
            let (point, speeds) = a.point.resolve()?;
            let (quad, series) = a.numeric.configs();
            let rows: Vec<CurveRow> = bound_curves(point, speeds, &a.b_grid.points(), &quad, &series)?
                .into_iter()
                .map(|p| CurveRow {
                    b: p.b,
                    upper: p.upper,
                    lower: p.lower,
                })
                .collect();
            output::emit_rows(a.format, &rows)?;
            Ok(())
        }
        Command::Mc(a) => {
            let (point, speeds) = a.point.resolve()?;
            let w = window(&a.window)?;
            let cfg = McConfig {
                num_paths: a.paths,
                num_steps: a.steps,
                seed: a.seed,
                bridge_correction: a.bridge,
                execution: Execution::Parallel,
            };
            let est = match a.mode {
                Mode::Upper => mc_upper(point, &speeds, w, &cfg)?,
                Mode::Lower => mc_lower(point, &speeds, w, &cfg)?,
            };
            output::emit_one(a.format, &Estimate::from(est))?;
            Ok(())
        }
        Command::Field(a) => field(a),
        Command::Validate(a) => {
            let cfg = ValidationConfig {
                paths: a.paths,
                seed: a.seed,
                execution: Execution::Parallel,
            };
            let report = run_suite(a.suite.into(), &cfg)?;
            let passed = report.passed();
            let out = Report {
                suite: report.suite,
                checks: report
                    .checks
                    .into_iter()
                    .map(|c| CheckRow {
                        name: c.name,
                        pass: c.pass,
                        detail: c.detail,
                    })
                    .collect(),
            };
            output::emit_report(a.format, &out)?;
            if passed {
                Ok(())
            } else {
                Err(Failure::ChecksFailed)
            }
        }
    }
}

type BoundFn = fn(
    SpaceTimePoint,
    SpeedInterval,
    ValueWindow,
    &QuadratureConfig,
    &SeriesConfig,
) -> wavebounds::Result<wavebounds::ProbEstimate>;

fn bound(a: BoundArgs, f: BoundFn) -> Result<(), Failure> {
    let (point, speeds) = a.point.resolve()?;
    let (quad, series) = a.numeric.configs();
    let est = f(point, speeds, window(&a.window)?, &quad, &series)?;
    output::emit_one(a.format, &Estimate::from(est))?;
    Ok(())
}

fn field(a: FieldArgs) -> Result<(), Failure> {
    let speeds = a
        .speeds
        .iter()
        .map(|&c| Speed::new(c))
        .collect::<wavebounds::Result<Vec<_>>>()?;
    if speeds.is_empty() {
        return Err(Failure::Usage("--speeds needs at least one value".into()));
    }
    let t = a.t.or(a.s_max).unwrap_or(2.0);
    let s_max = a.s_max.unwrap_or(t);
    let c_max = a.speeds.iter().copied().fold(0.0, f64::max);
    let (y_lo, y_hi) = a.y_range.unwrap_or_else(|| {
        let x = a.x.unwrap_or(0.0);
        (x - c_max * t, x + c_max * t)
    });
    let x = a.x.unwrap_or(0.5 * (y_lo + y_hi));
    let point = SpaceTimePoint::new(x, t)?;
    let region = NoiseRegion::new(y_lo, y_hi, s_max)?;
    let res = GridResolution::new(a.ny, a.ns)?;
    let m = field_moments(region, res, &speeds, point, a.samples, a.seed, Execution::Parallel)?;
    let mut rows = Vec::new();
    for i in 0..speeds.len() {
        for j in i..speeds.len() {
            let cov = m.covariances[i][j];
            rows.push(FieldRow {
                c1: speeds[i].value(),
                c2: speeds[j].value(),
                covariance: cov.value,
                std_err: cov.std_err,
                exact: covariance(speeds[i], speeds[j], t)?,
                grid_exact: m.discrete_covariances[i][j],
            });
        }
    }
    output::emit_rows(a.format, &rows)?;
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Domain(_) => 2,
                Error::Accuracy { .. } | Error::Internal(_) => 3,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed) => {
            eprintln!("error: validation checks failed");
            ExitCode::from(4)
        }
    }
}
