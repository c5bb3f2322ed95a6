//! Canned validation suites comparing analytic results with their oracles.
//!
//! Each suite returns a list of named checks. Failing checks are data, not
//! errors: a suite only returns `Err` when a computation could not run.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{
    gaussian_window_probability, lower_probability, upper_probability, SpeedInterval, ValueWindow,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::montecarlo::{
    field_moments, mc_envelopes, mc_exit_cdf, simulate_v_path, ExitMcConfig, GridResolution, McConfig,
    NoiseRegion, CHUNK,
};
use crate::passage::{
    exit_time_cdf, hitting_time_cdf, laplace_forward_check, ExitCorridor, HittingLevel, SeriesConfig,
};
use crate::quadrature::{integrate_to_infinity, QuadratureConfig};
use crate::stats::{sample_correlation, sample_covariance};
use crate::wavecore::{covariance, SpaceTimePoint, Speed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Cov,
    Bm,
    Passage,
    Bounds,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Cov => "cov",
            Suite::Bm => "bm",
            Suite::Passage => "passage",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cov" => Ok(Suite::Cov),
            "bm" => Ok(Suite::Bm),
            "passage" => Ok(Suite::Passage),
            "bounds" => Ok(Suite::Bounds),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn within_se(name: impl Into<String>, estimate: f64, std_err: f64, target: f64, k: f64, slack: f64) -> Self {
        let diff = (estimate - target).abs();
        Self {
            name: name.into(),
            pass: diff <= k * std_err + slack,
            detail: format!("estimate={estimate:.6e} target={target:.6e} std_err={std_err:.3e} tol={k}se+{slack:e}"),
        }
    }

    fn within_abs(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: (value - target).abs() <= tol,
            detail: format!("value={value:.12e} target={target:.12e} tol={tol:e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Sample sizes and seed shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    /// Paths, exit paths or noise grids per Monte Carlo check.
    pub paths: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            paths: 100_000,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.paths < 2 {
        return Err(Error::Domain("validation needs at least 2 paths".into()));
    }
    let checks = match suite {
        Suite::Cov => cov_suite(cfg)?,
        Suite::Bm => bm_suite(cfg)?,
        Suite::Passage => passage_suite(cfg)?,
        Suite::Bounds => bounds_suite(cfg)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Cov, Suite::Bm, Suite::Passage, Suite::Bounds] {
                for mut c in run_suite(s, cfg)?.checks {
                    c.name = format!("{s}/{}", c.name);
                    all.push(c);
                }
            }
            all
        }
    };
    Ok(ValidationReport {
        suite: suite.as_str().to_string(),
        checks,
    })
}

/// Speed pairs compared against the covariance kernel at `t = 2`.
pub const COV_PAIRS: [(f64, f64); 3] = [(1.0, 1.0), (1.0, 4.0), (2.0, 3.0)];

/// Noise layout for one speed pair: the cone of the faster speed at
/// `(0, t)`, 200 cells in `s` and 400 in `y`.
pub fn cov_layout(c_max: f64, t: f64) -> (NoiseRegion, GridResolution) {
    let half = c_max * t;
    (
        NoiseRegion {
            y_min: -half,
            y_max: half,
            s_max: t,
        },
        GridResolution { n_y: 400, n_s: 200 },
    )
}

fn cov_suite(cfg: &ValidationConfig) -> Result<Vec<Check>> {
    let t = 2.0;
    let point = SpaceTimePoint::new(0.0, t)?;
    let mut checks = Vec::new();
    for (c1, c2) in COV_PAIRS {
        let (region, res) = cov_layout(c1.max(c2), t);
        let speeds = [Speed::new(c1)?, Speed::new(c2)?];
        let m = field_moments(region, res, &speeds, point, cfg.paths, cfg.seed, cfg.execution)?;
        let target = covariance(speeds[0], speeds[1], t)?;
        let cov = m.covariances[0][1];
        checks.push(Check::within_se(
            format!("cov(c1={c1},c2={c2},t={t})"),
            cov.value,
            cov.std_err,
            target,
            4.0,
            0.0,
        ));
        checks.push(Check::within_se(
            format!("mean(c={c1},t={t})"),
            m.means[0].value,
            m.means[0].std_err,
            0.0,
            4.0,
            0.0,
        ));
    }
    Ok(checks)
}

/// Reciprocal-speed grid of the Brownian checks: `[1/4, 1]` in four steps.
pub const BM_SPEEDS: (f64, f64) = (1.0, 4.0);
pub const BM_STEPS: usize = 4;

fn bm_suite(cfg: &ValidationConfig) -> Result<Vec<Check>> {
    let speeds = SpeedInterval::new(BM_SPEEDS.0, BM_SPEEDS.1)?;
    let mc = McConfig {
        num_paths: cfg.paths,
        num_steps: BM_STEPS,
        seed: cfg.seed,
        bridge_correction: false,
        execution: cfg.execution,
    };
    let r = simulate_v_path(&speeds, &mc, 0)?.r;
    let chunks = exec::map_chunks(cfg.paths, CHUNK, cfg.execution, |range| {
        range
            .map(|i| simulate_v_path(&speeds, &mc, i).map(|p| p.v))
            .collect::<Result<Vec<_>>>()
    });
    let mut columns = vec![Vec::with_capacity(cfg.paths); r.len()];
    for chunk in chunks {
        for v in chunk? {
            for (col, x) in columns.iter_mut().zip(v) {
                col.push(x);
            }
        }
    }

    let mut checks = Vec::new();
    for i in 0..r.len() {
        for j in i..r.len() {
            let m = sample_covariance(&columns[i], &columns[j]);
            let name = if i == j {
                format!("var(v_{:.4})", r[i])
            } else {
                format!("cov(v_{:.4},v_{:.4})", r[i], r[j])
            };
            checks.push(Check::within_se(name, m.value, m.std_err, r[i].min(r[j]), 4.0, 0.0));
        }
    }

    // Increments over [0, r_0], [r_0, r_1], ... are independent.
    let mut increments = vec![columns[0].clone()];
    for k in 1..r.len() {
        increments.push(columns[k].iter().zip(&columns[k - 1]).map(|(a, b)| a - b).collect());
    }
    let bound = 4.0 / (cfg.paths as f64).sqrt();
    for i in 0..increments.len() {
        for j in i + 1..increments.len() {
            let rho = sample_correlation(&increments[i], &increments[j]);
            checks.push(Check {
                name: format!("corr(dv_{i},dv_{j})"),
                pass: rho.abs() < bound,
                detail: format!("corr={rho:.3e} bound={bound:.3e}"),
            });
        }
    }
    Ok(checks)
}

/// Horizons of the exit-time Monte Carlo check on the corridor `(-1, 1)`.
pub const EXIT_HORIZONS: [f64; 3] = [0.25, 1.0, 4.0];
pub const EXIT_STEP: f64 = 1e-4;
/// `(gamma, x, y)` points of the forward Laplace check.
pub const LAPLACE_GRID: [(f64, f64, f64); 9] = [
    (0.1, 0.0, 1.0),
    (0.1, 0.3, 1.0),
    (0.1, -0.7, 1.0),
    (1.0, 0.0, 1.0),
    (1.0, 0.3, 1.0),
    (1.0, -0.7, 1.0),
    (10.0, 0.0, 1.0),
    (10.0, 0.3, 1.0),
    (10.0, -0.7, 1.0),
];

fn passage_suite(cfg: &ValidationConfig) -> Result<Vec<Check>> {
    let series = SeriesConfig::default();
    let mut checks = Vec::new();

    let analytic = hitting_time_cdf(HittingLevel::new(1.0)?, 1.0)?;
    let integral = integrate_to_infinity(|u| (-0.5 * u * u).exp(), 1.0, 1e-14, 1 << 15)?;
    let oracle = 2.0 / (2.0 * std::f64::consts::PI).sqrt() * integral.value;
    checks.push(Check::within_abs("hitting_cdf(a=1,t=1)", analytic, oracle, 1e-10));

    for (gamma, x, y) in LAPLACE_GRID {
        let value = laplace_forward_check(x, y, gamma, &series)?;
        let target = (x * (2.0 * gamma).sqrt()).cosh() / (y * (2.0 * gamma).sqrt()).cosh();
        checks.push(Check::within_abs(format!("laplace(gamma={gamma},x={x},y={y})"), value, target, 1e-8));
    }

    let corridor = ExitCorridor::new(-1.0, 1.0)?;
    let exit_cfg = ExitMcConfig {
        num_paths: cfg.paths,
        step: EXIT_STEP,
        seed: cfg.seed,
        bridge_correction: true,
        execution: cfg.execution,
    };
    let estimates = mc_exit_cdf(corridor, &EXIT_HORIZONS, &exit_cfg)?;
    for (&h, est) in EXIT_HORIZONS.iter().zip(&estimates) {
        let target = exit_time_cdf(corridor, h, &series)?;
        checks.push(Check::within_se(
            format!("exit_cdf(a=-1,b=1,t={h})"),
            est.value,
            est.std_err,
            target,
            3.0,
            0.0,
        ));
    }
    Ok(checks)
}

/// Reference windows for the envelope checks, at `x = 0`, `t = 2`,
/// `c ∈ [1, 4]`.
pub fn reference_windows() -> Vec<ValueWindow> {
    [
        (0.5, 1.5),
        (-1.0, 1.0),
        (f64::NEG_INFINITY, 0.0),
        (0.0, f64::INFINITY),
        (-0.2, 0.2),
    ]
    .into_iter()
    .map(|(lo, hi)| ValueWindow::new(lo, hi).expect("valid reference window"))
    .collect()
}

/// Windows for the degenerate-interval anchor.
pub fn anchor_windows() -> Vec<ValueWindow> {
    [(-1.0, 1.0), (0.5, 1.5), (-3.0, -0.25), (f64::NEG_INFINITY, 0.7), (-0.4, f64::INFINITY)]
        .into_iter()
        .map(|(lo, hi)| ValueWindow::new(lo, hi).expect("valid anchor window"))
        .collect()
}

pub const ENVELOPE_SPEEDS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];
/// Extra allowance for time-discretisation bias in the path estimators.
pub const DISCRETISATION_ALLOWANCE: f64 = 5e-4;
pub const REFERENCE_STEPS: usize = 10_000;

fn bounds_suite(cfg: &ValidationConfig) -> Result<Vec<Check>> {
    let quad = QuadratureConfig::default();
    let series = SeriesConfig::default();
    let point = SpaceTimePoint::new(0.0, 2.0)?;
    let mut checks = Vec::new();

    let c = Speed::new(1.0)?;
    let degenerate = SpeedInterval::new(1.0, 1.0)?;
    for w in anchor_windows() {
        let target = gaussian_window_probability(c, point.t, w)?;
        let up = upper_probability(point, degenerate, w, &quad, &series)?.value;
        let lo = lower_probability(point, degenerate, w, &quad, &series)?.value;
        checks.push(Check::within_abs(format!("degenerate_upper{w}"), up, target, 1e-8));
        checks.push(Check::within_abs(format!("degenerate_lower{w}"), lo, target, 1e-8));
    }

    let speeds = SpeedInterval::new(1.0, 4.0)?;
    let windows = reference_windows();
    let mut analytic = Vec::new();
    for &w in &windows {
        let up = upper_probability(point, speeds, w, &quad, &series)?.value;
        let lo = lower_probability(point, speeds, w, &quad, &series)?.value;
        let tol = 2.0 * quad.abs_tol;
        let mut worst = f64::NEG_INFINITY;
        for c in ENVELOPE_SPEEDS {
            let p = gaussian_window_probability(Speed::new(c)?, point.t, w)?;
            worst = worst.max(lo - p).max(p - up);
        }
        checks.push(Check {
            name: format!("envelope_order{w}"),
            pass: worst <= tol,
            detail: format!("lower={lo:.10} upper={up:.10} max_violation={worst:.3e} tol={tol:e}"),
        });
        analytic.push((up, lo));
    }

    let mc = McConfig {
        num_paths: cfg.paths,
        num_steps: REFERENCE_STEPS,
        seed: cfg.seed,
        bridge_correction: true,
        execution: cfg.execution,
    };
    let envelopes = mc_envelopes(point, &speeds, &windows, &mc)?;
    for (env, (up, lo)) in envelopes.iter().zip(analytic) {
        let w = env.window;
        checks.push(Check::within_se(
            format!("mc_upper{w}"),
            env.upper.value,
            env.upper.std_err,
            up,
            3.0,
            DISCRETISATION_ALLOWANCE,
        ));
        checks.push(Check::within_se(
            format!("mc_lower{w}"),
            env.lower.value,
            env.lower.std_err,
            lo,
            3.0,
            DISCRETISATION_ALLOWANCE,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Cov, Suite::Bm, Suite::Passage, Suite::Bounds, Suite::All] {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_bm_suite_runs() {
        let cfg = ValidationConfig {
            paths: 4000,
            seed: 1,
            execution: Execution::Parallel,
        };
        let report = run_suite(Suite::Bm, &cfg).unwrap();
        assert_eq!(report.suite, "bm");
        // 15 moment checks and 10 increment correlations.
        assert_eq!(report.checks.len(), 25);
    }

    #[test]
    fn too_few_paths_is_rejected() {
        let cfg = ValidationConfig {
            paths: 1,
            ..Default::default()
        };
        assert!(run_suite(Suite::Bm, &cfg).is_err());
    }
}
