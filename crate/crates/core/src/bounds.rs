//! Upper and lower probabilities of the random set
//! `X(x, t) = {u_c(x, t) : c_lo ≤ c ≤ c_hi}` on an open window `B`.
//!
//! With `r = 1/c` the process `v_r = (2/t) u_{1/r}(x, t)` is a Brownian motion,
//! so conditioning on its value `y` at `r_lo = 1/c_hi` gives
//!
//! ```text
//! P̄(B) = ∫_{-∞}^{β_lo} F_τ(β_lo - y)(Δr) g(y) dy + ∫_{β_lo}^{β_hi} g(y) dy
//!        + ∫_{β_hi}^{∞} F_τ(β_hi - y)(Δr) g(y) dy
//! P̲(B) = ∫_{β_lo}^{β_hi} (1 - F_τ(β_lo - y, β_hi - y)(Δr)) g(y) dy
//! ```
//!
//! where `β = (2/t) b`, `Δr = 1/c_lo - 1/c_hi` and `g` is the centred
//! Gaussian density with variance `r_lo`.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::exec::{self, Execution};
use crate::passage::{
    exit_survival, gaussian_density, hitting_time_cdf, std_normal_cdf, ExitCorridor, HittingLevel,
    SeriesConfig,
};
use crate::quadrature::{try_integrate, QuadratureConfig};
use crate::wavecore::{solution_std, SpaceTimePoint, Speed};

/// Speed interval `[c_lo, c_hi]` and its reciprocal image `[r_lo, r_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedInterval {
    c_lo: f64,
    c_hi: f64,
}

impl SpeedInterval {
    /// `c_lo == c_hi` is accepted as the degenerate, single-speed case.
    pub fn new(c_lo: f64, c_hi: f64) -> Result<Self> {
        if !(c_lo > 0.0 && c_lo.is_finite() && c_hi.is_finite() && c_lo <= c_hi) {
            return domain(format!(
                "speed interval must satisfy 0 < c_lo <= c_hi < inf, got [{c_lo}, {c_hi}]"
            ));
        }
        Ok(Self { c_lo, c_hi })
    }

    pub fn c_lo(&self) -> f64 {
        self.c_lo
    }

    pub fn c_hi(&self) -> f64 {
        self.c_hi
    }

    pub fn r_lo(&self) -> f64 {
        1.0 / self.c_hi
    }

    pub fn r_hi(&self) -> f64 {
        1.0 / self.c_lo
    }

    /// Length `r_hi - r_lo` of the reciprocal interval.
    pub fn reciprocal_span(&self) -> f64 {
        if self.c_lo == self.c_hi {
            0.0
        } else {
            self.r_hi() - self.r_lo()
        }
    }

    pub fn contains(&self, c: f64) -> bool {
        (self.c_lo..=self.c_hi).contains(&c)
    }
}

/// Open window `(b_lo, b_hi)`; either end may be infinite.
///
/// `b_lo == b_hi` denotes the empty window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueWindow {
    b_lo: f64,
    b_hi: f64,
}

impl ValueWindow {
    pub fn new(b_lo: f64, b_hi: f64) -> Result<Self> {
        if b_lo.is_nan() || b_hi.is_nan() || b_lo > b_hi {
            return domain(format!("window needs b_lo <= b_hi, got ({b_lo}, {b_hi})"));
        }
        if b_lo == f64::INFINITY || b_hi == f64::NEG_INFINITY {
            return domain(format!("window ({b_lo}, {b_hi}) has no finite part"));
        }
        Ok(Self { b_lo, b_hi })
    }

    pub fn whole_line() -> Self {
        Self {
            b_lo: f64::NEG_INFINITY,
            b_hi: f64::INFINITY,
        }
    }

    pub fn below(b: f64) -> Result<Self> {
        Self::new(f64::NEG_INFINITY, b)
    }

    pub fn b_lo(&self) -> f64 {
        self.b_lo
    }

    pub fn b_hi(&self) -> f64 {
        self.b_hi
    }

    pub fn is_empty(&self) -> bool {
        self.b_lo == self.b_hi
    }

    pub fn is_whole_line(&self) -> bool {
        self.b_lo == f64::NEG_INFINITY && self.b_hi == f64::INFINITY
    }

    pub fn contains(&self, v: f64) -> bool {
        self.b_lo < v && v < self.b_hi
    }

    /// Window in the units of `v_r`, i.e. multiplied by `2/t`.
    pub fn scaled(&self, t: f64) -> (f64, f64) {
        (2.0 / t * self.b_lo, 2.0 / t * self.b_hi)
    }
}

impl fmt::Display for ValueWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.b_lo, self.b_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Probability with a standard error (zero for analytic values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    pub value: f64,
    pub std_err: f64,
    pub method: Method,
}

impl ProbEstimate {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            std_err: 0.0,
            method: Method::Analytic,
        }
    }

    /// Monte Carlo mean of `n` per-sample values in `[0, 1]`, with the
    /// binomial standard error `√(p (1 - p) / n)`.
    pub fn monte_carlo(value: f64, n: usize) -> Self {
        let value = value.clamp(0.0, 1.0);
        Self {
            value,
            std_err: (value * (1.0 - value) / n as f64).sqrt(),
            method: Method::MonteCarlo,
        }
    }
}

/// One row of [`bound_curves`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub b: f64,
    pub upper: f64,
    pub lower: f64,
}

/// `P(u_c(x, t) ∈ B)` for a single speed.
pub fn gaussian_window_probability(c: Speed, t: f64, window: ValueWindow) -> Result<f64> {
    if window.is_empty() {
        return Ok(0.0);
    }
    let sigma = solution_std(c, t)?;
    Ok(std_normal_cdf(window.b_hi() / sigma) - std_normal_cdf(window.b_lo() / sigma))
}

/// Shared setup for both functionals.
struct Decomposition {
    beta_lo: f64,
    beta_hi: f64,
    span: f64,
    variance: f64,
    cut_lo: f64,
    cut_hi: f64,
    tail_mass: f64,
}

impl Decomposition {
    fn new(point: SpaceTimePoint, speeds: SpeedInterval, window: ValueWindow, quad: &QuadratureConfig) -> Self {
        let (beta_lo, beta_hi) = window.scaled(point.t);
        let variance = speeds.r_lo();
        let radius = quad.tail_sigmas * variance.sqrt();
        Self {
            beta_lo,
            beta_hi,
            span: speeds.reciprocal_span(),
            variance,
            cut_lo: -radius,
            cut_hi: radius,
            tail_mass: 2.0 * std_normal_cdf(-quad.tail_sigmas),
        }
    }

    fn density(&self, y: f64) -> f64 {
        gaussian_density(y, self.variance).unwrap_or(0.0)
    }

    /// Integral over `[a, b] ∩ [cut_lo, cut_hi]`.
    fn integrate<F>(&self, f: F, a: f64, b: f64, tol: f64, quad: &QuadratureConfig) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let lo = a.max(self.cut_lo);
        let hi = b.min(self.cut_hi);
        if lo >= hi {
            return Ok((0.0, 0.0));
        }
        let r = try_integrate(f, lo, hi, tol, quad.max_subdiv)?;
        Ok((r.value, r.abs_err))
    }

    fn finish(&self, raw: f64, err: f64, quad: &QuadratureConfig, what: &'static str) -> Result<ProbEstimate> {
        let bound = err + self.tail_mass;
        if self.tail_mass > quad.abs_tol || !(-quad.abs_tol..=1.0 + quad.abs_tol).contains(&raw) {
            return Err(Error::Accuracy {
                what,
                estimate: raw,
                bound,
            });
        }
        Ok(ProbEstimate::analytic(raw.clamp(0.0, 1.0)))
    }
}

fn check_inputs(quad: &QuadratureConfig, series: &SeriesConfig) -> Result<()> {
    quad.validate()?;
    series.validate()
}

/// Upper probability `P̄(B) = P(X ∩ B ≠ ∅)`.
pub fn upper_probability(
    point: SpaceTimePoint,
    speeds: SpeedInterval,
    window: ValueWindow,
    quad: &QuadratureConfig,
    series: &SeriesConfig,
) -> Result<ProbEstimate> {
    check_inputs(quad, series)?;
    if window.is_empty() {
        return Ok(ProbEstimate::analytic(0.0));
    }
    if window.is_whole_line() {
        return Ok(ProbEstimate::analytic(1.0));
    }
    let d = Decomposition::new(point, speeds, window, quad);
    let tol = quad.abs_tol / 3.0;
    let hit = |level: f64| -> Result<f64> { hitting_time_cdf(HittingLevel::new(level)?, d.span) };

    let mut total = 0.0;
    let mut err = 0.0;
    if d.beta_lo.is_finite() {
        let (v, e) = d.integrate(
            |y| Ok(hit(d.beta_lo - y)? * d.density(y)),
            f64::NEG_INFINITY,
            d.beta_lo,
            tol,
            quad,
        )?;
        total += v;
        err += e;
    }
    let (v, e) = d.integrate(|y| Ok(d.density(y)), d.beta_lo, d.beta_hi, tol, quad)?;
    total += v;
    err += e;
    if d.beta_hi.is_finite() {
        let (v, e) = d.integrate(
            |y| Ok(hit(d.beta_hi - y)? * d.density(y)),
            d.beta_hi,
            f64::INFINITY,
            tol,
            quad,
        )?;
        total += v;
        err += e;
    }
    d.finish(total, err, quad, "upper probability")
}

/// Lower probability `P̲(B) = P(X ⊂ B)`.
pub fn lower_probability(
    point: SpaceTimePoint,
    speeds: SpeedInterval,
    window: ValueWindow,
    quad: &QuadratureConfig,
    series: &SeriesConfig,
) -> Result<ProbEstimate> {
    check_inputs(quad, series)?;
    if window.is_empty() {
        return Ok(ProbEstimate::analytic(0.0));
    }
    if window.is_whole_line() {
        return Ok(ProbEstimate::analytic(1.0));
    }
    let d = Decomposition::new(point, speeds, window, quad);
    let tol = quad.abs_tol;

    // Probability that the path started at y stays inside the scaled window
    // for a reciprocal-speed span; zero once a barrier reaches y.
    let survival = |y: f64| -> Result<f64> {
        let below = d.beta_lo - y;
        let above = d.beta_hi - y;
        if below >= 0.0 || above <= 0.0 {
            return Ok(0.0);
        }
        match (below.is_finite(), above.is_finite()) {
            (true, true) => exit_survival(ExitCorridor::new(below, above)?, d.span, series),
            (true, false) => Ok(1.0 - hitting_time_cdf(HittingLevel::new(below)?, d.span)?),
            (false, true) => Ok(1.0 - hitting_time_cdf(HittingLevel::new(above)?, d.span)?),
            (false, false) => Ok(1.0),
        }
    };
    let (v, e) = d.integrate(|y| Ok(survival(y)? * d.density(y)), d.beta_lo, d.beta_hi, tol, quad)?;
    d.finish(v, e, quad, "lower probability")
}

/// Upper and lower distribution functions `b -> P̄((-∞, b))`, `P̲((-∞, b))`.
pub fn bound_curves(
    point: SpaceTimePoint,
    speeds: SpeedInterval,
    thresholds: &[f64],
    quad: &QuadratureConfig,
    series: &SeriesConfig,
) -> Result<Vec<CurvePoint>> {
    if thresholds.iter().any(|b| !b.is_finite()) {
        return domain("curve thresholds must be finite");
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return domain("curve thresholds must be strictly ascending");
    }
    exec::map_items(thresholds, Execution::Parallel, |&b| {
        let window = ValueWindow::below(b)?;
        Ok(CurvePoint {
            b,
            upper: upper_probability(point, speeds, window, quad, series)?.value,
            lower: lower_probability(point, speeds, window, quad, series)?.value,
        })
    })
    .into_iter()
    .collect()
}
