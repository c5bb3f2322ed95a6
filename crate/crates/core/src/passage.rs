//! Passage-time distributions of standard Brownian motion started at 0.
//!
//! The exit time from a corridor `(a, b)` has Laplace transform
//! `cosh(x √(2γ)) / cosh(y √(2γ))` with `x = (a + b)/2`, `y = (b - a)/2`.
//! Its density is realised here as the residue series over the poles
//! `γ_k = -(k + 1/2)² π² / (2 y²)`:
//!
//! ```text
//! cc_s(x, y) = (π / y²) Σ_k (-1)^k (k + 1/2) cos((k + 1/2) π x / y) exp(-λ_k s)
//! λ_k        = (k + 1/2)² π² / (2 y²)
//! ```
//!
//! Integrating term by term gives the distribution function as one minus an
//! exponentially decaying sum, which is what [`exit_survival`] evaluates.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use crate::error::{domain, Error, Result};

/// Barrier level `a` of a first hitting time `τ(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingLevel(f64);

impl HittingLevel {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return domain(format!("hitting level must be finite, got {a}"));
        }
        Ok(Self(a))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Corridor `(a, b)` with `a < 0 < b` around the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitCorridor {
    lower: f64,
    upper: f64,
}

impl ExitCorridor {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < 0.0 && upper > 0.0) {
            return domain(format!(
                "exit corridor must satisfy a < 0 < b with finite barriers, got ({lower}, {upper})"
            ));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Offset `(a + b)/2` of the corridor centre.
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Half-width `(b - a)/2`.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Truncation control for the exit-time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    /// Stop once the bound on the remaining terms drops below this.
    pub abs_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 100_000,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return domain(format!("series abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_terms == 0 {
            return domain("series max_terms must be at least 1");
        }
        Ok(())
    }
}

pub fn gaussian_density(y: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return domain(format!("variance must be positive, got {variance}"));
    }
    Ok((-0.5 * y * y / variance).exp() / (2.0 * PI * variance).sqrt())
}

/// Standard normal distribution function, accurate in relative terms in the
/// lower tail.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `P(τ(a) ≤ horizon) = 2 (1 - Φ(|a| / √horizon))`.
pub fn hitting_time_cdf(level: HittingLevel, horizon: f64) -> Result<f64> {
    if !(horizon >= 0.0) {
        return domain(format!("horizon must be non-negative, got {horizon}"));
    }
    let a = level.value().abs();
    if a == 0.0 {
        return Ok(1.0);
    }
    if horizon == 0.0 {
        return Ok(0.0);
    }
    if horizon.is_infinite() {
        return Ok(1.0);
    }
    Ok(erfc(a / (2.0 * horizon).sqrt()))
}

/// Rates `λ_k = (2k + 1)² λ_base` with `λ_base = π² / (8 y²)`.
#[derive(Debug, Clone, Copy)]
struct Spectrum {
    base_rate: f64,
    // π x / y
    phase: f64,
}

impl Spectrum {
    fn new(x: f64, y: f64) -> Self {
        Self {
            base_rate: PI * PI / (8.0 * y * y),
            phase: PI * x / y,
        }
    }

    fn rate(&self, k: usize) -> f64 {
        let m = (2 * k + 1) as f64;
        m * m * self.base_rate
    }

    /// `(-1)^k cos((k + 1/2) π x / y)`
    fn signed_mode(&self, k: usize) -> f64 {
        let c = (0.5 * (2 * k + 1) as f64 * self.phase).cos();
        if k % 2 == 0 {
            c
        } else {
            -c
        }
    }
}

/// Survival `P(τ(a, b) > horizon)`.
pub fn exit_survival(corridor: ExitCorridor, horizon: f64, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if !(horizon >= 0.0) {
        return domain(format!("horizon must be non-negative, got {horizon}"));
    }
    if horizon == 0.0 {
        return Ok(1.0);
    }
    if horizon.is_infinite() {
        return Ok(0.0);
    }
    let spectrum = Spectrum::new(corridor.center(), corridor.half_width());
    let envelope = |k: usize| 4.0 / ((2 * k + 1) as f64 * PI) * (-spectrum.rate(k) * horizon).exp();

    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let env = envelope(k);
        let ratio = envelope(k + 1) / env;
        // Term ratios decrease in k, so the tail is dominated by a geometric series.
        let tail = if env == 0.0 { 0.0 } else { env / (1.0 - ratio) };
        if tail < cfg.abs_tol {
            break;
        }
        if k >= cfg.max_terms {
            return Err(Error::Accuracy {
                what: "exit-time series",
                estimate: 1.0 - sum,
                bound: tail,
            });
        }
        sum += 4.0 / ((2 * k + 1) as f64 * PI) * spectrum.signed_mode(k) * (-spectrum.rate(k) * horizon).exp();
        k += 1;
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// `P(τ(a, b) ≤ horizon)`.
pub fn exit_time_cdf(corridor: ExitCorridor, horizon: f64, cfg: &SeriesConfig) -> Result<f64> {
    exit_survival(corridor, horizon, cfg).map(|s| 1.0 - s)
}

/// Density `cc_s(x, y)` of the exit time from `(x - y, x + y)` at time `s`.
pub fn exit_time_density(s: f64, x: f64, y: f64, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if !(s > 0.0 && s.is_finite()) {
        return domain(format!("exit density needs s > 0, got {s}"));
    }
    if !(x.abs() < y && y.is_finite()) {
        return domain(format!("exit density needs |x| < y, got x = {x}, y = {y}"));
    }
    let spectrum = Spectrum::new(x, y);
    let scale = PI / (y * y);
    let envelope = |k: usize| scale * (k as f64 + 0.5) * (-spectrum.rate(k) * s).exp();

    let mut sum: f64 = 0.0;
    let mut k = 0;
    loop {
        let env = envelope(k);
        let ratio = envelope(k + 1) / env;
        if env == 0.0 || (ratio < 1.0 && env / (1.0 - ratio) < cfg.abs_tol) {
            break;
        }
        if k >= cfg.max_terms {
            let bound = if ratio < 1.0 { env / (1.0 - ratio) } else { f64::INFINITY };
            return Err(Error::Accuracy {
                what: "exit-time density series",
                estimate: sum.max(0.0),
                bound,
            });
        }
        sum += env * spectrum.signed_mode(k);
        k += 1;
    }
    Ok(sum.max(0.0))
}

/// Laplace transform `∫_0^∞ e^{-γ s} cc_s(x, y) ds` of the residue series,
/// integrated term by term.
///
/// Expanding `1/(γ + λ) = 1/λ - γ/λ² + γ²/(λ² (γ + λ))` splits the
/// transform into the total mass `1`, the mean exit time `y² - x²` and an
/// absolutely convergent remainder whose terms decay like `k^-5`.
pub fn laplace_forward_check(x: f64, y: f64, gamma: f64, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return domain(format!("transform variable must be positive, got {gamma}"));
    }
    if !(x.abs() < y && y.is_finite()) {
        return domain(format!("transform needs |x| < y, got x = {x}, y = {y}"));
    }
    let spectrum = Spectrum::new(x, y);
    let scale = PI / (y * y);
    let tail_coeff = 2.0 * gamma * gamma * y.powi(4) / PI.powi(5);

    let mut remainder = 0.0;
    let mut k = 0;
    loop {
        if k >= 1 {
            let tail = tail_coeff / (k as f64 - 0.5).powi(4);
            if tail < cfg.abs_tol {
                break;
            }
        }
        if k >= cfg.max_terms {
            return Err(Error::Internal(format!(
                "transform series did not converge within {} terms",
                cfg.max_terms
            )));
        }
        let rate = spectrum.rate(k);
        remainder += scale * (k as f64 + 0.5) * spectrum.signed_mode(k) / (rate * rate * (gamma + rate));
        k += 1;
    }
    Ok(1.0 - gamma * (y * y - x * x) + gamma * gamma * remainder)
}
