//! Deterministic one-dimensional wave machinery.
//!
//! Everything is written in the `(x, t)` argument order. The backward cone of
//! a point `(x, t)` is `{(y, s) : 0 ≤ s ≤ t, |y - x| ≤ c (t - s)}`; with this
//! orientation d'Alembert's formula solves `(∂_t² - c² ∂_x²) u = g` with zero
//! initial data.

use crate::error::{domain, Result};
use crate::quadrature::{try_integrate, QuadratureConfig};

/// Evaluation point with `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !x.is_finite() {
            return domain(format!("position must be finite, got {x}"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("time must be positive and finite, got {t}"));
        }
        Ok(Self { x, t })
    }
}

/// Strictly positive propagation speed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Speed(f64);

impl Speed {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("speed must be positive and finite, got {c}"));
        }
        Ok(Self(c))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Source term `g(y, s)` of the wave equation.
///
/// Implementations are evaluated from several threads at once.
pub trait SourceFunction: Sync {
    fn eval(&self, y: f64, s: f64) -> f64;
}

impl<F> SourceFunction for F
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    fn eval(&self, y: f64, s: f64) -> f64 {
        self(y, s)
    }
}

/// `F_c(x, t) = H(t) H(ct - |x|) / (2c)` with `H(0) = 1`.
pub fn fundamental_solution(c: Speed, x: f64, t: f64) -> f64 {
    let c = c.value();
    if t >= 0.0 && x.abs() <= c * t {
        0.5 / c
    } else {
        0.0
    }
}

/// Whether `(y, s)` lies in the closed backward cone of `vertex`.
pub fn cone_contains(vertex: SpaceTimePoint, c: Speed, y: f64, s: f64) -> bool {
    (0.0..=vertex.t).contains(&s) && (y - vertex.x).abs() <= c.value() * (vertex.t - s)
}

/// Area `c t²` of the backward cone.
pub fn cone_area(vertex: SpaceTimePoint, c: Speed) -> f64 {
    c.value() * vertex.t * vertex.t
}

/// `u_c(x, t) = (1/2c) ∬_cone g(y, s) dy ds` by nested adaptive quadrature.
///
/// The combined error is kept below `quad.abs_tol`.
pub fn dalembert_solve<G>(g: &G, c: Speed, point: SpaceTimePoint, quad: &QuadratureConfig) -> Result<f64>
where
    G: SourceFunction + ?Sized,
{
    quad.validate()?;
    let speed = c.value();
    let t = point.t;
    // (1/2c)(outer_err + t * inner_err) ≤ abs_tol
    let outer_tol = speed * quad.abs_tol;
    let inner_tol = speed * quad.abs_tol / t;
    let outer = try_integrate(
        |s| {
            let half = speed * (t - s);
            let inner = try_integrate(
                |y| Ok(g.eval(y, s)),
                point.x - half,
                point.x + half,
                inner_tol,
                quad.max_subdiv,
            )?;
            Ok(inner.value)
        },
        0.0,
        t,
        outer_tol,
        quad.max_subdiv,
    )?;
    Ok(outer.value / (2.0 * speed))
}

/// `E[u_{c1}(x, t) u_{c2}(x, t)] = (t²/4) min(1/c1, 1/c2)`.
pub fn covariance(c1: Speed, c2: Speed, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    let inv = (1.0 / c1.value()).min(1.0 / c2.value());
    Ok(0.25 * t * t * inv)
}

/// Standard deviation `t / (2 √c)` of `u_c(x, t)`.
pub fn solution_std(c: Speed, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    Ok(t / (2.0 * c.value().sqrt()))
}
