//! Upper and lower probabilities for the one-dimensional stochastic wave
//! equation with an uncertain propagation speed.
//!
//! For a fixed space-time point `(x, t)` and a speed interval `[c_lo, c_hi]`
//! the solutions `u_c(x, t)` form a random set `X`. After the substitution
//! `v_r = (2/t) u_{1/r}(x, t)` the map `r -> v_r` is a standard Brownian
//! motion, so the probability that `X` meets a window `B` (upper probability)
//! and the probability that `X` lies inside `B` (lower probability) reduce to
//! first-passage and first-exit problems over `r in [1/c_hi, 1/c_lo]`.
//!
//! Modules:
//!
//! * [`passage`]: hitting- and exit-time distributions of Brownian motion.
//! * [`wavecore`]: fundamental solution, backward cone, d'Alembert quadrature
//!   and the covariance kernel of the stochastic solution.
//! * [`bounds`]: the analytic upper/lower probabilities.
//! * [`montecarlo`]: path and white-noise simulators used as independent
//!   oracles.
//! * [`validation`]: the canned validation suites exposed by the CLI.
//!
//! Monte Carlo work runs on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise. Results do not depend on the
//! number of worker threads.

pub mod bounds;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod montecarlo;
pub mod passage;
pub mod quadrature;
pub mod stats;
pub mod validation;
pub mod wavecore;

pub use bounds::{
    bound_curves, gaussian_window_probability, lower_probability, upper_probability, CurvePoint,
    Method, ProbEstimate, SpeedInterval, ValueWindow,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use montecarlo::{McConfig, StreamKey};
pub use passage::{ExitCorridor, HittingLevel, SeriesConfig};
pub use quadrature::QuadratureConfig;
pub use wavecore::{SpaceTimePoint, Speed};
