//! Stochastic oracles for every analytic quantity in the crate.
//!
//! * [`simulate_v_path`] draws `v_r` on a grid over `[r_lo, r_hi]`;
//!   [`mc_upper`] and [`mc_lower`] turn such paths into estimates of the
//!   upper and lower probabilities, optionally with Brownian-bridge
//!   corrections between grid nodes.
//! * [`mc_exit_cdf`] estimates the first-exit distribution of a corridor.
//! * [`build_noise_grid`] and [`field_sample_u`] discretise space-time white
//!   noise and integrate it over backward cones.
//!
//! Every random stream is keyed by `(seed, index)` through ChaCha8's stream
//! selector, so results are a pure function of the inputs regardless of how
//! many threads run the work.

mod envelope;
mod exit;
mod field;
mod path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::exec::Execution;

pub use envelope::{mc_envelopes, mc_envelopes_refined, mc_lower, mc_upper, McEnvelope, RefinedEnvelopes};
pub use exit::{mc_exit_cdf, ExitMcConfig};
pub use field::{
    build_noise_grid, field_moments, field_sample_u, ConeStencil, FieldMoments, GridResolution, NoiseGrid,
    NoiseRegion,
};
pub use path::{bridge_crossing_prob, simulate_v_path, PathSample};

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub stream: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for StreamKey {
    fn from(seed: u64) -> Self {
        Self::new(seed, 0)
    }
}

/// Settings for the path-based estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub num_paths: usize,
    /// Steps on the reciprocal-speed interval `[r_lo, r_hi]`.
    pub num_steps: usize,
    pub seed: u64,
    pub bridge_correction: bool,
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            num_paths: 100_000,
            num_steps: 10_000,
            seed: 0,
            bridge_correction: true,
            execution: Execution::default(),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_paths == 0 {
            return domain("num_paths must be at least 1");
        }
        if self.num_steps == 0 {
            return domain("num_steps must be at least 1");
        }
        Ok(())
    }
}

/// Paths per work item; fixed so results do not depend on thread count.
pub(crate) const CHUNK: usize = 512;
