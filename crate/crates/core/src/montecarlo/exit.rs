use super::path::bridge_survival;
use super::{StreamKey, CHUNK};
use crate::bounds::ProbEstimate;
use crate::error::{domain, Result};
use crate::exec::{self, Execution};
use crate::passage::ExitCorridor;
use rand_distr::{Distribution, StandardNormal};

/// Settings for the first-exit simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitMcConfig {
    pub num_paths: usize,
    /// Time step of the Euler grid.
    pub step: f64,
    pub seed: u64,
    pub bridge_correction: bool,
    pub execution: Execution,
}

impl Default for ExitMcConfig {
    fn default() -> Self {
        Self {
            num_paths: 1_000_000,
            step: 1e-4,
            seed: 0,
            bridge_correction: true,
            execution: Execution::default(),
        }
    }
}

// Keeps exit streams apart from the v-path streams under the same seed.
const EXIT_STREAM_OFFSET: u64 = 1 << 62;

/// Estimates `P(τ(a, b) ≤ h)` for each horizon `h` (rounded to the step
/// grid) from one set of simulated paths.
pub fn mc_exit_cdf(corridor: ExitCorridor, horizons: &[f64], cfg: &ExitMcConfig) -> Result<Vec<ProbEstimate>> {
    if cfg.num_paths == 0 {
        return domain("num_paths must be at least 1");
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return domain(format!("step must be positive, got {}", cfg.step));
    }
    if horizons.iter().any(|h| !(*h >= 0.0 && h.is_finite())) {
        return domain("horizons must be finite and non-negative");
    }
    let checkpoints: Vec<usize> = horizons.iter().map(|h| (h / cfg.step).round() as usize).collect();
    // Distinct checkpoints in increasing order; each horizon points at one.
    let mut stops = checkpoints.clone();
    stops.sort_unstable();
    stops.dedup();
    let slot_of: Vec<usize> = checkpoints.iter().map(|c| stops.binary_search(c).unwrap()).collect();
    let (a, b) = (corridor.lower(), corridor.upper());
    let sd = cfg.step.sqrt();
    // Steps with both ends farther than this from the barriers have bridge
    // factors that round to exactly 1.
    let guard = (20.0 * cfg.step).sqrt();

    let chunks = exec::map_chunks(cfg.num_paths, CHUNK, cfg.execution, |paths| {
        let mut sums = vec![0.0; stops.len()];
        for index in paths {
            let mut rng = StreamKey::new(cfg.seed, EXIT_STREAM_OFFSET + index as u64).rng();
            let mut v = 0.0;
            let mut near = (-a).min(b) <= guard;
            let mut survive = 1.0;
            let mut i = 0;
            'stops: for (slot, &stop) in stops.iter().enumerate() {
                while i < stop {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let next = v + sd * z;
                    let dist = (next - a).min(b - next);
                    if dist <= 0.0 {
                        break 'stops;
                    }
                    let close = dist <= guard;
                    if cfg.bridge_correction && (near || close) {
                        survive *= bridge_survival(v, next, a, cfg.step) * bridge_survival(v, next, b, cfg.step);
                    }
                    near = close;
                    v = next;
                    i += 1;
                }
                sums[slot] += survive;
            }
        }
        sums
    });

    let mut by_stop = vec![0.0; stops.len()];
    for chunk in &chunks {
        for (t, s) in by_stop.iter_mut().zip(chunk) {
            *t += s;
        }
    }
    let totals: Vec<f64> = slot_of.iter().map(|&k| by_stop[k]).collect();
    Ok(totals
        .into_iter()
        .map(|s| ProbEstimate::monte_carlo(1.0 - s / cfg.num_paths as f64, cfg.num_paths))
        .collect())
}
