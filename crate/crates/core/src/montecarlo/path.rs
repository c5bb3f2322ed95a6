use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{McConfig, StreamKey};
use crate::bounds::SpeedInterval;
use crate::error::{domain, Result};

/// One simulated path of `v_r` on `[r_lo, r_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
}

/// Generator for `v_r`: an exact draw at `r_lo`, then Gaussian increments.
pub(crate) struct PathStream {
    rng: ChaCha8Rng,
    step_sd: f64,
}

impl PathStream {
    /// Returns the stream together with the initial value `v_{r_lo}`.
    pub(crate) fn start(speeds: &SpeedInterval, num_steps: usize, key: StreamKey) -> (Self, f64) {
        let mut rng = key.rng();
        let z: f64 = StandardNormal.sample(&mut rng);
        let v0 = speeds.r_lo().sqrt() * z;
        let step_sd = (speeds.reciprocal_span() / num_steps as f64).sqrt();
        (Self { rng, step_sd }, v0)
    }

    #[inline]
    pub(crate) fn increment(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.step_sd * z
    }
}

pub fn simulate_v_path(speeds: &SpeedInterval, cfg: &McConfig, path_index: usize) -> Result<PathSample> {
    cfg.validate()?;
    if path_index >= cfg.num_paths {
        return domain(format!(
            "path index {path_index} out of range for {} paths",
            cfg.num_paths
        ));
    }
    let n = cfg.num_steps;
    let (mut stream, v0) = PathStream::start(speeds, n, StreamKey::new(cfg.seed, path_index as u64));
    let dr = speeds.reciprocal_span() / n as f64;
    let r = (0..=n)
        .map(|i| if i == n { speeds.r_hi() } else { speeds.r_lo() + i as f64 * dr })
        .collect();
    let mut v = Vec::with_capacity(n + 1);
    v.push(v0);
    let mut cur = v0;
    for _ in 0..n {
        cur += stream.increment();
        v.push(cur);
    }
    Ok(PathSample { r, v })
}

/// Probability that a Brownian bridge over a step of length `dr` from `v0` to
/// `v1` touches `level`.
///
/// Returns 1 when the endpoints straddle or touch the level, otherwise
/// `exp(-2 (level - v0)(level - v1) / dr)`.
#[inline]
pub fn bridge_crossing_prob(v0: f64, v1: f64, level: f64, dr: f64) -> f64 {
    let d0 = level - v0;
    let d1 = level - v1;
    if d0 * d1 <= 0.0 {
        return 1.0;
    }
    if !(dr > 0.0) {
        return 0.0;
    }
    let exponent = 2.0 * d0 * d1 / dr;
    // exp underflows to exactly 0 beyond this point; skip the call.
    if exponent > 746.0 {
        0.0
    } else {
        (-exponent).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bridge_examples() {
        assert_eq!(bridge_crossing_prob(1.0, 7.0, 1.0, 0.5), 1.0);
        assert_eq!(bridge_crossing_prob(0.5, 1.5, 1.0, 0.5), 1.0);
        assert_eq!(bridge_crossing_prob(0.0, 0.0, 5.0, 0.01), 0.0);
        assert_abs_diff_eq!(bridge_crossing_prob(0.0, 0.0, 1.0, 1.0), 0.135_335_283_2, epsilon = 1e-10);
        assert_eq!(bridge_crossing_prob(f64::NEG_INFINITY, 0.0, 1.0, 1.0), 0.0);
        assert_eq!(
            bridge_crossing_prob(0.2, -0.1, f64::NEG_INFINITY, 1.0),
            0.0
        );
    }

    #[test]
    fn path_is_deterministic() {
        let speeds = SpeedInterval::new(1.0, 4.0).unwrap();
        let cfg = McConfig {
            num_paths: 10,
            num_steps: 50,
            seed: 99,
            ..Default::default()
        };
        let a = simulate_v_path(&speeds, &cfg, 3).unwrap();
        let b = simulate_v_path(&speeds, &cfg, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.v, simulate_v_path(&speeds, &cfg, 4).unwrap().v);
        assert_eq!(a.r.len(), 51);
        assert_eq!(a.r[0], 0.25);
        assert_eq!(a.r[50], 1.0);
        assert!(simulate_v_path(&speeds, &cfg, 10).is_err());
    }

    #[test]
    fn degenerate_interval_has_flat_path() {
        let speeds = SpeedInterval::new(2.0, 2.0).unwrap();
        let cfg = McConfig {
            num_paths: 1,
            num_steps: 8,
            ..Default::default()
        };
        let p = simulate_v_path(&speeds, &cfg, 0).unwrap();
        assert!(p.v.iter().all(|&v| v == p.v[0]));
    }
}

/// `1 - bridge_crossing_prob(v0, v1, level, dr)`, skipping the exponential
/// once the crossing probability is below 2^-54 and the result rounds to 1.
#[inline]
pub(crate) fn bridge_survival(v0: f64, v1: f64, level: f64, dr: f64) -> f64 {
    if (level - v0) * (level - v1) > 19.0 * dr {
        1.0
    } else {
        1.0 - bridge_crossing_prob(v0, v1, level, dr)
    }
}
