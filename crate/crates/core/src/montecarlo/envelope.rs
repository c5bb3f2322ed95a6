//! Path estimators for the upper and lower probabilities.
//!
//! A path of `v_r` meets the scaled window `(β_lo, β_hi)` when some grid value
//! falls inside it, and stays in it when every grid value does. With bridge
//! correction enabled each step also contributes the probability that the
//! Brownian bridge between two grid values crossed a barrier in between: the
//! per-path upper estimate becomes `1 - Π (1 - p_step)` and the lower estimate
//! `Π (1 - p_lo)(1 - p_hi)` over the steps.

use super::path::{bridge_survival, PathStream};
use super::{McConfig, StreamKey, CHUNK};
use crate::bounds::{ProbEstimate, SpeedInterval, ValueWindow};
use crate::error::Result;
use crate::exec;
use crate::wavecore::SpaceTimePoint;

/// Monte Carlo estimates for one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEnvelope {
    pub window: ValueWindow,
    pub upper: ProbEstimate,
    pub lower: ProbEstimate,
}

/// Estimates at `num_steps` and `2 num_steps` from the same Brownian paths.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedEnvelopes {
    pub coarse_steps: usize,
    pub fine_steps: usize,
    pub coarse: Vec<McEnvelope>,
    pub fine: Vec<McEnvelope>,
}

#[derive(Debug, Clone, Copy)]
struct Tracker {
    lo: f64,
    hi: f64,
    empty: bool,
    hit: bool,
    miss: f64,
    out: bool,
    survive: f64,
}

impl Tracker {
    fn new(lo: f64, hi: f64, v0: f64) -> Self {
        let empty = !(lo < hi);
        let inside = lo < v0 && v0 < hi;
        Self {
            lo,
            hi,
            empty,
            hit: inside || empty,
            miss: 1.0,
            out: !inside,
            survive: if inside { 1.0 } else { 0.0 },
        }
    }

    #[inline]
    fn step(&mut self, v0: f64, v1: f64, dr: f64, bridge: bool) {
        let (lo, hi) = (self.lo, self.hi);
        let inside = lo < v1 && v1 < hi;
        if !self.hit {
            if inside || (v0 <= lo && v1 >= hi) || (v0 >= hi && v1 <= lo) {
                self.hit = true;
            } else if bridge {
                let level = if v1 <= lo { lo } else { hi };
                self.miss *= bridge_survival(v0, v1, level, dr);
                if self.miss == 0.0 {
                    self.hit = true;
                }
            }
        }
        if !self.out {
            if !inside {
                self.out = true;
                self.survive = 0.0;
            } else if bridge {
                self.survive *= bridge_survival(v0, v1, lo, dr) * bridge_survival(v0, v1, hi, dr);
                if self.survive == 0.0 {
                    self.out = true;
                }
            }
        }
    }

    fn resolved(&self) -> bool {
        self.hit && self.out
    }

    fn upper(&self) -> f64 {
        if self.empty {
            0.0
        } else if self.hit {
            1.0
        } else {
            1.0 - self.miss
        }
    }

    fn lower(&self) -> f64 {
        if self.out {
            0.0
        } else {
            self.survive
        }
    }
}

/// Sums of per-path (upper, lower) values for each level and window, in
/// that nesting order.
fn simulate(
    point: SpaceTimePoint,
    speeds: &SpeedInterval,
    windows: &[ValueWindow],
    cfg: &McConfig,
    refine: bool,
) -> Result<Vec<Vec<(f64, f64)>>> {
    cfg.validate()?;
    let scaled: Vec<(f64, f64)> = windows
        .iter()
        .map(|w| if w.is_empty() { (0.0, 0.0) } else { w.scaled(point.t) })
        .collect();
    let levels = if refine { 2 } else { 1 };
    let fine_steps = cfg.num_steps * levels;
    let span = speeds.reciprocal_span();
    let dr_fine = span / fine_steps as f64;
    let dr_coarse = span / cfg.num_steps as f64;
    let bridge = cfg.bridge_correction;
    let n_windows = windows.len();

    let chunks = exec::map_chunks(cfg.num_paths, CHUNK, cfg.execution, |paths| {
        let mut sums = vec![(0.0, 0.0); levels * n_windows];
        let mut fine = Vec::with_capacity(n_windows);
        let mut coarse = Vec::with_capacity(n_windows);
        for index in paths {
            let (mut stream, v0) = PathStream::start(speeds, fine_steps, StreamKey::new(cfg.seed, index as u64));
            fine.clear();
            fine.extend(scaled.iter().map(|&(lo, hi)| Tracker::new(lo, hi, v0)));
            coarse.clear();
            if refine {
                coarse.extend_from_slice(&fine);
            }
            if span > 0.0 {
                let mut v = v0;
                let mut anchor = v0;
                for i in 0..fine_steps {
                    let next = v + stream.increment();
                    for tr in fine.iter_mut() {
                        tr.step(v, next, dr_fine, bridge);
                    }
                    if refine && i % 2 == 1 {
                        for tr in coarse.iter_mut() {
                            tr.step(anchor, next, dr_coarse, bridge);
                        }
                        anchor = next;
                    }
                    v = next;
                    if i % 32 == 31 && fine.iter().chain(coarse.iter()).all(Tracker::resolved) {
                        break;
                    }
                }
            }
            // Coarse first so that level 0 is always the `num_steps` grid.
            let ordered = if refine { [&coarse, &fine] } else { [&fine, &coarse] };
            for (level, trackers) in ordered.iter().take(levels).enumerate() {
                for (w, tr) in trackers.iter().enumerate() {
                    let slot = &mut sums[level * n_windows + w];
                    slot.0 += tr.upper();
                    slot.1 += tr.lower();
                }
            }
        }
        sums
    });

    let mut totals = vec![(0.0, 0.0); levels * n_windows];
    for chunk in &chunks {
        for (acc, s) in totals.iter_mut().zip(chunk) {
            acc.0 += s.0;
            acc.1 += s.1;
        }
    }
    Ok(totals.chunks(n_windows.max(1)).take(levels).map(|c| c.to_vec()).collect())
}

fn to_envelopes(windows: &[ValueWindow], sums: &[(f64, f64)], n: usize) -> Vec<McEnvelope> {
    windows
        .iter()
        .zip(sums)
        .map(|(&window, &(up, lo))| McEnvelope {
            window,
            upper: ProbEstimate::monte_carlo(up / n as f64, n),
            lower: ProbEstimate::monte_carlo(lo / n as f64, n),
        })
        .collect()
}

/// Upper and lower estimates for several windows from one set of paths.
pub fn mc_envelopes(
    point: SpaceTimePoint,
    speeds: &SpeedInterval,
    windows: &[ValueWindow],
    cfg: &McConfig,
) -> Result<Vec<McEnvelope>> {
    if windows.is_empty() {
        return Ok(Vec::new());
    }
    let sums = simulate(point, speeds, windows, cfg, false)?;
    Ok(to_envelopes(windows, &sums[0], cfg.num_paths))
}

/// Like [`mc_envelopes`], but each path is simulated at `2 num_steps` and
/// also observed on every second node, giving coupled estimates at both
/// step sizes.
pub fn mc_envelopes_refined(
    point: SpaceTimePoint,
    speeds: &SpeedInterval,
    windows: &[ValueWindow],
    cfg: &McConfig,
) -> Result<RefinedEnvelopes> {
    let (coarse, fine) = if windows.is_empty() {
        cfg.validate()?;
        (Vec::new(), Vec::new())
    } else {
        let sums = simulate(point, speeds, windows, cfg, true)?;
        (
            to_envelopes(windows, &sums[0], cfg.num_paths),
            to_envelopes(windows, &sums[1], cfg.num_paths),
        )
    };
    Ok(RefinedEnvelopes {
        coarse_steps: cfg.num_steps,
        fine_steps: 2 * cfg.num_steps,
        coarse,
        fine,
    })
}

pub fn mc_upper(
    point: SpaceTimePoint,
    speeds: &SpeedInterval,
    window: ValueWindow,
    cfg: &McConfig,
) -> Result<ProbEstimate> {
    Ok(mc_envelopes(point, speeds, &[window], cfg)?[0].upper)
}

pub fn mc_lower(
    point: SpaceTimePoint,
    speeds: &SpeedInterval,
    window: ValueWindow,
    cfg: &McConfig,
) -> Result<ProbEstimate> {
    Ok(mc_envelopes(point, speeds, &[window], cfg)?[0].lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;

    fn cfg(paths: usize, steps: usize, bridge: bool) -> McConfig {
        McConfig {
            num_paths: paths,
            num_steps: steps,
            seed: 11,
            bridge_correction: bridge,
            execution: Execution::Parallel,
        }
    }

    #[test]
    fn trivial_windows_are_exact() {
        let p = SpaceTimePoint::new(0.0, 2.0).unwrap();
        let speeds = SpeedInterval::new(1.0, 4.0).unwrap();
        let c = cfg(500, 100, true);
        let all = ValueWindow::whole_line();
        assert_eq!(mc_upper(p, &speeds, all, &c).unwrap().value, 1.0);
        assert_eq!(mc_lower(p, &speeds, all, &c).unwrap().value, 1.0);
        let empty = ValueWindow::new(0.7, 0.7).unwrap();
        assert_eq!(mc_lower(p, &speeds, empty, &c).unwrap().value, 0.0);
        assert_eq!(mc_upper(p, &speeds, empty, &c).unwrap().value, 0.0);
    }

    #[test]
    fn tracker_jump_across_counts_as_hit() {
        let mut tr = Tracker::new(0.0, 1.0, -1.0);
        tr.step(-1.0, 2.0, 1.0, false);
        assert!(tr.hit);
        assert_eq!(tr.upper(), 1.0);
        assert_eq!(tr.lower(), 0.0);
    }

    #[test]
    fn tracker_bridge_terms() {
        let mut tr = Tracker::new(1.0, f64::INFINITY, 0.0);
        tr.step(0.0, 0.0, 1.0, true);
        assert!((tr.upper() - (-2.0f64).exp()).abs() < 1e-15);

        let mut tr = Tracker::new(-1.0, 1.0, 0.0);
        tr.step(0.0, 0.0, 1.0, true);
        let q = 1.0 - (-2.0f64).exp();
        assert!((tr.lower() - q * q).abs() < 1e-15);
    }

    #[test]
    fn refined_coarse_level_matches_halved_grid_semantics() {
        let p = SpaceTimePoint::new(0.0, 2.0).unwrap();
        let speeds = SpeedInterval::new(1.0, 4.0).unwrap();
        let w = [ValueWindow::new(-1.0, 1.0).unwrap()];
        let r = mc_envelopes_refined(p, &speeds, &w, &cfg(2000, 50, false)).unwrap();
        assert_eq!(r.coarse_steps, 50);
        assert_eq!(r.fine_steps, 100);
        // Without bridge terms the fine grid contains the coarse nodes.
        assert!(r.fine[0].lower.value <= r.coarse[0].lower.value);
        assert!(r.fine[0].upper.value >= r.coarse[0].upper.value);
    }
}
