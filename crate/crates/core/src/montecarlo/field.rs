//! Discretised space-time white noise and backward-cone integrals over it.
//!
//! The noise on a rectangle `[y_min, y_max] × [0, s_max]` is represented by
//! independent `N(0, Δy Δs)` increments, one per cell. The solution
//! `u_c(x, t)` is the noise integrated against `1/(2c)` times the backward
//! cone indicator; cells cut by the cone edge contribute their increment
//! weighted by the exact covered fraction.

use rand_distr::{Distribution, StandardNormal};

use super::{StreamKey, CHUNK};
use crate::error::{domain, Result};
use crate::exec::{self, Execution};
use crate::geometry::{overlap_area, Point, Rect};
use crate::stats::{sample_covariance, sample_mean, Moment};
use crate::wavecore::{SpaceTimePoint, Speed};

/// Rectangle `[y_min, y_max] × [0, s_max]` carrying the noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRegion {
    pub y_min: f64,
    pub y_max: f64,
    pub s_max: f64,
}

impl NoiseRegion {
    pub fn new(y_min: f64, y_max: f64, s_max: f64) -> Result<Self> {
        if !(y_min.is_finite() && y_max.is_finite() && y_min < y_max) {
            return domain(format!("invalid y-range [{y_min}, {y_max}]"));
        }
        if !(s_max > 0.0 && s_max.is_finite()) {
            return domain(format!("s_max must be positive, got {s_max}"));
        }
        Ok(Self { y_min, y_max, s_max })
    }

    /// Smallest region holding the backward cone of `point` at speed `c`.
    pub fn covering(c: Speed, point: SpaceTimePoint) -> Self {
        let half = c.value() * point.t;
        Self {
            y_min: point.x - half,
            y_max: point.x + half,
            s_max: point.t,
        }
    }

    pub fn area(&self) -> f64 {
        (self.y_max - self.y_min) * self.s_max
    }
}

/// Cell counts along `y` and `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub n_y: usize,
    pub n_s: usize,
}

impl GridResolution {
    pub fn new(n_y: usize, n_s: usize) -> Result<Self> {
        if n_y == 0 || n_s == 0 {
            return domain("grid needs at least one cell along each axis");
        }
        if n_y.checked_mul(n_s).is_none_or(|n| n > u32::MAX as usize) {
            return domain(format!("grid of {n_y} x {n_s} cells is too large"));
        }
        Ok(Self { n_y, n_s })
    }

    pub fn cells(&self) -> usize {
        self.n_y * self.n_s
    }
}

/// One realisation of the discretised noise. Increments are stored row by
/// row in `s`: cell `(iy, is)` lives at `is * n_y + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseGrid {
    region: NoiseRegion,
    res: GridResolution,
    increments: Vec<f64>,
}

impl NoiseGrid {
    fn zeroed(region: NoiseRegion, res: GridResolution) -> Self {
        Self {
            region,
            res,
            increments: vec![0.0; res.cells()],
        }
    }

    pub fn region(&self) -> NoiseRegion {
        self.region
    }

    pub fn resolution(&self) -> GridResolution {
        self.res
    }

    pub fn cell_dy(&self) -> f64 {
        cell_sizes(&self.region, &self.res).0
    }

    pub fn cell_ds(&self) -> f64 {
        cell_sizes(&self.region, &self.res).1
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_dy() * self.cell_ds()
    }

    pub fn cell_rect(&self, iy: usize, is: usize) -> Rect {
        cell_rect(&self.region, &self.res, iy, is)
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn increment(&self, iy: usize, is: usize) -> f64 {
        self.increments[is * self.res.n_y + iy]
    }

    /// Redraws every increment from the stream `key`.
    pub fn refill(&mut self, key: StreamKey) {
        let sd = self.cell_area().sqrt();
        let mut rng = key.rng();
        for w in &mut self.increments {
            let z: f64 = StandardNormal.sample(&mut rng);
            *w = sd * z;
        }
    }

    /// Noise integrated over the whole region.
    pub fn total_mass(&self) -> f64 {
        self.increments.iter().sum()
    }
}

fn cell_sizes(region: &NoiseRegion, res: &GridResolution) -> (f64, f64) {
    (
        (region.y_max - region.y_min) / res.n_y as f64,
        region.s_max / res.n_s as f64,
    )
}

fn cell_rect(region: &NoiseRegion, res: &GridResolution, iy: usize, is: usize) -> Rect {
    let (dy, ds) = cell_sizes(region, res);
    Rect {
        y0: region.y_min + iy as f64 * dy,
        y1: if iy + 1 == res.n_y { region.y_max } else { region.y_min + (iy + 1) as f64 * dy },
        s0: is as f64 * ds,
        s1: if is + 1 == res.n_s { region.s_max } else { (is + 1) as f64 * ds },
    }
}

pub fn build_noise_grid(region: NoiseRegion, res: GridResolution, key: impl Into<StreamKey>) -> Result<NoiseGrid> {
    let region = NoiseRegion::new(region.y_min, region.y_max, region.s_max)?;
    let res = GridResolution::new(res.n_y, res.n_s)?;
    let mut grid = NoiseGrid::zeroed(region, res);
    grid.refill(key.into());
    Ok(grid)
}

/// Cell weights of one backward cone on a fixed grid layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeStencil {
    region: NoiseRegion,
    res: GridResolution,
    scale: f64,
    cell_area: f64,
    entries: Vec<(u32, f64)>,
}

impl ConeStencil {
    pub fn new(region: NoiseRegion, res: GridResolution, c: Speed, point: SpaceTimePoint) -> Result<Self> {
        let region = NoiseRegion::new(region.y_min, region.y_max, region.s_max)?;
        let res = GridResolution::new(res.n_y, res.n_s)?;
        let (x, t, c) = (point.x, point.t, c.value());
        let half = c * t;
        let slack = 1e-12 * (region.y_max - region.y_min).max(region.s_max);
        if x - half < region.y_min - slack || x + half > region.y_max + slack || t > region.s_max + slack {
            return domain(format!(
                "cone of ({x}, {t}) at speed {c} leaves the noise region [{}, {}] x [0, {}]",
                region.y_min, region.y_max, region.s_max
            ));
        }
        let (dy, ds) = cell_sizes(&region, &res);
        let triangle = [Point::new(x - half, 0.0), Point::new(x + half, 0.0), Point::new(x, t)];
        let inside = |y: f64, s: f64| s <= t && (y - x).abs() <= c * (t - s);
        let cell_area = dy * ds;
        let last = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);

        let mut entries = Vec::new();
        for is in 0..res.n_s {
            let s0 = is as f64 * ds;
            if s0 >= t {
                break;
            }
            let reach = c * (t - s0);
            let i_lo = last(((x - reach - region.y_min) / dy).floor(), res.n_y);
            let i_hi = last(((x + reach - region.y_min) / dy).floor(), res.n_y);
            for iy in i_lo..=i_hi {
                let rect = cell_rect(&region, &res, iy, is);
                let full = inside(rect.y0, rect.s0)
                    && inside(rect.y1, rect.s0)
                    && inside(rect.y0, rect.s1)
                    && inside(rect.y1, rect.s1);
                let weight = if full { 1.0 } else { overlap_area(&triangle, &rect) / rect.area() };
                if weight > 0.0 {
                    entries.push(((is * res.n_y + iy) as u32, weight));
                }
            }
        }
        Ok(Self {
            region,
            res,
            scale: 1.0 / (2.0 * c),
            cell_area,
            entries,
        })
    }

    /// Number of cells touched by the cone.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Covered area; equals `c t²` up to rounding.
    pub fn covered_area(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum::<f64>() * self.cell_area
    }

    /// Exact variance of [`ConeStencil::apply`] under the discretised noise.
    /// It falls short of `t²/(4c)` by the partial-cell deficit.
    pub fn discrete_variance(&self) -> f64 {
        self.scale * self.scale * self.cell_area * self.entries.iter().map(|(_, w)| w * w).sum::<f64>()
    }

    /// Exact covariance of two stencils on the same layout.
    pub fn discrete_covariance(&self, other: &ConeStencil) -> Result<f64> {
        if self.region != other.region || self.res != other.res {
            return domain("stencils were built for different grid layouts");
        }
        let mut dense = vec![0.0; self.res.cells()];
        for &(i, w) in &self.entries {
            dense[i as usize] = w;
        }
        let overlap: f64 = other.entries.iter().map(|&(i, w)| dense[i as usize] * w).sum();
        Ok(self.scale * other.scale * self.cell_area * overlap)
    }

    pub fn apply(&self, grid: &NoiseGrid) -> Result<f64> {
        if grid.region != self.region || grid.res != self.res {
            return domain("noise grid layout does not match the stencil");
        }
        Ok(self.apply_unchecked(&grid.increments))
    }

    #[inline]
    fn apply_unchecked(&self, increments: &[f64]) -> f64 {
        self.scale * self.entries.iter().map(|&(i, w)| w * increments[i as usize]).sum::<f64>()
    }
}

/// `u_c(x, t)` evaluated on one noise realisation.
pub fn field_sample_u(grid: &NoiseGrid, c: Speed, point: SpaceTimePoint) -> Result<f64> {
    ConeStencil::new(grid.region, grid.res, c, point)?.apply(grid)
}

/// Empirical moments of `u_{c_i}(x, t)` across independent noise grids.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoments {
    pub speeds: Vec<f64>,
    pub samples: usize,
    pub means: Vec<Moment>,
    /// `covariances[i][j]` estimates `Cov(u_{c_i}, u_{c_j})`.
    pub covariances: Vec<Vec<Moment>>,
    /// Exact moments of the discretised field, for judging grid bias.
    pub discrete_covariances: Vec<Vec<f64>>,
}

/// Samples `u_c(x, t)` for every speed on the same grid, `samples` times.
/// Grid `k` is drawn from the stream `(seed, k)`.
pub fn field_moments(
    region: NoiseRegion,
    res: GridResolution,
    speeds: &[Speed],
    point: SpaceTimePoint,
    samples: usize,
    seed: u64,
    execution: Execution,
) -> Result<FieldMoments> {
    if samples < 2 {
        return domain("field moments need at least 2 samples");
    }
    if speeds.is_empty() {
        return domain("at least one speed is required");
    }
    let stencils = speeds
        .iter()
        .map(|&c| ConeStencil::new(region, res, c, point))
        .collect::<Result<Vec<_>>>()?;
    let k = stencils.len();

    let chunks = exec::map_chunks(samples, CHUNK, execution, |range| {
        let mut grid = NoiseGrid::zeroed(stencils[0].region, stencils[0].res);
        let mut out = Vec::with_capacity(range.len() * k);
        for index in range {
            grid.refill(StreamKey::new(seed, index as u64));
            out.extend(stencils.iter().map(|st| st.apply_unchecked(&grid.increments)));
        }
        out
    });
    let flat: Vec<f64> = chunks.into_iter().flatten().collect();
    let columns: Vec<Vec<f64>> = (0..k).map(|j| flat.iter().skip(j).step_by(k).copied().collect()).collect();

    let means = columns.iter().map(|col| sample_mean(col)).collect();
    let covariances = (0..k)
        .map(|i| (0..k).map(|j| sample_covariance(&columns[i], &columns[j])).collect())
        .collect();
    let discrete_covariances = stencils
        .iter()
        .map(|a| stencils.iter().map(|b| a.discrete_covariance(b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldMoments {
        speeds: speeds.iter().map(|c| c.value()).collect(),
        samples,
        means,
        covariances,
        discrete_covariances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn layout() -> (NoiseRegion, GridResolution) {
        (NoiseRegion::new(-4.0, 4.0, 2.0).unwrap(), GridResolution::new(80, 40).unwrap())
    }

    #[test]
    fn stencil_covers_cone_area() {
        let (region, res) = layout();
        let p = SpaceTimePoint::new(0.3, 1.7).unwrap();
        for c in [0.5, 1.0, 2.0] {
            let st = ConeStencil::new(region, res, Speed::new(c).unwrap(), p).unwrap();
            assert_abs_diff_eq!(st.covered_area(), c * 1.7 * 1.7, epsilon = 1e-12);
        }
    }

    #[test]
    fn discrete_variance_is_close_to_kernel() {
        let (region, res) = layout();
        let p = SpaceTimePoint::new(0.0, 2.0).unwrap();
        let c1 = Speed::new(1.0).unwrap();
        let st = ConeStencil::new(region, res, c1, p).unwrap();
        let v = st.discrete_variance();
        assert!(v < 1.0 && v > 0.95, "{v}");
        // A cone of speed 2 covers every cell the speed-1 cone touches.
        let st2 = ConeStencil::new(region, res, Speed::new(2.0).unwrap(), p).unwrap();
        assert_abs_diff_eq!(st.discrete_covariance(&st2).unwrap(), 0.5, epsilon = 1e-2);
    }

    #[test]
    fn cone_outside_region_is_rejected() {
        let (region, res) = layout();
        let p = SpaceTimePoint::new(0.0, 2.0).unwrap();
        assert!(ConeStencil::new(region, res, Speed::new(3.0).unwrap(), p).is_err());
        let high = SpaceTimePoint::new(0.0, 2.5).unwrap();
        assert!(ConeStencil::new(region, res, Speed::new(1.0).unwrap(), high).is_err());
        let grid = build_noise_grid(region, res, 1).unwrap();
        assert!(field_sample_u(&grid, Speed::new(3.0).unwrap(), p).is_err());
    }

    #[test]
    fn grid_is_deterministic_and_layout_checked() {
        let (region, res) = layout();
        let a = build_noise_grid(region, res, StreamKey::new(3, 9)).unwrap();
        let b = build_noise_grid(region, res, StreamKey::new(3, 9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.increments().len(), 3200);
        let p = SpaceTimePoint::new(0.0, 1.0).unwrap();
        let other = build_noise_grid(region, GridResolution::new(40, 40).unwrap(), 3).unwrap();
        let st = ConeStencil::new(region, res, Speed::new(1.0).unwrap(), p).unwrap();
        assert!(st.apply(&other).is_err());
        assert!(st.apply(&a).is_ok());
    }

    #[test]
    fn whole_region_cell_weights_match_total_mass() {
        // A cone wider than the region is rejected, so check a cone that
        // exactly fills the layout instead.
        let region = NoiseRegion::covering(Speed::new(1.0).unwrap(), SpaceTimePoint::new(0.0, 1.0).unwrap());
        let res = GridResolution::new(2, 1).unwrap();
        let grid = build_noise_grid(region, res, 5).unwrap();
        let u = field_sample_u(&grid, Speed::new(1.0).unwrap(), SpaceTimePoint::new(0.0, 1.0).unwrap()).unwrap();
        // Each half-cell is covered by exactly half of its area.
        assert_abs_diff_eq!(u, 0.5 * 0.5 * grid.total_mass(), epsilon = 1e-14);
    }

    #[test]
    fn moments_validate_inputs() {
        let (region, res) = layout();
        let p = SpaceTimePoint::new(0.0, 1.0).unwrap();
        let c = [Speed::new(1.0).unwrap()];
        assert!(field_moments(region, res, &c, p, 1, 0, Execution::Sequential).is_err());
        assert!(field_moments(region, res, &[], p, 10, 0, Execution::Sequential).is_err());
        let m = field_moments(region, res, &c, p, 64, 0, Execution::Sequential).unwrap();
        assert_eq!(m.covariances.len(), 1);
        assert_eq!(m.samples, 64);
    }
}
