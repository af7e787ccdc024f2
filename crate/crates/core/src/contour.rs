//! From a simulator and a target to a contour polygon.
//!
//! The estimated grid is turned into the half-plane intersection when it is
//! a support function up to the estimation noise, and into the convex-hull
//! contour around the default centre otherwise.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{
    clamped_directions, default_center, halfspace_intersection, hull_contour, max_shortfall, properness_gap, Point,
    Polygon, SupportGrid, UnitVector,
};
use crate::hitting::{estimate_ct, simulate_sup_samples, ContourTarget, CqEstimate, SupSamples, MIN_PATHS};
use crate::math::sqrt;
use crate::par;
use crate::process::{steps_within, PathSimulator, SeaStateModel, SeaStateSimulator, TimeGrid, TrendMode};

/// Default number of directions.
pub const DEFAULT_DIRS: usize = 180;
/// Default number of simulated paths.
pub const DEFAULT_PATHS: usize = 10_000;
/// Properness tolerance in pooled standard errors.
pub const TOL_STD_ERRORS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Construction {
    HalfspaceIntersection,
    ConvexHull,
}

/// Estimation settings for [`build_contour`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourConfig {
    pub n_dirs: usize,
    pub n_paths: usize,
    pub seed: u64,
    /// Properness tolerance; `None` uses 3 pooled standard errors.
    pub tol: Option<f64>,
    /// Censoring cap for return-period targets; `None` uses `20·t_r`.
    pub horizon_cap: Option<f64>,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self { n_dirs: DEFAULT_DIRS, n_paths: DEFAULT_PATHS, seed: 0, tol: None, horizon_cap: None }
    }
}

/// An estimated grid and the contour built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourResult {
    pub grid: SupportGrid,
    pub polygon: Polygon,
    pub construction: Construction,
    pub proper: bool,
    /// Tolerance the properness decision used.
    pub tol: f64,
    pub std_errors: Vec<f64>,
    /// Per-direction censoring fractions (zeros for quantile targets).
    pub censored_fractions: Vec<f64>,
    /// `max |B(∩Π⁻, uᵢ) − C(uᵢ)|`, or `None` if the intersection is empty.
    pub properness_gap: Option<f64>,
    /// `max (C(uᵢ) − B(polygon, uᵢ))`; at most `tol` for a valid contour.
    pub max_violation: f64,
    /// Directions whose hull point was clamped to the centre.
    pub clamped: usize,
    /// The polygon has (numerically) no area.
    pub degenerate: bool,
}

impl ContourResult {
    /// Builds the contour for an already estimated grid.
    pub fn from_grid(
        grid: SupportGrid,
        std_errors: Vec<f64>,
        censored_fractions: Vec<f64>,
        tol: Option<f64>,
    ) -> Result<Self> {
        let tol = tol.unwrap_or_else(|| default_tolerance(&grid, &std_errors));
        let gap = match properness_gap(&grid) {
            Ok(g) => Some(g),
            Err(Error::InfeasibleThresholds) => None,
            Err(e) => return Err(e),
        };
        let proper = gap.is_some_and(|g| g <= tol);
        let (polygon, construction, clamped) = if proper {
            (halfspace_intersection(&grid)?, Construction::HalfspaceIntersection, 0)
        } else {
            let center = default_center(&grid);
            let clamped = clamped_directions(&grid, center).len();
            let poly = match hull_contour(&grid, center) {
                Ok(p) => p,
                Err(Error::DegenerateHull) => Polygon::hull_of(&[center])?,
                Err(e) => return Err(e),
            };
            (poly, Construction::ConvexHull, clamped)
        };
        let max_violation = max_shortfall(&polygon, &grid);
        let degenerate = polygon.is_degenerate();
        Ok(Self {
            grid,
            polygon,
            construction,
            proper,
            tol,
            std_errors,
            censored_fractions,
            properness_gap: gap,
            max_violation,
            clamped,
            degenerate,
        })
    }

    pub fn from_cq(est: CqEstimate, tol: Option<f64>) -> Result<Self> {
        let n = est.grid.n_dirs();
        let ses = est.std_errors();
        Self::from_grid(est.grid, ses, alloc::vec![0.0; n], tol)
    }

    /// Root mean square of the per-direction standard errors.
    pub fn pooled_std_error(&self) -> f64 {
        pooled(&self.std_errors)
    }
}

fn pooled(ses: &[f64]) -> f64 {
    let finite: Vec<f64> = ses.iter().copied().filter(|s| s.is_finite()).collect();
    if finite.is_empty() {
        return 0.0;
    }
    sqrt(finite.iter().map(|s| s * s).sum::<f64>() / finite.len() as f64)
}

/// `max(3 · pooled standard error, 1e-9 · scale)`.
pub fn default_tolerance(grid: &SupportGrid, std_errors: &[f64]) -> f64 {
    (TOL_STD_ERRORS * pooled(std_errors)).max(crate::geometry::GEOMETRY_TOL * grid.scale())
}

/// Estimates the `C_Q` or `C_T` grid of `sim` and builds its contour.
pub fn build_contour<S: PathSimulator>(sim: &S, target: &ContourTarget, cfg: &ContourConfig) -> Result<ContourResult> {
    target.validate()?;
    match *target {
        ContourTarget::Quantile { t_s, q_s } => {
            if cfg.n_paths < MIN_PATHS {
                return Err(Error::InsufficientPaths { got: cfg.n_paths, min: MIN_PATHS });
            }
            let samples = simulate_sup_samples(sim, cfg.n_dirs, t_s, cfg.n_paths, cfg.seed)?;
            ContourResult::from_cq(samples.quantile_grid(q_s)?, cfg.tol)
        }
        ContourTarget::ReturnPeriod { t_r } => {
            if cfg.n_dirs < 3 {
                return Err(Error::InvalidGrid(alloc::format!("need at least 3 directions, got {}", cfg.n_dirs)));
            }
            let cap = cfg.horizon_cap.unwrap_or(20.0 * t_r).max(t_r);
            let ests = par::try_map_indices(cfg.n_dirs, |i| {
                estimate_ct(sim, UnitVector::on_grid(i, cfg.n_dirs), t_r, cfg.n_paths, cap, cfg.seed)
            })?;
            let grid = SupportGrid::new(ests.iter().map(|e| e.estimate.value).collect())?;
            let ses = ests.iter().map(|e| e.estimate.std_error).collect();
            let cens = ests.iter().map(|e| e.censored_fraction).collect();
            ContourResult::from_grid(grid, ses, cens, cfg.tol)
        }
    }
}

/// Per-direction differences between two trend cases.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairedGap {
    pub gap: f64,
    /// Batch-means standard error of the difference under common random numbers.
    pub std_error: f64,
}

/// Output of [`three_case_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeCaseResult {
    /// Contours in the order frozen-end, true trend, frozen-start.
    pub cases: [(TrendMode, ContourResult); 3],
    /// Per direction: (frozen-end − true, true − frozen-start, frozen-end − frozen-start).
    pub gaps: Vec<[PairedGap; 3]>,
    pub n_batches: usize,
}

impl ThreeCaseResult {
    pub fn n_dirs(&self) -> usize {
        self.gaps.len()
    }

    /// Direction index with the largest frozen-end minus frozen-start gap.
    pub fn argmax_outer_gap(&self) -> usize {
        let mut best = 0;
        for (i, g) in self.gaps.iter().enumerate() {
            if g[2].gap > self.gaps[best][2].gap {
                best = i;
            }
        }
        best
    }
}

/// Batches used for the paired standard errors.
pub const GAP_BATCHES: usize = 20;

/// Builds the `C_Q` contour of `model` under each trend mode with common
/// random numbers, simulating `t_s` hours from `t0` in steps of `dt`, and
/// reports the per-direction gaps between the cases.
pub fn three_case_experiment(
    model: &SeaStateModel,
    t0: f64,
    dt: f64,
    t_s: f64,
    q_s: f64,
    cfg: &ContourConfig,
) -> Result<ThreeCaseResult> {
    ContourTarget::quantile(t_s, q_s)?;
    if cfg.n_paths < MIN_PATHS {
        return Err(Error::InsufficientPaths { got: cfg.n_paths, min: MIN_PATHS });
    }
    let grid = TimeGrid::new(dt, steps_within(t_s, dt).max(1), t0)?;
    let mut samples: Vec<SupSamples> = Vec::with_capacity(3);
    let mut results = Vec::with_capacity(3);
    for mode in TrendMode::ALL {
        let sim = SeaStateSimulator::new(model.clone(), grid, mode)?;
        let s = simulate_sup_samples(&sim, cfg.n_dirs, t_s, cfg.n_paths, cfg.seed)?;
        results.push((mode, ContourResult::from_cq(s.quantile_grid(q_s)?, cfg.tol)?));
        samples.push(s);
    }
    let n_batches = GAP_BATCHES.min(cfg.n_paths / 10).max(2);
    let batch = cfg.n_paths / n_batches;
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut gaps = Vec::with_capacity(cfg.n_dirs);
    for d in 0..cfg.n_dirs {
        let full: Vec<f64> = results.iter().map(|(_, r)| r.grid.threshold(d)).collect();
        let per_batch: Vec<[f64; 3]> = (0..n_batches)
            .map(|b| {
                let r = b * batch..(b + 1) * batch;
                [0, 1, 2].map(|c| samples[c].batch_quantile(d, r.clone(), q_s))
            })
            .collect();
        gaps.push(pairs.map(|(a, b)| {
            let diffs: Vec<f64> = per_batch.iter().map(|q| q[a] - q[b]).collect();
            let se = sqrt(crate::stats::variance(&diffs) / n_batches as f64);
            PairedGap { gap: full[a] - full[b], std_error: se }
        }));
    }
    let mut it = results.into_iter();
    let cases =
        [it.next().ok_or(Error::Singular)?, it.next().ok_or(Error::Singular)?, it.next().ok_or(Error::Singular)?];
    Ok(ThreeCaseResult { cases, gaps, n_batches })
}

/// Point of the contour maximizing `response`, searched over the vertices
/// and edge midpoints; the first maximizer wins ties.
pub fn design_point(polygon: &Polygon, response: impl Fn(Point) -> f64) -> Result<(Point, f64)> {
    let v = polygon.vertices();
    if v.is_empty() {
        return Err(Error::DegeneratePolygon);
    }
    let mut best = (v[0], response(v[0]));
    for i in 0..v.len() {
        let a = v[i];
        let mid = (a + v[(i + 1) % v.len()]) * 0.5;
        for p in [a, mid] {
            let y = response(p);
            if y > best.1 {
                best = (p, y);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Constant;

    #[test]
    fn design_point_examples() {
        let sq = Polygon::new(alloc::vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 3.0)
        ])
        .unwrap();
        let (p, y) = design_point(&sq, |p| p.y).unwrap();
        assert_eq!((p, y), (Point::new(0.0, 3.0), 3.0));
        let square = Polygon::new(alloc::vec![
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0)
        ])
        .unwrap();
        let (p, y) = design_point(&square, |p| p.dot(p)).unwrap();
        assert_eq!((p, y), (square.vertices()[0], 2.0));
    }

    #[test]
    fn constant_process_collapses_to_its_point() {
        let v = Point::new(2.0, -1.0);
        let sim = Constant { value: v, dt: 1.0 };
        let target = ContourTarget::quantile(5.0, 0.5).unwrap();
        let cfg = ContourConfig { n_dirs: 36, n_paths: 100, ..Default::default() };
        let r = build_contour(&sim, &target, &cfg).unwrap();
        assert!(r.degenerate, "{r:?}");
        for p in r.polygon.vertices() {
            assert!((*p - v).norm() < 1e-6);
        }
    }
}
