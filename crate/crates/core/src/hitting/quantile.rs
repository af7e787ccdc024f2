//! `C_Q(u)`: lower `q_s`-quantile of `φ^u_{t_s}` over simulated paths.

use alloc::vec;
use alloc::vec::Vec;

use super::{EstimateWithError, SupEstimate};
use crate::error::{Error, Result};
use crate::geometry::{Point, SupportGrid, UnitVector};
use crate::math::{ceil, sqrt};
use crate::par;
use crate::process::{steps_within, PathSimulator};
use crate::stats::lower_quantile_rank;

/// Fewest paths a quantile estimate is computed from.
pub const MIN_PATHS: usize = 100;

/// Lower `q`-quantile of ascending `sorted` with a standard error from the
/// order-statistic asymptotics `√(q(1−q)/n) / f(ξ_q)`, the density estimated
/// by a difference of order statistics `⌈√n⌉` ranks either side.
pub fn quantile_with_error(sorted: &[f64], q: f64) -> EstimateWithError {
    let n = sorted.len();
    let r = lower_quantile_rank(n, q);
    let value = sorted[r - 1];
    if n < 2 {
        return EstimateWithError::new(value, 0.0, n);
    }
    let m = ceil(sqrt(n as f64)) as usize;
    let lo = r.saturating_sub(m).max(1);
    let hi = (r + m).min(n);
    let sparsity = (sorted[hi - 1] - sorted[lo - 1]) * n as f64 / (hi - lo) as f64;
    let qq = q.clamp(0.0, 1.0);
    EstimateWithError::new(value, sparsity * sqrt(qq * (1.0 - qq) / n as f64), n)
}

/// `φ^{u_i}_t` for a uniform grid of directions, one value per path.
#[derive(Debug, Clone, PartialEq)]
pub struct SupSamples {
    n_dirs: usize,
    n_paths: usize,
    horizon: f64,
    /// Direction-major: `values[d * n_paths + p]`.
    values: Vec<f64>,
}

impl SupSamples {
    pub fn n_dirs(&self) -> usize {
        self.n_dirs
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn direction(&self, d: usize) -> UnitVector {
        UnitVector::on_grid(d, self.n_dirs)
    }

    /// Samples along direction `d` in path order.
    pub fn column(&self, d: usize) -> &[f64] {
        &self.values[d * self.n_paths..(d + 1) * self.n_paths]
    }

    pub fn sup_estimate(&self, d: usize) -> SupEstimate {
        SupEstimate::new(self.direction(d), self.column(d).to_vec())
    }

    /// Per-direction lower `q`-quantiles.
    pub fn quantile_grid(&self, q: f64) -> Result<CqEstimate> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("quantile level must be in (0, 1), got {q}")));
        }
        let mut buf = vec![0.0; self.n_paths];
        let mut estimates = Vec::with_capacity(self.n_dirs);
        for d in 0..self.n_dirs {
            buf.copy_from_slice(self.column(d));
            buf.sort_by(f64::total_cmp);
            estimates.push(quantile_with_error(&buf, q));
        }
        let grid = SupportGrid::new(estimates.iter().map(|e| e.value).collect())?;
        Ok(CqEstimate { grid, estimates, t_s: self.horizon, q_s: q })
    }

    /// Lower `q`-quantile along `d` computed from paths `range` only.
    pub fn batch_quantile(&self, d: usize, range: core::ops::Range<usize>, q: f64) -> f64 {
        let mut v = self.column(d)[range].to_vec();
        v.sort_by(f64::total_cmp);
        crate::stats::lower_quantile_sorted(&v, q)
    }
}

/// Estimated `C_Q` grid with per-direction errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CqEstimate {
    pub grid: SupportGrid,
    pub estimates: Vec<EstimateWithError>,
    pub t_s: f64,
    pub q_s: f64,
}

impl CqEstimate {
    pub fn std_errors(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.std_error).collect()
    }
}

/// Tracks `max_s ⟨u_i, V_s⟩` for all directions at once.
///
/// A state `v` can only raise some maximum if `⟨u_i, v⟩ > M_i` for some `i`;
/// since `⟨u_i, v⟩ ≤ ⟨u_i, c⟩ + ‖v − c‖`, no maximum changes while
/// `‖v − c‖ ≤ min_i (M_i − ⟨u_i, c⟩)`. Most states fail that test after the
/// first few steps, so the per-step cost is one norm instead of `n_dirs`
/// projections.
struct MaxTracker<'a> {
    dirs: &'a [Point],
    maxima: Vec<f64>,
    center: Point,
    slack: f64,
}

impl<'a> MaxTracker<'a> {
    fn new(dirs: &'a [Point], first: Point) -> Self {
        let maxima = dirs.iter().map(|u| u.dot(first)).collect();
        Self { dirs, maxima, center: first, slack: 0.0 }
    }

    #[inline]
    fn push(&mut self, v: Point) {
        let dist = (v - self.center).norm();
        // Margin covers rounding in the bound versus the direct projection.
        let margin = 1e-10 * (1.0 + self.center.norm() + dist);
        if dist + margin <= self.slack {
            return;
        }
        let mut changed = false;
        for (m, u) in self.maxima.iter_mut().zip(self.dirs) {
            let p = u.dot(v);
            if p > *m {
                *m = p;
                changed = true;
            }
        }
        if changed {
            self.refresh_slack();
        }
    }

    fn refresh_slack(&mut self) {
        let c = self.center;
        self.slack = self.maxima.iter().zip(self.dirs).map(|(m, u)| m - u.dot(c)).fold(f64::INFINITY, f64::min);
    }

    /// Moves the center to the least-squares center of the current support
    /// profile, `(2/n) Σ M_i u_i` on a uniform grid.
    fn recenter(&mut self) {
        let n = self.dirs.len() as f64;
        let mut c = Point::new(0.0, 0.0);
        for (m, u) in self.maxima.iter().zip(self.dirs) {
            c = c + *u * *m;
        }
        self.center = c * (2.0 / n);
        self.refresh_slack();
    }
}

fn path_maxima<S: PathSimulator>(sim: &S, dirs: &[Point], n_steps: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut path = sim.path(seed, stream);
    let Some(first) = path.next() else {
        return vec![f64::NEG_INFINITY; dirs.len()];
    };
    let mut tracker = MaxTracker::new(dirs, first);
    for (i, v) in path.take(n_steps - 1).enumerate() {
        let step = i + 1;
        if step >= 16 && step.is_power_of_two() && dirs.len() >= 3 {
            tracker.recenter();
        }
        tracker.push(v);
    }
    tracker.maxima
}

/// Simulates `n_paths` paths to `horizon` and records `φ^{u_i}_{horizon}`
/// on `n_dirs` uniformly spaced directions. Path `p` uses stream `p` of `seed`.
pub fn simulate_sup_samples<S: PathSimulator>(
    sim: &S,
    n_dirs: usize,
    horizon: f64,
    n_paths: usize,
    seed: u64,
) -> Result<SupSamples> {
    if n_dirs < 3 {
        return Err(Error::InvalidGrid(alloc::format!("need at least 3 directions, got {n_dirs}")));
    }
    if n_paths == 0 {
        return Err(Error::InsufficientPaths { got: 0, min: 1 });
    }
    let n_steps = steps_within(horizon, sim.dt());
    if n_steps == 0 {
        return Err(Error::InvalidParameter(alloc::format!("horizon {horizon} h is shorter than one step")));
    }
    if let Some(max) = sim.max_steps() {
        if n_steps > max {
            return Err(Error::BeyondHorizon { requested: horizon, horizon: max as f64 * sim.dt() });
        }
    }
    let dirs: Vec<Point> = (0..n_dirs).map(|i| UnitVector::on_grid(i, n_dirs).as_point()).collect();
    let per_path = par::map_indices(n_paths, |p| path_maxima(sim, &dirs, n_steps, seed, p as u64));
    let mut values = vec![0.0; n_dirs * n_paths];
    for (p, maxima) in per_path.iter().enumerate() {
        for (d, m) in maxima.iter().enumerate() {
            values[d * n_paths + p] = *m;
        }
    }
    Ok(SupSamples { n_dirs, n_paths, horizon, values })
}

/// `C_Q(u_i)` on a uniform grid: lower `q_s`-quantile of `φ^{u_i}_{t_s}`
/// over one shared set of `n_paths` paths.
pub fn estimate_cq<S: PathSimulator>(
    sim: &S,
    n_dirs: usize,
    t_s: f64,
    q_s: f64,
    n_paths: usize,
    seed: u64,
) -> Result<CqEstimate> {
    if n_paths < MIN_PATHS {
        return Err(Error::InsufficientPaths { got: n_paths, min: MIN_PATHS });
    }
    simulate_sup_samples(sim, n_dirs, t_s, n_paths, seed)?.quantile_grid(q_s)
}
