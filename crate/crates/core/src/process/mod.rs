//! Discrete-time path simulators for the environmental process.
//!
//! A path is the sequence of states `V` over consecutive steps of length
//! `dt`. Step `i` (0-based) is the state over the `i`-th period; an exceedence
//! in that step is dated `(i + 1)·dt`, so a path observed up to time `t`
//! covers `⌊t/dt⌋` steps.
//!
//! Every path is driven by its own ChaCha stream: `(seed, stream)` fully
//! determines it, independent of how paths are scheduled on threads.

mod gaussian;
mod ou;
mod seastate;

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;

pub use gaussian::{simulate_iid_gaussian, IidGaussian, IidGaussianPath};
pub use ou::{simulate_ou, OrnsteinUhlenbeck, OuPath};
pub use seastate::{
    marginal_quantile_projection, simulate_seastate, FourierSeries, PiecewiseLinear, SeaStateModel, SeaStatePath,
    SeaStateSimulator, TrendMode,
};


/// Hours in a year unless configured otherwise (Julian year).
pub const DEFAULT_YEAR_HOURS: f64 = 8766.0;

/// Random generator driving one path.
pub type PathRng = ChaCha8Rng;

/// Generator for stream `stream` of the master `seed`.
pub fn path_rng(seed: u64, stream: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform time discretization. Times are in hours.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
    t0: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, n_steps: usize, t0: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter("time grid needs at least one step".into()));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        Ok(Self { dt, n_steps, t0 })
    }

    /// Grid of `⌊horizon/dt⌋` steps starting at `t0`.
    pub fn covering(dt: f64, horizon: f64, t0: f64) -> Result<Self> {
        Self::new(dt, steps_within(horizon, dt), t0)
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Length of the grid, `n_steps · dt`.
    #[inline]
    pub fn horizon(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    /// Absolute time at the start of step `i`.
    #[inline]
    pub fn step_time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }
}

/// Number of whole steps of length `dt` within `t`, robust to rounding.
pub fn steps_within(t: f64, dt: f64) -> usize {
    let n = t / dt;
    if !(n > 0.0) {
        return 0;
    }
    libm::floor(n + 1e-9) as usize
}

/// A simulated path on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    grid: TimeGrid,
    values: Vec<Point>,
}

impl PathSample {
    pub fn new(grid: TimeGrid, values: Vec<Point>) -> Result<Self> {
        if values.len() != grid.n_steps() {
            return Err(Error::InvalidParameter(alloc::format!(
                "path has {} values for {} steps",
                values.len(),
                grid.n_steps()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("path contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Point] {
        &self.values
    }

    /// First components, for scalar models embedded as `(v, 0)`.
    pub fn scalar_values(&self) -> Vec<f64> {
        self.values.iter().map(|p| p.x).collect()
    }
}

/// Generator of discrete-time paths of the environmental process.
///
/// Implementations must be deterministic in `(seed, stream)`.
pub trait PathSimulator: Sync {
    type Path<'a>: Iterator<Item = Point>
    where
        Self: 'a;

    /// Step length in hours.
    fn dt(&self) -> f64;

    /// 1 for scalar processes (embedded on the first axis), otherwise 2.
    fn dimension(&self) -> usize;

    fn is_stationary(&self) -> bool;

    /// Whether the one-step marginal is available in closed form.
    fn supports_exact_marginal(&self) -> bool {
        false
    }

    /// Longest path the simulator can produce; `None` when unbounded.
    fn max_steps(&self) -> Option<usize>;

    /// Path number `stream` of the master `seed`.
    fn path(&self, seed: u64, stream: u64) -> Self::Path<'_>;

    /// Collects the first `n_steps` states of a path.
    fn sample(&self, seed: u64, stream: u64, n_steps: usize) -> Result<PathSample> {
        if let Some(max) = self.max_steps() {
            if n_steps > max {
                return Err(Error::BeyondHorizon {
                    requested: n_steps as f64 * self.dt(),
                    horizon: max as f64 * self.dt(),
                });
            }
        }
        let grid = TimeGrid::new(self.dt(), n_steps, 0.0)?;
        PathSample::new(grid, self.path(seed, stream).take(n_steps).collect())
    }
}

/// Degenerate process that sits at one point forever.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub value: Point,
    pub dt: f64,
}

impl PathSimulator for Constant {
    type Path<'a> = core::iter::Repeat<Point>;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn dimension(&self) -> usize {
        2
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn supports_exact_marginal(&self) -> bool {
        true
    }

    fn max_steps(&self) -> Option<usize> {
        None
    }

    fn path(&self, _seed: u64, _stream: u64) -> Self::Path<'_> {
        core::iter::repeat(self.value)
    }
}
