use rand_distr::{Distribution, StandardNormal};

use super::{path_rng, PathRng, PathSample, PathSimulator, TimeGrid};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::math::{exp, sqrt};

/// Standardised Ornstein–Uhlenbeck process started at `V₀ = 0`, sampled by
/// its exact one-step transition
/// `V_{n+1} = e^{−θΔt} V_n + √(1 − e^{−2θΔt}) Z_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrnsteinUhlenbeck {
    theta: f64,
    dt: f64,
    decay: f64,
    noise: f64,
}

impl OrnsteinUhlenbeck {
    /// `theta` is the mean-reversion rate in 1/hours.
    pub fn new(theta: f64, dt: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("theta must be positive, got {theta}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt}")));
        }
        Ok(Self { theta, dt, decay: exp(-theta * dt), noise: sqrt(-libm::expm1(-2.0 * theta * dt)) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Lag-one autocorrelation of the sampled chain.
    pub fn step_autocorrelation(&self) -> f64 {
        self.decay
    }
}

pub struct OuPath {
    rng: PathRng,
    state: f64,
    decay: f64,
    noise: f64,
}

impl Iterator for OuPath {
    type Item = Point;

    #[inline]
    fn next(&mut self) -> Option<Point> {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.state = self.decay * self.state + self.noise * z;
        Some(Point::new(self.state, 0.0))
    }
}

impl PathSimulator for OrnsteinUhlenbeck {
    type Path<'a> = OuPath;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn dimension(&self) -> usize {
        1
    }

    // The chain starts at 0, not in its stationary law.
    fn is_stationary(&self) -> bool {
        false
    }

    fn supports_exact_marginal(&self) -> bool {
        true
    }

    fn max_steps(&self) -> Option<usize> {
        None
    }

    fn path(&self, seed: u64, stream: u64) -> OuPath {
        OuPath { rng: path_rng(seed, stream), state: 0.0, decay: self.decay, noise: self.noise }
    }
}

/// OU path on `grid` with rate `theta` (1/hours), embedded as `(v, 0)`.
pub fn simulate_ou(grid: &TimeGrid, theta: f64, seed: u64) -> Result<PathSample> {
    let sim = OrnsteinUhlenbeck::new(theta, grid.dt())?;
    Ok(PathSample { grid: *grid, values: sim.path(seed, 0).take(grid.n_steps()).collect() })
}
