//! `C_T(u)`: the level whose mean half-space hitting time equals `t_r`.
//!
//! Each path is simulated once, up to the top of the search bracket or the
//! censoring cap, keeping only its record ladder: the steps at which the
//! running maximum of `⟨u, V⟩` increases and the new maxima. The hitting
//! time of any level below the top is the first record at or above it, so
//! the empirical mean hitting time can be evaluated exactly for any level
//! without resimulating, and bisection sees one monotone step function.

use alloc::vec::Vec;

use super::EstimateWithError;
use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::math::{pow, sqrt};
use crate::par;
use crate::process::{steps_within, PathSimulator};

/// Bracket expansions attempted in each direction.
pub const MAX_DOUBLINGS: usize = 60;
/// Censoring fraction above which an estimate is flagged.
pub const CENSORING_WARN_FRACTION: f64 = 0.5;

/// Record ladders of `⟨u, V⟩` for a set of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderSet {
    dt: f64,
    cap_steps: usize,
    top: f64,
    /// Per path: (step index, record value), values strictly increasing.
    ladders: Vec<Vec<(u32, f64)>>,
}

impl LadderSet {
    /// Simulates until each path reaches `top` or `cap_steps` steps.
    pub fn simulate<S: PathSimulator>(
        sim: &S,
        u: UnitVector,
        top: f64,
        cap_steps: usize,
        n_paths: usize,
        seed: u64,
    ) -> Self {
        let ladders = par::map_indices(n_paths, |p| {
            let mut ladder = Vec::new();
            let mut best = f64::NEG_INFINITY;
            for (i, v) in sim.path(seed, p as u64).take(cap_steps).enumerate() {
                let x = u.project(v);
                if x > best {
                    best = x;
                    ladder.push((i as u32, x));
                    if x >= top {
                        break;
                    }
                }
            }
            ladder
        });
        Self { dt: sim.dt(), cap_steps, top, ladders }
    }

    pub fn n_paths(&self) -> usize {
        self.ladders.len()
    }

    /// Highest level whose hitting times the ladders determine.
    pub fn top(&self) -> f64 {
        self.top
    }

    /// Censoring time `cap_steps · dt`.
    pub fn cap(&self) -> f64 {
        self.cap_steps as f64 * self.dt
    }

    /// Hitting time of `{⟨u,v⟩ ≥ b}` on path `p`, or `None` when censored.
    pub fn hitting_time(&self, p: usize, b: f64) -> Option<f64> {
        debug_assert!(b <= self.top);
        let ladder = &self.ladders[p];
        let k = ladder.partition_point(|&(_, x)| x < b);
        ladder.get(k).map(|&(i, _)| (i as f64 + 1.0) * self.dt)
    }

    /// Hitting times with censored paths set to the cap.
    pub fn hitting_times(&self, b: f64) -> Vec<f64> {
        let cap = self.cap();
        (0..self.n_paths()).map(|p| self.hitting_time(p, b).unwrap_or(cap)).collect()
    }

    /// Empirical mean hitting time of level `b` (censored at the cap).
    pub fn mean_hitting_time(&self, b: f64) -> f64 {
        let cap = self.cap();
        let total: f64 = (0..self.n_paths()).map(|p| self.hitting_time(p, b).unwrap_or(cap)).sum();
        total / self.n_paths() as f64
    }

    pub fn censored_fraction(&self, b: f64) -> f64 {
        let n = (0..self.n_paths()).filter(|&p| self.hitting_time(p, b).is_none()).count();
        n as f64 / self.n_paths() as f64
    }

    /// Smallest level in `[lo, hi]` (to `tol`) whose mean hitting time is at
    /// least `t_r`, given `T̂(lo) < t_r ≤ T̂(hi)`.
    pub fn invert(&self, t_r: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.mean_hitting_time(mid) >= t_r {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Result of [`estimate_ct`].
#[derive(Debug, Clone, PartialEq)]
pub struct CtEstimate {
    pub estimate: EstimateWithError,
    /// Fraction of paths that never reached the estimated level before the cap.
    pub censored_fraction: f64,
    /// Censoring cap actually used (hours).
    pub horizon_cap: f64,
    /// More than half the paths were censored.
    pub high_censoring: bool,
    /// The target is met even at the lowest level tried; the value is the
    /// bracket's lower edge.
    pub at_lower_edge: bool,
}

/// `C_T(u)` for return period `t_r`: the level whose empirical mean hitting
/// time, with paths censored at `horizon_cap`, first reaches `t_r`.
///
/// The bracket starts at the median of the first-step projections and grows
/// geometrically from the spread of those projections.
pub fn estimate_ct<S: PathSimulator>(
    sim: &S,
    u: UnitVector,
    t_r: f64,
    n_paths: usize,
    horizon_cap: f64,
    seed: u64,
) -> Result<CtEstimate> {
    if !(t_r > 0.0) || !t_r.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("return period must be positive, got {t_r}")));
    }
    if !(horizon_cap >= t_r) {
        return Err(Error::InvalidParameter(alloc::format!(
            "censoring cap {horizon_cap} h is below the return period {t_r} h"
        )));
    }
    if n_paths < 2 {
        return Err(Error::InsufficientPaths { got: n_paths, min: 2 });
    }
    let dt = sim.dt();
    let mut cap_steps = steps_within(horizon_cap, dt).max(1);
    if let Some(max) = sim.max_steps() {
        if (max as f64) * dt < t_r {
            return Err(Error::BeyondHorizon { requested: t_r, horizon: max as f64 * dt });
        }
        cap_steps = cap_steps.min(max);
    }

    let mut first: Vec<f64> =
        par::map_indices(n_paths, |p| sim.path(seed, p as u64).next().map(|v| u.project(v)).unwrap_or(f64::NAN));
    first.sort_by(f64::total_cmp);
    let base = crate::stats::lower_quantile_sorted(&first, 0.5);
    let spread = sqrt(crate::stats::variance(&first));
    let width = if spread > 0.0 && spread.is_finite() { spread } else { 1e-3 * base.abs().max(1.0) };

    let mut ladders = None;
    let mut hi = base;
    for j in 0..MAX_DOUBLINGS {
        hi = base + width * pow(2.0, j as f64);
        let set = LadderSet::simulate(sim, u, hi, cap_steps, n_paths, seed);
        if set.mean_hitting_time(hi) >= t_r {
            ladders = Some(set);
            break;
        }
    }
    let ladders = ladders.ok_or(Error::TargetBeyondHorizon)?;

    let mut lo = base;
    let mut at_lower_edge = false;
    if ladders.mean_hitting_time(lo) >= t_r {
        at_lower_edge = true;
        for j in 0..MAX_DOUBLINGS {
            let cand = base - width * pow(2.0, j as f64);
            if ladders.mean_hitting_time(cand) < t_r {
                lo = cand;
                at_lower_edge = false;
                break;
            }
        }
    }

    let value = if at_lower_edge {
        base
    } else {
        let tol = 1e-10 * (1.0 + lo.abs().max(hi.abs()));
        ladders.invert(t_r, lo, hi, tol)
    };

    let times = ladders.hitting_times(value.min(ladders.top()));
    let t_hat = EstimateWithError::mean_of(&times);
    let h = 0.5 * width * pow(n_paths as f64, -0.2);
    let (b_minus, b_plus) = (value - h, (value + h).min(ladders.top()));
    let slope = (ladders.mean_hitting_time(b_plus) - ladders.mean_hitting_time(b_minus)) / (b_plus - b_minus);
    let std_error = if t_hat.std_error == 0.0 {
        0.0
    } else if slope > 0.0 {
        t_hat.std_error / slope
    } else {
        f64::INFINITY
    };
    let censored_fraction = ladders.censored_fraction(value.min(ladders.top()));
    Ok(CtEstimate {
        estimate: EstimateWithError::new(value, std_error, n_paths),
        censored_fraction,
        horizon_cap: ladders.cap(),
        high_censoring: censored_fraction > CENSORING_WARN_FRACTION,
        at_lower_edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::process::{Constant, IidGaussian, PathSimulator};

    #[test]
    fn ladder_times_match_direct_scan() {
        let sim = IidGaussian::scalar(1.0);
        let u = UnitVector::on_grid(0, 4);
        let set = LadderSet::simulate(&sim, u, 2.5, 200, 50, 11);
        for p in 0..50 {
            let path: Vec<f64> = sim.path(11, p as u64).take(200).map(|v| v.x).collect();
            for &b in &[-1.0, 0.0, 1.3, 2.5] {
                let direct = path.iter().position(|&x| x >= b).map(|i| (i + 1) as f64);
                assert_eq!(set.hitting_time(p, b), direct);
            }
        }
    }

    #[test]
    fn constant_process() {
        let sim = Constant { value: Point::new(0.3, 0.7), dt: 1.0 };
        let u = UnitVector::on_grid(1, 4);
        let est = estimate_ct(&sim, u, 10.0, 100, 200.0, 0).unwrap();
        assert!((est.estimate.value - 0.7).abs() < 1e-8, "{est:?}");
    }

    #[test]
    fn one_step_target_returns_lower_edge() {
        let sim = IidGaussian::scalar(1.0);
        let est = estimate_ct(&sim, UnitVector::on_grid(0, 4), 1.0, 1000, 20.0, 4).unwrap();
        assert!(est.at_lower_edge);
    }

    #[test]
    fn cap_below_target_is_rejected() {
        let sim = IidGaussian::scalar(1.0);
        assert!(estimate_ct(&sim, UnitVector::on_grid(0, 4), 10.0, 100, 5.0, 0).is_err());
    }
}
