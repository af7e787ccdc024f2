//! Running suprema of projected paths, half-space hitting times, and their
//! inversion into the thresholds `C_Q(u)` and `C_T(u)`.

mod closed_form;
mod quantile;
mod return_period;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::math::sqrt;
use crate::process::{steps_within, PathSample};

pub use closed_form::{
    gaussian_ce, iid_equivalences, ou_ct_radius, ou_iid_crossing, ou_iid_crossing_approx, ou_ln_mean_exit_time,
    ou_mean_exit_time, ou_mean_exit_time_asymptotic, ou_mean_exit_time_integral, ou_mean_exit_time_series, Crossing,
    IidEquivalence,
};
pub use quantile::{estimate_cq, quantile_with_error, simulate_sup_samples, CqEstimate, SupSamples, MIN_PATHS};
pub use return_period::{estimate_ct, CtEstimate, LadderSet, CENSORING_WARN_FRACTION, MAX_DOUBLINGS};

/// What a contour is required to guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ContourTarget {
    /// Survive `t_s` hours with probability at least `q_s`.
    Quantile { t_s: f64, q_s: f64 },
    /// Mean exceedence time at least `t_r` hours.
    ReturnPeriod { t_r: f64 },
}

impl ContourTarget {
    pub fn quantile(t_s: f64, q_s: f64) -> Result<Self> {
        let t = ContourTarget::Quantile { t_s, q_s };
        t.validate()?;
        Ok(t)
    }

    pub fn return_period(t_r: f64) -> Result<Self> {
        let t = ContourTarget::ReturnPeriod { t_r };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ContourTarget::Quantile { t_s, q_s } => {
                if !(t_s > 0.0) || !t_s.is_finite() {
                    return Err(Error::InvalidParameter(format!("survival time must be positive, got {t_s}")));
                }
                if !(q_s > 0.0 && q_s < 1.0) {
                    return Err(Error::InvalidParameter(format!("survival probability must be in (0, 1), got {q_s}")));
                }
            }
            ContourTarget::ReturnPeriod { t_r } => {
                if !(t_r > 0.0) || !t_r.is_finite() {
                    return Err(Error::InvalidParameter(format!("return period must be positive, got {t_r}")));
                }
            }
        }
        Ok(())
    }

    /// Horizon the target looks at: `t_s` or `t_r`.
    pub fn time(&self) -> f64 {
        match *self {
            ContourTarget::Quantile { t_s, .. } => t_s,
            ContourTarget::ReturnPeriod { t_r } => t_r,
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
}

impl EstimateWithError {
    pub fn new(value: f64, std_error: f64, n_paths: usize) -> Self {
        Self { value, std_error: std_error.max(0.0), n_paths }
    }

    /// Mean of `xs` with standard error `sd/√n`.
    pub fn mean_of(xs: &[f64]) -> Self {
        let n = xs.len();
        let m = crate::stats::mean(xs);
        let se = if n > 1 { sqrt(crate::stats::variance(xs) / n as f64) } else { 0.0 };
        Self::new(m, se, n)
    }

    /// Whether `|value − reference| ≤ k · std_error`.
    pub fn within(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error
    }
}

/// Sorted samples of the running supremum `φ^u_t` along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SupEstimate {
    direction: UnitVector,
    samples: Vec<f64>,
}

impl SupEstimate {
    pub fn new(direction: UnitVector, mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { direction, samples }
    }

    pub fn direction(&self) -> UnitVector {
        self.direction
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n_paths(&self) -> usize {
        self.samples.len()
    }

    /// Empirical `P(φ ≥ b)`, the probability of entering `{⟨u,v⟩ ≥ b}` by the horizon.
    pub fn hitting_probability(&self, b: f64) -> f64 {
        let below = self.samples.partition_point(|&x| x < b);
        (self.samples.len() - below) as f64 / self.samples.len() as f64
    }

    /// Empirical `P(φ ≤ b)`.
    pub fn survival_probability(&self, b: f64) -> f64 {
        self.samples.partition_point(|&x| x <= b) as f64 / self.samples.len() as f64
    }

    pub fn lower_quantile(&self, q: f64) -> f64 {
        crate::stats::lower_quantile_sorted(&self.samples, q)
    }

    pub fn quantile_estimate(&self, q: f64) -> EstimateWithError {
        quantile_with_error(&self.samples, q)
    }
}

/// `φ^u_t = max ⟨V_s, u⟩` over the steps of `path` within `t`.
pub fn sup_projection(path: &PathSample, u: UnitVector, t: f64) -> Result<f64> {
    let grid = path.grid();
    if t > grid.horizon() * (1.0 + 1e-12) {
        return Err(Error::BeyondHorizon { requested: t, horizon: grid.horizon() });
    }
    let n = steps_within(t, grid.dt()).min(path.values().len());
    if n == 0 {
        return Err(Error::InvalidParameter(format!("horizon {t} h is shorter than one step")));
    }
    Ok(path.values()[..n].iter().map(|&v| u.project(v)).fold(f64::NEG_INFINITY, f64::max))
}

/// First time `path` enters `{⟨u,v⟩ ≥ b}`, or `None` if it never does.
pub fn hitting_time(path: &PathSample, u: UnitVector, b: f64) -> Option<f64> {
    path.values().iter().position(|&v| u.project(v) >= b).map(|i| (i + 1) as f64 * path.grid().dt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::process::TimeGrid;
    use alloc::vec;

    fn small_path() -> PathSample {
        let grid = TimeGrid::new(1.0, 3, 0.0).unwrap();
        PathSample::new(grid, vec![Point::new(1.0, 0.0), Point::new(0.0, 2.0), Point::new(-1.0, 1.0)]).unwrap()
    }

    #[test]
    fn sup_projection_examples() {
        let p = small_path();
        assert_eq!(sup_projection(&p, UnitVector::on_grid(1, 4), 3.0).unwrap(), 2.0);
        assert_eq!(sup_projection(&p, UnitVector::on_grid(0, 4), 3.0).unwrap(), 1.0);
        assert_eq!(sup_projection(&p, UnitVector::on_grid(1, 4), 1.0).unwrap(), 0.0);
        assert!(matches!(sup_projection(&p, UnitVector::on_grid(0, 4), 4.0), Err(Error::BeyondHorizon { .. })));
    }

    #[test]
    fn hitting_times_are_dated_at_step_end() {
        let p = small_path();
        let up = UnitVector::on_grid(1, 4);
        assert_eq!(hitting_time(&p, up, 0.5), Some(2.0));
        assert_eq!(hitting_time(&p, up, -1.0), Some(1.0));
        assert_eq!(hitting_time(&p, up, 2.5), None);
    }

    #[test]
    fn target_validation() {
        assert!(ContourTarget::quantile(10.0, 0.5).is_ok());
        assert!(ContourTarget::quantile(10.0, 1.0).is_err());
        assert!(ContourTarget::return_period(-1.0).is_err());
    }

    #[test]
    fn empirical_probabilities() {
        let s = SupEstimate::new(UnitVector::on_grid(0, 4), vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(s.samples(), &[1.0, 2.0, 2.0, 3.0]);
        assert_eq!(s.hitting_probability(2.0), 0.75);
        assert_eq!(s.survival_probability(2.0), 0.75);
        assert_eq!(s.hitting_probability(3.5), 0.0);
    }
}
