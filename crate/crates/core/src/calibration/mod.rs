//! Fitting the sea-state model to an hourly series of significant wave
//! height and wave period, plus a synthetic series generator.

mod lognormal;
mod smoother;
mod weibull;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{lgamma, ln};
use crate::process::{
    FourierSeries, PathSimulator, PiecewiseLinear, SeaStateModel, SeaStateSimulator, TimeGrid, TrendMode,
    DEFAULT_YEAR_HOURS,
};

pub use lognormal::{fit_lognormal, LognormalFit, MIN_ROWS};
pub use smoother::{backfit, project_fourier, quantile_knots, AdditiveFit, Design, PenalizedFit, PeriodicSmoother};
pub use weibull::{fit_weibull, floor_two_significant, invert_moment_ratio, moment_ratio, WeibullFit};

/// Observed `(t, H_s, T_z)` rows with strictly increasing `t` (hours).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetOceanSeries {
    t: Vec<f64>,
    hs: Vec<f64>,
    tz: Vec<f64>,
}

impl MetOceanSeries {
    pub fn new(t: Vec<f64>, hs: Vec<f64>, tz: Vec<f64>) -> Result<Self> {
        if t.len() != hs.len() || t.len() != tz.len() {
            return Err(Error::InvalidSeries("columns differ in length".into()));
        }
        for i in 0..t.len() {
            if !t[i].is_finite() {
                return Err(Error::InvalidSeries(format!("row {i}: non-finite time")));
            }
            if !(hs[i] > 0.0) || !hs[i].is_finite() {
                return Err(Error::InvalidSeries(format!("row {i}: wave height must be positive, got {}", hs[i])));
            }
            if !(tz[i] > 0.0) || !tz[i].is_finite() {
                return Err(Error::InvalidSeries(format!("row {i}: wave period must be positive, got {}", tz[i])));
            }
            if i > 0 && t[i] <= t[i - 1] {
                let what = if t[i] == t[i - 1] { "duplicate timestamp" } else { "time not increasing" };
                return Err(Error::InvalidSeries(format!("row {i}: {what} at t = {}", t[i])));
            }
        }
        Ok(Self { t, hs, tz })
    }

    /// Keeps valid rows only: sorts by time, then drops rows with
    /// non-positive or non-finite values and repeated timestamps. Returns the
    /// series and the number of rows dropped.
    pub fn from_rows_lossy(rows: impl IntoIterator<Item = (f64, f64, f64)>) -> (Self, usize) {
        let mut rows: Vec<(f64, f64, f64)> = rows.into_iter().collect();
        let total = rows.len();
        rows.retain(|&(t, h, p)| t.is_finite() && h > 0.0 && h.is_finite() && p > 0.0 && p.is_finite());
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows.dedup_by(|b, a| a.0 == b.0);
        let kept = rows.len();
        let mut s = Self::default();
        for (t, h, p) in rows {
            s.t.push(t);
            s.hs.push(h);
            s.tz.push(p);
        }
        (s, total - kept)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn hs(&self) -> &[f64] {
        &self.hs
    }

    pub fn tz(&self) -> &[f64] {
        &self.tz
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.len()).map(|i| (self.t[i], self.hs[i], self.tz[i]))
    }
}

/// Smoother settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationOptions {
    pub n_harmonics: usize,
    /// Knots of the height-effect smoothers.
    pub n_knots: usize,
    pub year_hours: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { n_harmonics: 3, n_knots: 12, year_hours: DEFAULT_YEAR_HOURS }
    }
}

/// Fitted model with the intermediate fits.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub model: SeaStateModel,
    pub weibull: WeibullFit,
    pub lognormal: LognormalFit,
    pub n_rows: usize,
}

/// Height fit followed by the period fit.
pub fn calibrate(series: &MetOceanSeries, opts: &CalibrationOptions) -> Result<Calibration> {
    if series.len() < MIN_ROWS {
        return Err(Error::InsufficientData { got: series.len(), min: MIN_ROWS });
    }
    if opts.n_harmonics == 0 || opts.n_knots < 2 || !(opts.year_hours > 0.0) {
        return Err(Error::InvalidParameter("calibration needs ≥ 1 harmonic, ≥ 2 knots and a positive year".into()));
    }
    let weibull = fit_weibull(series, opts)?;
    let lognormal = fit_lognormal(series, opts)?;
    let model = SeaStateModel {
        year_hours: opts.year_hours,
        loc: weibull.loc,
        c1: weibull.c1,
        c2: weibull.c2,
        log_l: weibull.log_l.clone(),
        k_norm: weibull.k_norm.clone(),
        k_ratio: weibull.k_ratio,
        m: lognormal.m.clone(),
        f_mu: lognormal.f_mu.clone(),
        log_s: lognormal.log_s.clone(),
        log_f_sigma: lognormal.log_f_sigma.clone(),
    };
    model.validate()?;
    Ok(Calibration { model, weibull, lognormal, n_rows: series.len() })
}

/// What [`generate_synthetic`] simulates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SyntheticSpec {
    pub model: SeaStateModel,
    /// Length of the series in hours; one row per hour.
    pub duration_hours: f64,
    /// Time of the first row; `None` ends the series at `t = 0`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub start_hours: Option<f64>,
}

/// Hourly series simulated from `spec.model` under its own trend.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<MetOceanSeries> {
    let n = crate::process::steps_within(spec.duration_hours, 1.0);
    let start = spec.start_hours.unwrap_or(-(n as f64));
    let grid = TimeGrid::new(1.0, n, start)?;
    let sim = SeaStateSimulator::new(spec.model.clone(), grid, TrendMode::TrueTrend)?;
    let mut s = MetOceanSeries::default();
    for (i, v) in sim.path(seed, 0).enumerate() {
        s.t.push(grid.step_time(i));
        s.hs.push(v.y);
        s.tz.push(v.x);
    }
    Ok(s)
}

/// Synthetic model with trend parameters `loc = 0.37 m`, `c1 = 2.5 m`,
/// `c2 = 4 mm/year`, mildly seasonal shape and scale, and a period that
/// grows with the wave height.
pub fn reference_model() -> SeaStateModel {
    let season = |mean: f64, amp: f64| FourierSeries { mean, cos: alloc::vec![amp], sin: alloc::vec![0.0] };
    let k_ratio = 1.5;
    let h_knots = alloc::vec![0.37, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 25.0];
    let f_mu = PiecewiseLinear::from_fn(h_knots, |h| 0.35 * ln(h)).expect("static knots");
    let log_f_sigma = PiecewiseLinear::new(alloc::vec![0.0, 5.0], alloc::vec![ln(1.2), ln(0.9)]).expect("static knots");
    let model = SeaStateModel {
        year_hours: DEFAULT_YEAR_HOURS,
        loc: 0.37,
        c1: 2.5,
        c2: 4.0e-3,
        log_l: season(-lgamma(1.0 + 1.0 / k_ratio), 0.25),
        k_norm: season(1.0, 0.1),
        k_ratio,
        m: season(ln(4.5), 0.05),
        f_mu,
        log_s: season(ln(0.12), 0.1),
        log_f_sigma,
    };
    debug_assert!(model.validate().is_ok());
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn series_validation() {
        assert!(MetOceanSeries::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![5.0, 5.0]).is_ok());
        let dup = MetOceanSeries::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 5.0]).unwrap_err();
        assert!(alloc::string::ToString::to_string(&dup).contains("duplicate"));
        assert!(MetOceanSeries::new(vec![0.0], vec![1.0], vec![0.0]).is_err());
        let (s, dropped) = MetOceanSeries::from_rows_lossy(vec![(2.0, 1.0, 5.0), (1.0, 1.0, -5.0), (0.0, 1.0, 4.0)]);
        assert_eq!((s.len(), dropped), (2, 1));
        assert_eq!(s.t(), &[0.0, 2.0]);
    }

    #[test]
    fn synthetic_year_has_one_row_per_hour() {
        let spec = SyntheticSpec { model: reference_model(), duration_hours: DEFAULT_YEAR_HOURS, start_hours: None };
        let s = generate_synthetic(&spec, 1).unwrap();
        assert_eq!(s.len(), 8766);
        assert_eq!(s.t()[s.len() - 1], -1.0);
        assert_eq!(s, generate_synthetic(&spec, 1).unwrap());
        assert!(s.hs().iter().all(|&h| h >= 0.37));
    }

    #[test]
    fn empty_series_is_insufficient() {
        let err = calibrate(&MetOceanSeries::default(), &CalibrationOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { got: 0, .. }));
    }
}
