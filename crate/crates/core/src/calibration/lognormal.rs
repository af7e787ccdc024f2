//! Conditional log-normal fit for the wave period given the wave height.

use alloc::vec::Vec;

use super::smoother::backfit;
use super::{CalibrationOptions, MetOceanSeries};
use crate::error::{Error, Result};
use crate::math::{ln, sqrt, LN_CHI2_1_MEAN};
use crate::process::{FourierSeries, PiecewiseLinear};

/// Fewest rows the period model is fitted from.
pub const MIN_ROWS: usize = 1000;

/// Period part of a calibrated model.
#[derive(Debug, Clone, PartialEq)]
pub struct LognormalFit {
    pub m: FourierSeries,
    pub f_mu: PiecewiseLinear,
    pub log_s: FourierSeries,
    pub log_f_sigma: PiecewiseLinear,
    /// Variance of the standardized residuals after rescaling `s` (1 up to rounding).
    pub standardized_variance: f64,
    pub backfit_iterations: (usize, usize),
}

/// `ln P | H = h ~ N(m(t) + f_μ(h), (s(t) f_σ(h))²)`.
///
/// The mean is an additive fit of `ln P`. For the spread, `ln r²` of the
/// residuals has mean `L + ln s² + ln f_σ²` with `L = E[ln χ²₁]`, so a
/// second additive fit of `ln r² − L` gives both factors; `s` is finally
/// rescaled so the standardized residuals have unit variance.
pub fn fit_lognormal(series: &MetOceanSeries, opts: &CalibrationOptions) -> Result<LognormalFit> {
    let n = series.len();
    if n < MIN_ROWS {
        return Err(Error::InsufficientData { got: n, min: MIN_ROWS });
    }
    let phases: Vec<f64> = series.t().iter().map(|&t| crate::math::rem_euclid(t / opts.year_hours, 1.0)).collect();
    let hs = series.hs();
    let y: Vec<f64> = series.tz().iter().map(|&p| ln(p)).collect();

    let mean_fit = backfit(&phases, hs, &y, opts.n_harmonics, opts.n_knots)?;
    let resid: Vec<f64> = (0..n).map(|i| y[i] - mean_fit.eval(phases[i], hs[i])).collect();
    let mean_sq = resid.iter().map(|r| r * r).sum::<f64>() / n as f64;
    let floor = 1e-12 * mean_sq.max(f64::MIN_POSITIVE);
    let log_r2: Vec<f64> = resid.iter().map(|r| ln((r * r).max(floor)) - LN_CHI2_1_MEAN).collect();

    let spread_fit = backfit(&phases, hs, &log_r2, opts.n_harmonics, opts.n_knots)?;
    let mut log_s = spread_fit.periodic.series.scaled(0.5);
    let log_f_sigma = PiecewiseLinear::new(
        spread_fit.smooth.knots().to_vec(),
        spread_fit.smooth.values().iter().map(|v| 0.5 * v).collect(),
    )?;

    let standardized = |log_s: &FourierSeries| -> Vec<f64> {
        (0..n).map(|i| resid[i] / crate::math::exp(log_s.eval(phases[i]) + log_f_sigma.eval(hs[i]))).collect()
    };
    let v = crate::stats::population_variance(&standardized(&log_s));
    log_s.mean += 0.5 * ln(v);
    let standardized_variance = crate::stats::population_variance(&standardized(&log_s));
    debug_assert!(sqrt(standardized_variance).is_finite());

    Ok(LognormalFit {
        m: mean_fit.periodic.series,
        f_mu: mean_fit.smooth,
        log_s,
        log_f_sigma,
        standardized_variance,
        backfit_iterations: (mean_fit.iterations, spread_fit.iterations),
    })
}
