//! Non-stationary three-parameter Weibull fit for significant wave height.

use alloc::vec::Vec;

use super::smoother::{project_fourier, PeriodicSmoother};
use super::{CalibrationOptions, MetOceanSeries};
use crate::error::{Error, Result};
use crate::math::{exp, floor, lgamma, ln, log10, pow, sqrt};
use crate::process::FourierSeries;

/// Phase points used to invert and project the seasonal shape and scale.
const PHASE_GRID: usize = 720;

/// `Γ(1 + 1/k)² / Γ(1 + 2/k)`, the ratio `E[X]²/E[X²]` of a Weibull variable
/// with shape `k` and zero location.
pub fn moment_ratio(k: f64) -> f64 {
    exp(2.0 * lgamma(1.0 + 1.0 / k) - lgamma(1.0 + 2.0 / k))
}

const K_MIN: f64 = 0.01;
const K_MAX: f64 = 1000.0;

/// Shape `k` with `moment_ratio(k) = ratio`, by bisection in `ln k`.
pub fn invert_moment_ratio(ratio: f64) -> Result<f64> {
    if !(ratio > moment_ratio(K_MIN) && ratio < moment_ratio(K_MAX)) {
        return Err(Error::MomentRatioInfeasible { ratio });
    }
    let (mut lo, mut hi) = (ln(K_MIN), ln(K_MAX));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if moment_ratio(exp(mid)) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(exp(0.5 * (lo + hi)))
}

/// `x` rounded down to two significant digits.
pub fn floor_two_significant(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return x;
    }
    let e = floor(log10(x)) - 1.0;
    // Divide by an exact power of ten where possible so 0.37 stays 0.37.
    let at = |n: f64| if e < 0.0 { n / pow(10.0, -e) } else { n * pow(10.0, e) };
    let mut n = floor(x / pow(10.0, e));
    if at(n + 1.0) <= x {
        n += 1.0;
    }
    while at(n) > x {
        n -= 1.0;
    }
    at(n)
}

/// Height part of a calibrated model.
#[derive(Debug, Clone, PartialEq)]
pub struct WeibullFit {
    pub loc: f64,
    pub c1: f64,
    pub c2: f64,
    /// Standard error of `c2` from the trend regression.
    pub c2_std_error: f64,
    /// Annual mean of the raw shape.
    pub k_ratio: f64,
    /// Shape normalized to annual mean 1.
    pub k_norm: FourierSeries,
    pub log_l: FourierSeries,
    /// Seasonal moment ratio `E[Z]²/E[Z²]` on the phase grid, for diagnostics.
    pub moment_ratios: Vec<f64>,
}

/// Location, trend, seasonal shape and seasonal scale of `H`.
///
/// `loc` is the data minimum rounded down to two significant digits and
/// `(c1, c2)` the least-squares line of `H − loc` against time in years.
/// The shape comes from inverting the moment ratio of the detrended
/// excess `Z = (H − loc)/(c1 + c2 t)`, with both moments smoothed over the
/// year phase. With `k′ = k / k_ratio`, `E[Z^{k′}] = l^{k′} Γ(1 + k′/k)`,
/// which gives the seasonal scale `l`.
pub fn fit_weibull(series: &MetOceanSeries, opts: &CalibrationOptions) -> Result<WeibullFit> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InsufficientData { got: n, min: 3 });
    }
    let years: Vec<f64> = series.t().iter().map(|t| t / opts.year_hours).collect();
    if years[n - 1] - years[0] < 2.0 {
        return Err(Error::InvalidSeries("series spans less than two years".into()));
    }
    let hs = series.hs();
    let loc = floor_two_significant(hs.iter().copied().fold(f64::INFINITY, f64::min));
    let excess: Vec<f64> = hs.iter().map(|h| h - loc).collect();

    let (c1, c2, c2_std_error) = linear_trend(&years, &excess);
    if let Some(i) = years.iter().position(|&y| !(c1 + c2 * y > 0.0)) {
        return Err(Error::NonPositiveTrend(alloc::format!(
            "c1 + c2·t = {} at t = {} h",
            c1 + c2 * years[i],
            series.t()[i]
        )));
    }
    let z: Vec<f64> = excess.iter().zip(&years).map(|(e, y)| e / (c1 + c2 * y)).collect();
    let phases: Vec<f64> = series.t().iter().map(|&t| crate::math::rem_euclid(t / opts.year_hours, 1.0)).collect();

    let m1 = PeriodicSmoother::fit(&phases, &z, opts.n_harmonics)?;
    let z2: Vec<f64> = z.iter().map(|v| v * v).collect();
    let m2 = PeriodicSmoother::fit(&phases, &z2, opts.n_harmonics)?;

    let grid: Vec<f64> = (0..PHASE_GRID).map(|g| g as f64 / PHASE_GRID as f64).collect();
    let mut moment_ratios = Vec::with_capacity(PHASE_GRID);
    let mut k_raw = Vec::with_capacity(PHASE_GRID);
    for &p in &grid {
        let (a, b) = (m1.eval(p), m2.eval(p));
        let ratio = a * a / b;
        if !(a > 0.0 && b > 0.0) || !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::MomentRatioInfeasible { ratio });
        }
        moment_ratios.push(ratio);
        k_raw.push(invert_moment_ratio(ratio)?);
    }
    let k_series = project_fourier(&k_raw, opts.n_harmonics);
    let k_ratio = k_series.mean;
    let k_norm = k_series.scaled(1.0 / k_ratio);
    let g1 = lgamma(1.0 + 1.0 / k_ratio);

    let w: Vec<f64> = z.iter().zip(&phases).map(|(zi, &p)| pow(*zi, k_norm.eval(p)) / exp(g1)).collect();
    let lk = PeriodicSmoother::fit(&phases, &w, opts.n_harmonics)?;
    let mut log_l = Vec::with_capacity(PHASE_GRID);
    for &p in &grid {
        let v = lk.eval(p);
        if !(v > 0.0) {
            return Err(Error::NonPositiveTrend(alloc::format!("seasonal scale estimate {v} at phase {p}")));
        }
        log_l.push(ln(v) / k_norm.eval(p));
    }
    Ok(WeibullFit {
        loc,
        c1,
        c2,
        c2_std_error,
        k_ratio,
        k_norm,
        log_l: project_fourier(&log_l, opts.n_harmonics),
        moment_ratios,
    })
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, se(b))`.
fn linear_trend(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi) * (yi - a - b * xi)).sum();
    let se = sqrt(rss / (n - 2.0) / sxx);
    (a, b, se)
}
