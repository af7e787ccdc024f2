//! Closed forms for the i.i.d. Gaussian and standardized Ornstein–Uhlenbeck
//! models.
//!
//! For the OU process `dV = −θV dt + √(2θ) dW` started at `V₀ = 0`, the mean
//! time to reach level `b ≥ 0` is
//!
//! ```text
//! T(b) = √π/(θ√2) ∫₀ᵇ (1 + erf(t/√2)) e^{t²/2} dt
//!      = 1/(2θ) Σ_{i≥1} (√2 b)^i Γ(i/2) / i!
//! ```

use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::math::{erfc, exp, ln, ln_norm_sf, norm_upper_quantile, sqrt};
use crate::quadrature::integrate;

/// Equivalent targets of an i.i.d. model with per-step exceedence probability `p_e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidEquivalence {
    pub t_r: f64,
    pub t_s: f64,
    pub q_s: f64,
}

pub fn iid_equivalences(p_e: f64, dt: f64) -> Result<IidEquivalence> {
    check_probability(p_e)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt}")));
    }
    let t = dt / p_e;
    Ok(IidEquivalence { t_r: t, t_s: t, q_s: exp(libm::log1p(-p_e) / p_e) })
}

/// `Φ⁻¹(1 − p_e)`, the classical radius for a standard normal process.
pub fn gaussian_ce(p_e: f64) -> Result<f64> {
    check_probability(p_e)?;
    Ok(norm_upper_quantile(p_e))
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("probability must be in (0, 1), got {p}")))
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("theta must be positive, got {theta}")))
    }
}

/// `ln ∫₀ᵇ (1 + erf(t/√2)) e^{t²/2} dt` for `b > 0`, integrated with the
/// `e^{b²/2}` factor pulled out so the integrand stays bounded by 2.
fn ln_exit_integral(b: f64) -> f64 {
    let half_b2 = 0.5 * b * b;
    let scaled = integrate(|t| erfc(-t / SQRT_2) * exp(0.5 * t * t - half_b2), 0.0, b, 0.0, 1e-14, 4000);
    ln(scaled) + half_b2
}

/// `ln T(b)` for `b > 0` via the integral form.
pub fn ou_ln_mean_exit_time(b: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(b > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("log exit time needs b > 0, got {b}")));
    }
    Ok(ln(sqrt(PI) / (theta * SQRT_2)) + ln_exit_integral(b))
}

/// Mean exit time by adaptive quadrature of the integral form.
pub fn ou_mean_exit_time_integral(b: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    if b > 0.0 {
        return Ok(exp(ou_ln_mean_exit_time(b, theta)?));
    }
    let v = integrate(|t| erfc(-t / SQRT_2) * exp(0.5 * t * t), 0.0, b, 0.0, 1e-14, 4000);
    Ok(sqrt(PI) / (theta * SQRT_2) * v)
}

/// Mean exit time by the power series, summed until the tail is below one
/// ulp of the partial sum. Negative `b` gives the analytic continuation.
pub fn ou_mean_exit_time_series(b: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let x = SQRT_2 * b;
    let x2 = x * x;
    // Terms i and i + 1; a_{i+2} = a_i · x² (i/2) / ((i+1)(i+2)).
    let mut odd = x * sqrt(PI);
    let mut even = 0.5 * x2;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let add = |v: f64, sum: &mut f64, comp: &mut f64| {
        let t = *sum + v;
        if sum.abs() >= v.abs() {
            *comp += (*sum - t) + v;
        } else {
            *comp += (v - t) + *sum;
        }
        *sum = t;
    };
    let mut i = 1.0_f64;
    loop {
        add(odd, &mut sum, &mut comp);
        add(even, &mut sum, &mut comp);
        let total = sum + comp;
        // Past the peak the ratio of successive terms is < 1/2, so the tail
        // is bounded by twice the next pair.
        if i > x2 && (odd.abs() + even.abs()) <= 1e-17 * total.abs() {
            break;
        }
        if i > 10_000.0 {
            break;
        }
        odd *= x2 * (0.5 * i) / ((i + 1.0) * (i + 2.0));
        even *= x2 * (0.5 * (i + 1.0)) / ((i + 2.0) * (i + 3.0));
        i += 2.0;
    }
    Ok((sum + comp) / (2.0 * theta))
}

/// Mean time for the standardized OU process started at 0 to reach `b`.
/// Quadrature for `b ≥ 0`, series for `b < 0`.
pub fn ou_mean_exit_time(b: f64, theta: f64) -> Result<f64> {
    if b >= 0.0 {
        ou_mean_exit_time_integral(b, theta)
    } else {
        ou_mean_exit_time_series(b, theta)
    }
}

/// `√(2π) e^{b²/2} / (θ b)`, the large-`b` asymptote of [`ou_mean_exit_time`].
pub fn ou_mean_exit_time_asymptotic(b: f64, theta: f64) -> f64 {
    sqrt(2.0 * PI) * exp(0.5 * b * b) / (theta * b)
}

/// Level `b ≥ 0` whose mean exit time is `t_r`, by bisection on `ln T`.
pub fn ou_ct_radius(t_r: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(t_r > 0.0) || !t_r.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("return period must be positive, got {t_r}")));
    }
    let target = ln(t_r);
    let f = |b: f64| ou_ln_mean_exit_time(b, theta).map(|v| v - target);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Return period at which the OU and i.i.d. radii coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Common radius `R` solving `Δt/(1 − Φ(R)) = T(R)`.
    pub radius: f64,
    /// `Δt/(1 − Φ(R))` at that radius (hours).
    pub t_r_exact: f64,
    /// `√(2πΔt/θ) e^{1/(2θΔt)}` (hours).
    pub t_r_approx: f64,
}

const CROSSING_MAX_R: f64 = 40.0;
const CROSSING_SCAN: usize = 800;

/// Solves the crossing equation on `R ∈ (0, 40]`.
///
/// The equation also has a root at small `R` (a few steps), where both
/// radii are near zero; the largest root is the one that separates the
/// long-return-period regimes, so the scan keeps the last sign change.
pub fn ou_iid_crossing(theta: f64, dt: f64) -> Result<Crossing> {
    check_theta(theta)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("time step must be positive, got {dt}")));
    }
    let g = |r: f64| -> Result<f64> { Ok(ln(dt) - ln_norm_sf(r) - ou_ln_mean_exit_time(r, theta)?) };
    let step = CROSSING_MAX_R / CROSSING_SCAN as f64;
    let mut bracket = None;
    let mut prev = g(step)?;
    for i in 2..=CROSSING_SCAN {
        let r = i as f64 * step;
        let cur = g(r)?;
        if (prev < 0.0) != (cur < 0.0) {
            bracket = Some((r - step, r, prev < 0.0));
        }
        prev = cur;
    }
    let (mut lo, mut hi, rising) = bracket.ok_or(Error::NoCrossing)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid)? < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let radius = 0.5 * (lo + hi);
    Ok(Crossing { radius, t_r_exact: exp(ln(dt) - ln_norm_sf(radius)), t_r_approx: ou_iid_crossing_approx(theta, dt) })
}

/// `√(2πΔt/θ) e^{1/(2θΔt)}`.
pub fn ou_iid_crossing_approx(theta: f64, dt: f64) -> f64 {
    sqrt(2.0 * PI * dt / theta) * exp(1.0 / (2.0 * theta * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn equivalences() {
        let e = iid_equivalences(0.5, 1.0).unwrap();
        assert_eq!(e.t_r, 2.0);
        assert!((e.q_s - 0.25).abs() < 1e-15);
        let small = iid_equivalences(1e-9, 1.0).unwrap();
        assert!((small.q_s - exp(-1.0)).abs() < 1e-8);
        assert!(iid_equivalences(0.0, 1.0).is_err());
    }

    #[test]
    fn gaussian_radii() {
        assert_eq!(gaussian_ce(0.5).unwrap(), 0.0);
        assert!((gaussian_ce(0.05).unwrap() - 1.644_853_626_951_472_7).abs() < 1e-12);
        // mpmath: -ndtri(1.7123e-6)
        assert!((gaussian_ce(1.7123e-6).unwrap() - 4.643_557_876_9).abs() < 1e-8);
    }

    // mpmath reference values at 40 digits.
    #[test]
    fn exit_time_reference_values() {
        assert_eq!(ou_mean_exit_time(0.0, 1.0).unwrap(), 0.0);
        assert!(rel(ou_mean_exit_time(1.0, 1.0).unwrap(), 2.093_406_649_7) < 1e-10);
        assert!(rel(ou_mean_exit_time(6.0, 1.0).unwrap(), 28_267_502.87) < 1e-9);
        assert!(rel(ou_mean_exit_time(3.0, 0.5).unwrap(), 173.863_24) < 1e-6);
        assert!(rel(ou_mean_exit_time(-1.0, 1.0).unwrap(), -0.901_908_012_7) < 1e-9);
    }

    #[test]
    fn series_matches_integral() {
        for &theta in &[0.01, 1.0] {
            for i in 1..=60 {
                let b = i as f64 * 0.1;
                let a = ou_mean_exit_time_integral(b, theta).unwrap();
                let s = ou_mean_exit_time_series(b, theta).unwrap();
                assert!(rel(a, s) < 1e-10, "b = {b}: {a} vs {s}");
            }
        }
    }

    #[test]
    fn asymptote_ratio_at_five() {
        let r = ou_mean_exit_time(5.0, 1.0).unwrap() / ou_mean_exit_time_asymptotic(5.0, 1.0);
        assert!((r - 1.046_21).abs() < 1e-5);
    }

    #[test]
    fn radius_round_trip() {
        for &t in &[10.0, 1e3, 1e6] {
            let r = ou_ct_radius(t, 0.016).unwrap();
            assert!(rel(ou_mean_exit_time(r, 0.016).unwrap(), t) < 1e-10);
        }
    }

    #[test]
    fn radii_at_two_hundred_years() {
        let t = 200.0 * 8766.0;
        assert!((ou_ct_radius(t, 0.025).unwrap() - 4.748_917).abs() < 1e-5);
        assert!((ou_ct_radius(t, 0.01).unwrap() - 4.540_760).abs() < 1e-5);
    }

    #[test]
    fn crossing_at_theta_0016_dt_3() {
        let c = ou_iid_crossing(0.016, 3.0).unwrap();
        assert!((c.radius - 4.592_684).abs() < 1e-5, "{c:?}");
        assert!(rel(c.t_r_exact, 1_371_176.69) < 1e-6);
        assert!(rel(c.t_r_approx, 1_146_809.87) < 1e-8);
    }

    #[test]
    fn crossing_approx_limit() {
        let a = ou_iid_crossing_approx(1e6, 1.0);
        assert!(rel(a, sqrt(2.0 * PI / 1e6)) < 1e-6);
    }
}
