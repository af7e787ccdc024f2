//! Penalized regression smoothers with the penalty chosen by generalized
//! cross-validation, and additive-model backfitting.
//!
//! Design matrices are stored as fixed-width sparse rows. Everything the GCV
//! search needs (`XᵀX`, `Xᵀy`, `yᵀy`) is a sufficient statistic, so each
//! candidate penalty costs one small Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::math::{cos, pow, sin, TAU};
use crate::process::{FourierSeries, PiecewiseLinear};

/// Penalty multipliers tried, relative to `tr(XᵀX)/tr(P)`.
const LOG10_LAMBDA_MIN: f64 = -10.0;
const LOG10_LAMBDA_MAX: f64 = 4.0;
const LAMBDA_STEPS: usize = 57;

/// Basis evaluated on a fixed set of observations.
#[derive(Debug, Clone)]
pub struct Design {
    dim: usize,
    width: usize,
    idx: Vec<u32>,
    val: Vec<f64>,
    gram: SquareMatrix,
    penalty: SquareMatrix,
}

impl Design {
    fn from_rows(
        dim: usize,
        width: usize,
        n: usize,
        penalty: SquareMatrix,
        mut row: impl FnMut(usize, &mut [u32], &mut [f64]),
    ) -> Self {
        let mut idx = vec![0u32; n * width];
        let mut val = vec![0.0; n * width];
        let mut gram = SquareMatrix::zeros(dim);
        for i in 0..n {
            let (ri, rv) = (&mut idx[i * width..(i + 1) * width], &mut val[i * width..(i + 1) * width]);
            row(i, ri, rv);
            for a in 0..width {
                for b in 0..width {
                    gram.add(ri[a] as usize, ri[b] as usize, rv[a] * rv[b]);
                }
            }
        }
        Self { dim, width, idx, val, gram, penalty }
    }

    /// Fourier basis `1, cos 2πjφ, sin 2πjφ` (j ≤ `n_harm`) at phases in `[0, 1)`,
    /// penalizing harmonic `j` by `j⁴`.
    pub fn fourier(phases: &[f64], n_harm: usize) -> Self {
        let dim = 1 + 2 * n_harm;
        let mut penalty = SquareMatrix::zeros(dim);
        for j in 1..=n_harm {
            let w = pow(j as f64, 4.0);
            penalty.set(2 * j - 1, 2 * j - 1, w);
            penalty.set(2 * j, 2 * j, w);
        }
        Self::from_rows(dim, dim, phases.len(), penalty, |i, ri, rv| {
            ri[0] = 0;
            rv[0] = 1.0;
            for j in 1..=n_harm {
                let a = TAU * j as f64 * phases[i];
                ri[2 * j - 1] = (2 * j - 1) as u32;
                rv[2 * j - 1] = cos(a);
                ri[2 * j] = (2 * j) as u32;
                rv[2 * j] = sin(a);
            }
        })
    }

    /// Hat-function basis on `knots` (flat outside), penalizing squared
    /// second differences of the coefficients.
    pub fn hat(xs: &[f64], knots: &[f64]) -> Self {
        let dim = knots.len();
        let mut penalty = SquareMatrix::zeros(dim);
        for j in 1..dim.saturating_sub(1) {
            let d = [(j - 1, 1.0), (j, -2.0), (j + 1, 1.0)];
            for &(a, va) in &d {
                for &(b, vb) in &d {
                    penalty.add(a, b, va * vb);
                }
            }
        }
        Self::from_rows(dim, 2, xs.len(), penalty, |i, ri, rv| {
            let x = xs[i];
            let n = knots.len();
            if n == 1 || x <= knots[0] {
                ri.copy_from_slice(&[0, 0]);
                rv.copy_from_slice(&[1.0, 0.0]);
            } else if x >= knots[n - 1] {
                ri.copy_from_slice(&[(n - 1) as u32, (n - 1) as u32]);
                rv.copy_from_slice(&[1.0, 0.0]);
            } else {
                let hi = knots.partition_point(|&k| k <= x);
                let lo = hi - 1;
                let w = (x - knots[lo]) / (knots[hi] - knots[lo]);
                ri.copy_from_slice(&[lo as u32, hi as u32]);
                rv.copy_from_slice(&[1.0 - w, w]);
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_obs(&self) -> usize {
        self.idx.len() / self.width
    }

    /// `X β`.
    pub fn fitted(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.n_obs())
            .map(|i| {
                let r = i * self.width..(i + 1) * self.width;
                self.idx[r.clone()].iter().zip(&self.val[r]).map(|(&j, v)| beta[j as usize] * v).sum()
            })
            .collect()
    }

    fn xty(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, yi) in y.iter().enumerate() {
            let r = i * self.width..(i + 1) * self.width;
            for (&j, v) in self.idx[r.clone()].iter().zip(&self.val[r]) {
                out[j as usize] += v * yi;
            }
        }
        out
    }

    /// Penalized least squares with the GCV-optimal penalty.
    pub fn fit(&self, y: &[f64]) -> Result<PenalizedFit> {
        if y.len() != self.n_obs() {
            return Err(Error::InvalidParameter("response length does not match the design".into()));
        }
        let n = y.len() as f64;
        let xty = self.xty(y);
        let yty: f64 = y.iter().map(|v| v * v).sum();
        let p_trace = self.penalty.trace();
        let unit = if p_trace > 0.0 { self.gram.trace() / p_trace } else { 0.0 };
        let mut best: Option<PenalizedFit> = None;
        for s in 0..LAMBDA_STEPS {
            let log10 = LOG10_LAMBDA_MIN + (LOG10_LAMBDA_MAX - LOG10_LAMBDA_MIN) * s as f64 / (LAMBDA_STEPS - 1) as f64;
            let lambda = unit * pow(10.0, log10);
            // A vanishing ridge keeps the flat tails of sparse hat bases solvable.
            let mut a = self.gram.plus_scaled(&self.penalty, lambda);
            let ridge = 1e-12 * self.gram.trace() / self.dim as f64;
            for j in 0..self.dim {
                a.add(j, j, ridge);
            }
            let Ok(chol) = a.cholesky() else { continue };
            let beta = chol.solve(&xty);
            let g_beta = self.gram.mul_vec(&beta);
            let rss = (yty - 2.0 * dot(&beta, &xty) + dot(&beta, &g_beta)).max(0.0);
            let edf = chol.trace_of_solve(&self.gram);
            let gcv = n * rss / ((n - edf) * (n - edf));
            if best.as_ref().map_or(true, |b| gcv < b.gcv) {
                best = Some(PenalizedFit { beta, lambda, edf, gcv });
            }
            if p_trace == 0.0 {
                break;
            }
        }
        best.ok_or(Error::Singular)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients of a penalized fit with its selection diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PenalizedFit {
    pub beta: Vec<f64>,
    pub lambda: f64,
    /// Effective degrees of freedom `tr(S)`.
    pub edf: f64,
    pub gcv: f64,
}

/// Periodic smoother in the year phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSmoother {
    pub series: FourierSeries,
    pub lambda: f64,
    pub edf: f64,
}

impl PeriodicSmoother {
    pub fn fit(phases: &[f64], y: &[f64], n_harm: usize) -> Result<Self> {
        Self::from_design(&Design::fourier(phases, n_harm), y)
    }

    fn from_design(design: &Design, y: &[f64]) -> Result<Self> {
        let f = design.fit(y)?;
        Ok(Self { series: fourier_from_beta(&f.beta), lambda: f.lambda, edf: f.edf })
    }

    pub fn eval(&self, phase: f64) -> f64 {
        self.series.eval(phase)
    }
}

fn fourier_from_beta(beta: &[f64]) -> FourierSeries {
    let h = (beta.len() - 1) / 2;
    FourierSeries {
        mean: beta[0],
        cos: (1..=h).map(|j| beta[2 * j - 1]).collect(),
        sin: (1..=h).map(|j| beta[2 * j]).collect(),
    }
}

/// Least-squares Fourier coefficients of samples `ys` at phases `g/G`.
pub fn project_fourier(ys: &[f64], n_harm: usize) -> FourierSeries {
    let g = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / g;
    let coef = |j: usize, f: fn(f64) -> f64| {
        2.0 / g * ys.iter().enumerate().map(|(i, y)| y * f(TAU * j as f64 * i as f64 / g)).sum::<f64>()
    };
    FourierSeries {
        mean,
        cos: (1..=n_harm).map(|j| coef(j, cos)).collect(),
        sin: (1..=n_harm).map(|j| coef(j, sin)).collect(),
    }
}

/// Strictly increasing knots at evenly spaced empirical quantiles of `xs`.
pub fn quantile_knots(xs: &[f64], n_knots: usize) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    let min_gap = 1e-6 * (hi - lo).max(1e-12);
    let mut knots: Vec<f64> = Vec::with_capacity(n_knots);
    for k in 0..n_knots.max(2) {
        let q = k as f64 / (n_knots.max(2) - 1) as f64;
        let x = v[((v.len() - 1) as f64 * q) as usize];
        if knots.last().map_or(true, |&last| x - last > min_gap) {
            knots.push(x);
        }
    }
    if knots.len() == 1 && hi > lo {
        knots.push(hi);
    }
    knots
}

/// Additive fit `y ≈ m(φ) + f(x)` with `f` centred to mean zero over the data.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveFit {
    pub periodic: PeriodicSmoother,
    pub smooth: PiecewiseLinear,
    pub smooth_lambda: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl AdditiveFit {
    pub fn eval(&self, phase: f64, x: f64) -> f64 {
        self.periodic.eval(phase) + self.smooth.eval(x)
    }
}

/// Backfitting of a periodic term in `phases` and a hat-basis term in `xs`.
pub fn backfit(phases: &[f64], xs: &[f64], y: &[f64], n_harm: usize, n_knots: usize) -> Result<AdditiveFit> {
    let knots = quantile_knots(xs, n_knots);
    let per = Design::fourier(phases, n_harm);
    let hat = Design::hat(xs, &knots);
    let n = y.len();
    let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let mut f_vals = vec![0.0; n];
    let mut m_vals = vec![0.0; n];
    let mut resid = vec![0.0; n];
    let mut periodic = None;
    let mut smooth = None;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 200 {
        iterations += 1;
        for i in 0..n {
            resid[i] = y[i] - f_vals[i];
        }
        let p = PeriodicSmoother::from_design(&per, &resid)?;
        let new_m = per.fitted(&coeffs_of(&p.series));
        for i in 0..n {
            resid[i] = y[i] - new_m[i];
        }
        let fit = hat.fit(&resid)?;
        let mut new_f = hat.fitted(&fit.beta);
        let centre = new_f.iter().sum::<f64>() / n as f64;
        new_f.iter_mut().for_each(|v| *v -= centre);
        let values: Vec<f64> = fit.beta.iter().map(|b| b - centre).collect();
        let mut p = p;
        p.series.mean += centre;
        let new_m: Vec<f64> = new_m.iter().map(|v| v + centre).collect();

        let change =
            new_m.iter().zip(&m_vals).chain(new_f.iter().zip(&f_vals)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        m_vals = new_m;
        f_vals = new_f;
        periodic = Some(p);
        smooth = Some((PiecewiseLinear::new(knots.clone(), values)?, fit.lambda));
        if change <= 1e-10 * scale {
            converged = true;
            break;
        }
    }
    let (smooth, smooth_lambda) = smooth.ok_or(Error::Singular)?;
    Ok(AdditiveFit { periodic: periodic.ok_or(Error::Singular)?, smooth, smooth_lambda, iterations, converged })
}

fn coeffs_of(s: &FourierSeries) -> Vec<f64> {
    let mut beta = vec![s.mean];
    for (c, sn) in s.cos.iter().zip(&s.sin) {
        beta.push(*c);
        beta.push(*sn);
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;

    #[test]
    fn fourier_fit_recovers_exact_signal() {
        let phases: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.618_033_988_7) % 1.0).collect();
        let y: Vec<f64> = phases.iter().map(|&p| 2.0 + 0.5 * cos(TAU * p) - 0.25 * sin(2.0 * TAU * p)).collect();
        let s = PeriodicSmoother::fit(&phases, &y, 3).unwrap();
        assert!((s.series.mean - 2.0).abs() < 1e-6);
        assert!((s.series.cos[0] - 0.5).abs() < 1e-6);
        assert!((s.series.sin[1] + 0.25).abs() < 1e-6);
    }

    #[test]
    fn hat_fit_reproduces_linear_functions() {
        let xs: Vec<f64> = (0..500).map(|i| i as f64 / 50.0).collect();
        let y: Vec<f64> = xs.iter().map(|x| 1.0 + 0.3 * x).collect();
        let knots = quantile_knots(&xs, 8);
        let f = Design::hat(&xs, &knots).fit(&y).unwrap();
        let fitted = Design::hat(&xs, &knots).fitted(&f.beta);
        for (a, b) in fitted.iter().zip(&y) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn projection_recovers_coefficients() {
        let ys: Vec<f64> = (0..360).map(|g| 1.0 + 0.1 * cos(TAU * g as f64 / 360.0)).collect();
        let f = project_fourier(&ys, 3);
        assert!((f.mean - 1.0).abs() < 1e-14);
        assert!((f.cos[0] - 0.1).abs() < 1e-14);
        assert!(f.cos[1].abs() < 1e-14 && f.sin[0].abs() < 1e-14);
    }

    #[test]
    fn backfitting_separates_terms() {
        let n = 5000;
        let phases: Vec<f64> = (0..n).map(|i| (i as f64 / 365.25) % 1.0).collect();
        let xs: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 1000) as f64 / 100.0 + phases[i]).collect();
        let y: Vec<f64> = (0..n).map(|i| 2.0 + 0.2 * cos(TAU * phases[i]) + 0.5 * ln(xs[i])).collect();
        let fit = backfit(&phases, &xs, &y, 2, 40).unwrap();
        assert!(fit.converged);
        let mean_f: f64 = xs.iter().map(|&x| fit.smooth.eval(x)).sum::<f64>() / n as f64;
        assert!(mean_f.abs() < 1e-9);
        let mse = (0..n).map(|i| fit.eval(phases[i], xs[i]) - y[i]).map(|e| e * e).sum::<f64>() / n as f64;
        assert!(mse < 1e-5, "{mse}");
    }
}
