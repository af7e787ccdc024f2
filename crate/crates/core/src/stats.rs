//! Sample statistics and Kolmogorov–Smirnov tests.

use alloc::vec::Vec;

use core::f64::consts::PI;

use crate::math::{ceil, exp, sqrt};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Variance with divisor `n`.
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Sample autocorrelation at `lag`.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return f64::NAN;
    }
    let m = mean(xs);
    let den: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    let num: f64 = xs.windows(lag + 1).map(|w| (w[0] - m) * (w[lag] - m)).sum();
    num / den
}

/// Pearson correlation of two equally long samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / sqrt(saa * sbb)
}

/// 1-based index of the lower `q`-quantile among `n` sorted values,
/// `ceil(q·n)` clamped to `[1, n]`.
pub fn lower_quantile_rank(n: usize, q: f64) -> usize {
    let r = ceil(q * n as f64 - 1e-12 * n as f64);
    (r.max(1.0) as usize).min(n)
}

/// Lower `q`-quantile of ascending `sorted`.
pub fn lower_quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    sorted[lower_quantile_rank(sorted.len(), q) - 1]
}

/// Lower `q`-quantile of an unsorted sample.
pub fn lower_quantile(xs: &[f64], q: f64) -> f64 {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    lower_quantile_sorted(&v, q)
}

/// Kolmogorov distribution tail `P(K > x)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // Dual series converges fast for small x.
        let mut cdf = 0.0;
        for j in 1..=20 {
            let a = (2 * j - 1) as f64;
            cdf += exp(-a * a * PI * PI / (8.0 * x * x));
        }
        return 1.0 - sqrt(2.0 * PI) / x * cdf;
    }
    let mut sf = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = exp(-2.0 * jf * jf * x * x);
        sf += if j % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sf).clamp(0.0, 1.0)
}

/// Result of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    /// Effective sample size, `n` or `n·m/(n+m)`.
    pub n_eff: f64,
    pub p_value: f64,
}

impl KsTest {
    fn new(statistic: f64, n_eff: f64) -> Self {
        let s = sqrt(n_eff);
        let p_value = kolmogorov_sf((s + 0.12 + 0.11 / s) * statistic);
        Self { statistic, n_eff, p_value }
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// One-sample test of `xs` against a continuous `cdf`.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> KsTest {
    let mut v: Vec<f64> = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    KsTest::new(d, n)
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    KsTest::new(d, n * m / (n + m))
}
