//! Non-stationary joint model of wave period `P` and significant wave height `H`.
//!
//! `H_t` is three-parameter Weibull with location `loc`, scale
//! `λ_t = (c1 + c2·t) l_t` and shape `k_t`; `ln P_t | H_t = h` is normal with
//! mean `m(t) + f_μ(h)` and standard deviation `s(t) f_σ(h)`. Seasonal terms
//! are Fourier series in the year phase; height effects are piecewise linear.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[cfg(any(test, feature = "serde"))]
use super::DEFAULT_YEAR_HOURS;
use super::{path_rng, PathRng, PathSample, PathSimulator, TimeGrid};
use crate::error::{Error, Result};
use crate::geometry::{Point, UnitVector};
use crate::math::{cos, exp, ln, pow, sin, TAU};

/// `mean + Σⱼ cos[j−1]·cos(2πjφ) + sin[j−1]·sin(2πjφ)` for year phase `φ ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FourierSeries {
    pub mean: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub cos: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn constant(mean: f64) -> Self {
        Self { mean, cos: Vec::new(), sin: Vec::new() }
    }

    pub fn harmonics(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    /// Annual mean, i.e. `∫₀¹ f(φ) dφ`.
    pub fn annual_mean(&self) -> f64 {
        self.mean
    }

    pub fn eval(&self, phase: f64) -> f64 {
        let mut v = self.mean;
        for (j, c) in self.cos.iter().enumerate() {
            v += c * cos(TAU * (j + 1) as f64 * phase);
        }
        for (j, s) in self.sin.iter().enumerate() {
            v += s * sin(TAU * (j + 1) as f64 * phase);
        }
        v
    }

    pub fn scaled(&self, by: f64) -> Self {
        Self {
            mean: self.mean * by,
            cos: self.cos.iter().map(|c| c * by).collect(),
            sin: self.sin.iter().map(|s| s * by).collect(),
        }
    }

    fn check(&self, name: &str) -> Result<()> {
        let ok = self.mean.is_finite() && self.cos.iter().chain(&self.sin).all(|c| c.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name}: non-finite Fourier coefficient")))
        }
    }
}

/// Linear interpolation through `(knots[i], values[i])`, flat outside the knots.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RawPiecewise", into = "RawPiecewise"))]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiecewise {
    knots: Vec<f64>,
    values: Vec<f64>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawPiecewise> for PiecewiseLinear {
    type Error = Error;
    fn try_from(raw: RawPiecewise) -> Result<Self> {
        PiecewiseLinear::new(raw.knots, raw.values)
    }
}

#[cfg(feature = "serde")]
impl From<PiecewiseLinear> for RawPiecewise {
    fn from(p: PiecewiseLinear) -> Self {
        RawPiecewise { knots: p.knots, values: p.values }
    }
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "piecewise-linear function needs matching non-empty knots/values ({} vs {})",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("piecewise-linear function has non-finite entries".into()));
        }
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("knots must be strictly increasing".into()));
        }
        Ok(Self { knots, values })
    }

    pub fn constant(value: f64) -> Self {
        Self { knots: alloc::vec![0.0], values: alloc::vec![value] }
    }

    /// Samples `f` at the given knots.
    pub fn from_fn(knots: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = knots.iter().map(|&k| f(k)).collect();
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let n = k.len();
        if x <= k[0] {
            return self.values[0];
        }
        if x >= k[n - 1] {
            return self.values[n - 1];
        }
        // First knot strictly greater than x; 1 ≤ hi ≤ n − 1.
        let hi = k.partition_point(|&kn| kn <= x);
        let lo = hi - 1;
        let w = (x - k[lo]) / (k[hi] - k[lo]);
        self.values[lo] + w * (self.values[hi] - self.values[lo])
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self { knots: self.knots.clone(), values: self.values.iter().map(|v| v + by).collect() }
    }
}

/// How the linear trend in the Weibull scale is applied over a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum TrendMode {
    /// Trend frozen at its value at the end of the horizon, `c1 + c2·T`.
    FrozenEnd,
    /// The estimated time-varying trend `c1 + c2·t`.
    #[cfg_attr(feature = "serde", serde(rename = "true"))]
    TrueTrend,
    /// Trend frozen at the reference time, `c1`.
    FrozenStart,
}

impl TrendMode {
    pub const ALL: [TrendMode; 3] = [TrendMode::FrozenEnd, TrendMode::TrueTrend, TrendMode::FrozenStart];

    pub fn as_str(self) -> &'static str {
        match self {
            TrendMode::FrozenEnd => "frozen-end",
            TrendMode::TrueTrend => "true",
            TrendMode::FrozenStart => "frozen-start",
        }
    }
}

impl core::str::FromStr for TrendMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frozen-end" => Ok(TrendMode::FrozenEnd),
            "true" | "true-trend" => Ok(TrendMode::TrueTrend),
            "frozen-start" => Ok(TrendMode::FrozenStart),
            other => Err(Error::InvalidParameter(format!("unknown trend mode {other:?}"))),
        }
    }
}

#[cfg(feature = "serde")]
fn default_year_hours() -> f64 {
    DEFAULT_YEAR_HOURS
}

/// Parameters of the joint `(P, H)` model. Time `t = 0` is the calibration
/// reference; `c2` is per year.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SeaStateModel {
    #[cfg_attr(feature = "serde", serde(default = "default_year_hours"))]
    pub year_hours: f64,
    /// Weibull location θ (m).
    pub loc: f64,
    /// Trend intercept (m).
    pub c1: f64,
    /// Trend slope (m/year).
    pub c2: f64,
    /// `ln l` as a function of year phase.
    pub log_l: FourierSeries,
    /// Normalized shape `k′` with annual mean 1.
    pub k_norm: FourierSeries,
    /// `∫ k`, so that `k = k_ratio · k′`.
    pub k_ratio: f64,
    /// Seasonal mean of `ln P` (log-seconds).
    pub m: FourierSeries,
    /// Height effect on the mean of `ln P`.
    pub f_mu: PiecewiseLinear,
    /// `ln s` as a function of year phase.
    pub log_s: FourierSeries,
    /// `ln f_σ` as a function of height.
    pub log_f_sigma: PiecewiseLinear,
}

impl SeaStateModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.year_hours > 0.0) || !self.year_hours.is_finite() {
            return Err(Error::InvalidParameter(format!("year_hours must be positive, got {}", self.year_hours)));
        }
        for (name, v) in [("loc", self.loc), ("c1", self.c1), ("c2", self.c2), ("k_ratio", self.k_ratio)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
        }
        if !(self.k_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!("k_ratio must be positive, got {}", self.k_ratio)));
        }
        self.log_l.check("log_l")?;
        self.k_norm.check("k_norm")?;
        self.m.check("m")?;
        self.log_s.check("log_s")?;
        // k′ is periodic; checking a fine phase grid bounds it away from zero.
        for i in 0..1024 {
            let k = self.k_norm.eval(i as f64 / 1024.0);
            if !(k > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "shape k′ is non-positive at phase {}",
                    i as f64 / 1024.0
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn phase(&self, t_hours: f64) -> f64 {
        crate::math::rem_euclid(t_hours / self.year_hours, 1.0)
    }

    #[inline]
    pub fn years(&self, t_hours: f64) -> f64 {
        t_hours / self.year_hours
    }

    /// Seasonal scale factor `l_t`.
    pub fn l(&self, t_hours: f64) -> f64 {
        exp(self.log_l.eval(self.phase(t_hours)))
    }

    /// Weibull shape `k_t = k_ratio · k′_t`.
    pub fn k(&self, t_hours: f64) -> f64 {
        self.k_ratio * self.k_norm.eval(self.phase(t_hours))
    }

    /// Trend factor at `t_hours` under `mode`; `horizon_end` is the absolute
    /// time the frozen-end mode freezes at.
    pub fn trend(&self, t_hours: f64, mode: TrendMode, horizon_end: f64) -> f64 {
        match mode {
            TrendMode::FrozenEnd => self.c1 + self.c2 * self.years(horizon_end),
            TrendMode::TrueTrend => self.c1 + self.c2 * self.years(t_hours),
            TrendMode::FrozenStart => self.c1,
        }
    }

    /// Weibull scale `λ_t = (c1 + c2·t) l_t` under the true trend.
    pub fn scale(&self, t_hours: f64) -> f64 {
        self.trend(t_hours, TrendMode::TrueTrend, t_hours) * self.l(t_hours)
    }

    pub fn m(&self, t_hours: f64) -> f64 {
        self.m.eval(self.phase(t_hours))
    }

    pub fn s(&self, t_hours: f64) -> f64 {
        exp(self.log_s.eval(self.phase(t_hours)))
    }

    pub fn f_mu(&self, h: f64) -> f64 {
        self.f_mu.eval(h)
    }

    pub fn f_sigma(&self, h: f64) -> f64 {
        exp(self.log_f_sigma.eval(h))
    }

    /// Conditional mean of `ln P` given `H = h`.
    pub fn mu(&self, t_hours: f64, h: f64) -> f64 {
        self.m(t_hours) + self.f_mu(h)
    }

    /// Conditional standard deviation of `ln P` given `H = h`.
    pub fn sigma(&self, t_hours: f64, h: f64) -> f64 {
        self.s(t_hours) * self.f_sigma(h)
    }

    /// Weibull CDF of `H_t` under the true trend.
    pub fn height_cdf(&self, t_hours: f64, h: f64) -> f64 {
        if h <= self.loc {
            return 0.0;
        }
        let z = (h - self.loc) / self.scale(t_hours);
        -libm::expm1(-pow(z, self.k(t_hours)))
    }

    /// Weibull quantile of `H_t` under the true trend.
    pub fn height_quantile(&self, t_hours: f64, q: f64) -> f64 {
        if q <= 0.0 {
            return self.loc;
        }
        self.loc + self.scale(t_hours) * pow(-libm::log1p(-q), 1.0 / self.k(t_hours))
    }
}

#[derive(Debug, Clone, Copy)]
struct StepParams {
    scale: f64,
    inv_shape: f64,
    m: f64,
    s: f64,
}

/// Independent-step simulator of the sea-state model over a fixed grid.
///
/// States are `(P, H)`. Within a step, `H = loc + λ E^{1/k}` with
/// `E = −ln(1 − U)` (inverse CDF), then `ln P ~ N(μ(t, H), σ(t, H)²)`. Each
/// step consumes one uniform and one normal variate regardless of
/// parameters, so simulators that differ only in trend mode share random
/// numbers path by path.
#[derive(Debug, Clone)]
pub struct SeaStateSimulator {
    model: SeaStateModel,
    grid: TimeGrid,
    mode: TrendMode,
    steps: Vec<StepParams>,
}

impl SeaStateSimulator {
    pub fn new(model: SeaStateModel, grid: TimeGrid, mode: TrendMode) -> Result<Self> {
        model.validate()?;
        let end = grid.t0() + grid.horizon();
        let mut steps = Vec::with_capacity(grid.n_steps());
        for i in 0..grid.n_steps() {
            let t = grid.step_time(i);
            let scale = model.trend(t, mode, end) * model.l(t);
            if !(scale > 0.0) {
                return Err(Error::NonPositiveScale { t_hours: t });
            }
            steps.push(StepParams { scale, inv_shape: 1.0 / model.k(t), m: model.m(t), s: model.s(t) });
        }
        Ok(Self { model, grid, mode, steps })
    }

    pub fn model(&self) -> &SeaStateModel {
        &self.model
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn mode(&self) -> TrendMode {
        self.mode
    }

    /// Weibull scale used at step `i`.
    pub fn step_scale(&self, i: usize) -> f64 {
        self.steps[i].scale
    }
}

pub struct SeaStatePath<'a> {
    sim: &'a SeaStateSimulator,
    rng: PathRng,
    step: usize,
}

impl Iterator for SeaStatePath<'_> {
    type Item = Point;

    #[inline]
    fn next(&mut self) -> Option<Point> {
        let p = self.sim.steps.get(self.step)?;
        self.step += 1;
        let u: f64 = self.rng.random();
        let z: f64 = StandardNormal.sample(&mut self.rng);
        let e = -libm::log1p(-u);
        let h = if e > 0.0 { self.sim.model.loc + p.scale * exp(ln(e) * p.inv_shape) } else { self.sim.model.loc };
        let model = &self.sim.model;
        let log_p = p.m + model.f_mu.eval(h) + p.s * exp(model.log_f_sigma.eval(h)) * z;
        Some(Point::new(exp(log_p), h))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.sim.steps.len() - self.step;
        (left, Some(left))
    }
}

impl PathSimulator for SeaStateSimulator {
    type Path<'a> = SeaStatePath<'a>;

    fn dt(&self) -> f64 {
        self.grid.dt()
    }

    fn dimension(&self) -> usize {
        2
    }

    fn is_stationary(&self) -> bool {
        false
    }

    fn max_steps(&self) -> Option<usize> {
        Some(self.grid.n_steps())
    }

    fn path(&self, seed: u64, stream: u64) -> SeaStatePath<'_> {
        SeaStatePath { sim: self, rng: path_rng(seed, stream), step: 0 }
    }
}

/// One path of `(P, H)` on `grid`.
pub fn simulate_seastate(model: &SeaStateModel, grid: &TimeGrid, mode: TrendMode, seed: u64) -> Result<PathSample> {
    let sim = SeaStateSimulator::new(model.clone(), *grid, mode)?;
    Ok(PathSample { grid: *grid, values: sim.path(seed, 0).collect() })
}

/// Draws used by [`marginal_quantile_projection`] off the height axis.
pub const MARGINAL_DRAWS: usize = 10_000;
const MARGINAL_SEED: u64 = 0x6d61_7267_696e_616c;

/// `q`-quantile of `⟨u, V_t⟩` under the true trend. Exact along `u = (0, 1)`,
/// otherwise the empirical quantile of [`MARGINAL_DRAWS`] draws from a fixed
/// seed.
pub fn marginal_quantile_projection(model: &SeaStateModel, t_hours: f64, u: UnitVector, q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("quantile level must be in [0, 1), got {q}")));
    }
    model.validate()?;
    let axis = u.as_point();
    if axis.x.abs() < 1e-12 && axis.y > 0.0 {
        return Ok(model.height_quantile(t_hours, q));
    }
    let grid = TimeGrid::new(1.0, 1, t_hours)?;
    let sim = SeaStateSimulator::new(model.clone(), grid, TrendMode::TrueTrend)?;
    let mut draws: Vec<f64> = (0..MARGINAL_DRAWS as u64)
        .map(|stream| u.project(sim.path(MARGINAL_SEED, stream).next().unwrap_or_default()))
        .collect();
    draws.sort_by(f64::total_cmp);
    Ok(crate::stats::lower_quantile_sorted(&draws, q))
}
