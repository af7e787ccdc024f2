use rand_distr::{Distribution, StandardNormal};

use super::{path_rng, PathRng, PathSample, PathSimulator, TimeGrid};
use crate::geometry::Point;

/// Independent standard normal states on steps of length `dt`.
///
/// In two dimensions both components are independent, so the law is
/// rotationally symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IidGaussian {
    dt: f64,
    dimension: usize,
}

impl IidGaussian {
    pub fn scalar(dt: f64) -> Self {
        Self { dt, dimension: 1 }
    }

    pub fn planar(dt: f64) -> Self {
        Self { dt, dimension: 2 }
    }
}

pub struct IidGaussianPath {
    rng: PathRng,
    planar: bool,
}

impl Iterator for IidGaussianPath {
    type Item = Point;

    #[inline]
    fn next(&mut self) -> Option<Point> {
        let x: f64 = StandardNormal.sample(&mut self.rng);
        let y: f64 = if self.planar { StandardNormal.sample(&mut self.rng) } else { 0.0 };
        Some(Point::new(x, y))
    }
}

impl PathSimulator for IidGaussian {
    type Path<'a> = IidGaussianPath;

    fn dt(&self) -> f64 {
        self.dt
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn is_stationary(&self) -> bool {
        true
    }

    fn supports_exact_marginal(&self) -> bool {
        true
    }

    fn max_steps(&self) -> Option<usize> {
        None
    }

    fn path(&self, seed: u64, stream: u64) -> IidGaussianPath {
        IidGaussianPath { rng: path_rng(seed, stream), planar: self.dimension == 2 }
    }
}

/// Scalar i.i.d. standard normal path on `grid`, embedded as `(v, 0)`.
pub fn simulate_iid_gaussian(grid: &TimeGrid, seed: u64) -> PathSample {
    let values = IidGaussian::scalar(grid.dt()).path(seed, 0).take(grid.n_steps()).collect();
    PathSample { grid: *grid, values }
}
