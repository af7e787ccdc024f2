//! Planar convex geometry: support functions, half-plane intersections and
//! the convex-hull contour construction.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math::{cos, sin, TAU};

/// Relative tolerance for geometric predicates.
pub const GEOMETRY_TOL: f64 = 1e-9;
/// Relative tolerance when testing a grid for properness.
pub const PROPERNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// A direction on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    angle: f64,
    cos: f64,
    sin: f64,
}

impl UnitVector {
    /// Direction at `angle` radians; the angle is reduced into `[0, 2π)`.
    pub fn from_angle(angle: f64) -> Self {
        let angle = crate::math::rem_euclid(angle, TAU);
        Self { angle, cos: cos(angle), sin: sin(angle) }
    }

    /// `i`-th of `n` uniformly spaced directions, angle `2πi/n`. Multiples of
    /// a quarter turn get exact components.
    pub fn on_grid(i: usize, n: usize) -> Self {
        let i = i % n;
        let angle = TAU * i as f64 / n as f64;
        if (4 * i) % n == 0 {
            let (c, s) = match 4 * i / n {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            };
            return Self { angle, cos: c, sin: s };
        }
        Self { angle, cos: cos(angle), sin: sin(angle) }
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn from_vector(v: Point) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("cannot normalize {v:?}")));
        }
        Ok(Self::from_angle(libm::atan2(v.y, v.x)))
    }

    #[inline]
    pub fn angle(self) -> f64 {
        self.angle
    }

    #[inline]
    pub fn as_point(self) -> Point {
        Point::new(self.cos, self.sin)
    }

    /// `⟨u, v⟩`.
    #[inline]
    pub fn project(self, v: Point) -> f64 {
        self.cos * v.x + self.sin * v.y
    }

    pub fn opposite(self) -> Self {
        Self { angle: crate::math::rem_euclid(self.angle + core::f64::consts::PI, TAU), cos: -self.cos, sin: -self.sin }
    }
}

/// The half-plane `{v : ⟨u, v⟩ ≤ c}`. Its closed complement `{⟨u, v⟩ ≥ c}` is
/// the exceedence region of a direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpace {
    pub normal: UnitVector,
    pub threshold: f64,
}

impl HalfSpace {
    pub fn new(normal: UnitVector, threshold: f64) -> Self {
        Self { normal, threshold }
    }

    /// Membership in `Π⁻(u, c)`.
    #[inline]
    pub fn contains(&self, v: Point) -> bool {
        self.normal.project(v) <= self.threshold
    }

    /// Membership in the closed complement `Π⁺(u, c)`.
    #[inline]
    pub fn is_exceeded_by(&self, v: Point) -> bool {
        self.normal.project(v) >= self.threshold
    }

    /// Signed distance past the boundary; positive outside.
    #[inline]
    pub fn excess(&self, v: Point) -> f64 {
        self.normal.project(v) - self.threshold
    }
}

/// Thresholds `C(u_i)` sampled on the uniform grid `u_i = 2πi/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGrid {
    thresholds: Vec<f64>,
}

impl SupportGrid {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.len() < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 directions, got {}", thresholds.len())));
        }
        if let Some(i) = thresholds.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidGrid(format!("threshold {i} is not finite")));
        }
        Ok(Self { thresholds })
    }

    pub fn from_fn(n_dirs: usize, mut f: impl FnMut(UnitVector) -> f64) -> Result<Self> {
        Self::new((0..n_dirs).map(|i| f(UnitVector::on_grid(i, n_dirs))).collect())
    }

    /// Constant threshold: the support function of a disc of radius `r`.
    pub fn constant(n_dirs: usize, r: f64) -> Result<Self> {
        Self::from_fn(n_dirs, |_| r)
    }

    #[inline]
    pub fn n_dirs(&self) -> usize {
        self.thresholds.len()
    }

    #[inline]
    pub fn direction(&self, i: usize) -> UnitVector {
        UnitVector::on_grid(i, self.n_dirs())
    }

    #[inline]
    pub fn threshold(&self, i: usize) -> f64 {
        self.thresholds[i]
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn into_thresholds(self) -> Vec<f64> {
        self.thresholds
    }

    pub fn iter(&self) -> impl Iterator<Item = (UnitVector, f64)> + '_ {
        let n = self.n_dirs();
        self.thresholds.iter().enumerate().map(move |(i, &c)| (UnitVector::on_grid(i, n), c))
    }

    pub fn half_spaces(&self) -> impl Iterator<Item = HalfSpace> + '_ {
        self.iter().map(|(u, c)| HalfSpace::new(u, c))
    }

    /// Magnitude used to make tolerances relative: `max |C|`, or 1 for an all-zero grid.
    pub fn scale(&self) -> f64 {
        let s = self.thresholds.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Periodic linear interpolation of `C` at an arbitrary angle.
    pub fn value_at(&self, angle: f64) -> f64 {
        let n = self.n_dirs();
        let pos = crate::math::rem_euclid(angle, TAU) / TAU * n as f64;
        let lo = libm::floor(pos);
        let frac = pos - lo;
        let i = (lo as usize) % n;
        let j = (i + 1) % n;
        self.thresholds[i] * (1.0 - frac) + self.thresholds[j] * frac
    }
}

/// A closed convex polygon with counter-clockwise vertices.
///
/// One or two vertices are allowed and describe a point or a segment; such
/// polygons report [`Polygon::is_degenerate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates convexity, orientation and distinct consecutive vertices.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::DegeneratePolygon);
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let scale = coordinate_scale(&vertices);
        let n = vertices.len();
        if n >= 2 {
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                if (b - a).norm() <= 1e-12 * scale {
                    return Err(Error::InvalidPolygon(format!("vertices {i} and {} coincide", (i + 1) % n)));
                }
            }
        }
        if n >= 3 {
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                if (b - a).cross(c - b) < -GEOMETRY_TOL * scale * scale {
                    return Err(Error::InvalidPolygon(format!("turn at vertex {} is clockwise", (i + 1) % n)));
                }
            }
        }
        Ok(Self { vertices })
    }

    /// Convex hull of an arbitrary point set, collinear and duplicate points removed.
    pub fn hull_of(points: &[Point]) -> Result<Self> {
        let hull = convex_hull(points);
        if hull.is_empty() {
            return Err(Error::DegeneratePolygon);
        }
        Ok(Self { vertices: dedupe_cyclic(hull) })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// True for points, segments and slivers of vanishing area.
    pub fn is_degenerate(&self) -> bool {
        let s = self.scale();
        self.vertices.len() < 3 || self.area() <= 1e-12 * s * s
    }

    /// Largest absolute coordinate, at least `f64::MIN_POSITIVE`.
    pub fn scale(&self) -> f64 {
        coordinate_scale(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum::<f64>()
    }

    /// `B(𝓑, u) = max_v ⟨u, v⟩`, attained at a vertex.
    pub fn support(&self, u: UnitVector) -> f64 {
        self.vertices.iter().map(|&v| u.project(v)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn translated(&self, by: Point) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| v + by).collect() }
    }

    /// Scales about the origin by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| v * s).collect() }
    }

    /// Closed-set membership with a relative tolerance.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.vertices.len();
        let s = self.scale().max(p.x.abs()).max(p.y.abs());
        match n {
            1 => (p - self.vertices[0]).norm() <= GEOMETRY_TOL * s,
            2 => {
                let (a, b) = (self.vertices[0], self.vertices[1]);
                let ab = b - a;
                let t = (p - a).dot(ab) / ab.dot(ab);
                (0.0..=1.0).contains(&t) && (a + ab * t - p).norm() <= GEOMETRY_TOL * s
            }
            _ => (0..n).all(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                (b - a).cross(p - a) >= -GEOMETRY_TOL * s * s
            }),
        }
    }
}

/// `B(poly, u)`.
pub fn support_function(poly: &Polygon, u: UnitVector) -> f64 {
    poly.support(u)
}

/// Support values of `poly` at every direction of `grid`.
pub fn support_profile(poly: &Polygon, grid: &SupportGrid) -> Vec<f64> {
    grid.iter().map(|(u, _)| poly.support(u)).collect()
}

/// Intersection `∩ᵢ Π⁻(uᵢ, C(uᵢ))` of all grid half-planes.
pub fn halfspace_intersection(grid: &SupportGrid) -> Result<Polygon> {
    let n = grid.n_dirs();
    let scale = grid.scale();
    let eps = 1e-12 * scale;
    // Every point of the intersection lies within S / cos(π/n) of the origin.
    let r = 2.0 * scale / cos(core::f64::consts::PI / n as f64) + 1.0;
    let mut poly = alloc::vec![Point::new(-r, -r), Point::new(r, -r), Point::new(r, r), Point::new(-r, r)];
    let mut next = Vec::with_capacity(n + 4);
    for h in grid.half_spaces() {
        clip(&poly, &h, eps, &mut next);
        core::mem::swap(&mut poly, &mut next);
        if poly.is_empty() {
            return Err(Error::InfeasibleThresholds);
        }
    }
    // The clip keeps points up to eps outside; anything further means the
    // constraints do not have a common point.
    let slack = 1e-9 * scale;
    if poly.iter().any(|&p| grid.half_spaces().any(|h| h.excess(p) > slack)) {
        return Err(Error::InfeasibleThresholds);
    }
    Polygon::hull_of(&poly)
}

/// Sutherland–Hodgman step against one half-plane.
fn clip(poly: &[Point], h: &HalfSpace, eps: f64, out: &mut Vec<Point>) {
    out.clear();
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let ea = h.excess(a);
        let eb = h.excess(b);
        let a_in = ea <= eps;
        let b_in = eb <= eps;
        if a_in {
            out.push(a);
        }
        if a_in != b_in {
            let t = ea / (ea - eb);
            if t.is_finite() {
                out.push(a + (b - a) * t);
            }
        }
    }
}

/// Points `x + uᵢ (C(uᵢ) − ⟨uᵢ, x⟩)⁺` whose convex hull forms a valid contour.
pub fn hull_points(grid: &SupportGrid, center: Point) -> Vec<Point> {
    grid.iter().map(|(u, c)| center + u.as_point() * (c - u.project(center)).max(0.0)).collect()
}

/// Indices of directions where the `(·)⁺` clamp is active.
pub fn clamped_directions(grid: &SupportGrid, center: Point) -> Vec<usize> {
    grid.iter().enumerate().filter(|(_, (u, c))| c - u.project(center) <= 0.0).map(|(i, _)| i).collect()
}

/// Closed convex hull of [`hull_points`].
pub fn hull_contour(grid: &SupportGrid, center: Point) -> Result<Polygon> {
    if clamped_directions(grid, center).len() == grid.n_dirs() {
        return Err(Error::DegenerateHull);
    }
    let pts = hull_points(grid, center);
    let poly = Polygon::hull_of(&pts)?;
    if poly.len() == 1 && (poly.vertices[0] - center).norm() <= 1e-12 * grid.scale() {
        return Err(Error::DegenerateHull);
    }
    Ok(poly)
}

/// Midpoint of the axis-direction thresholds,
/// `((C(0) − C(π))/2, (C(π/2) − C(3π/2))/2)`.
pub fn default_center(grid: &SupportGrid) -> Point {
    use core::f64::consts::{FRAC_PI_2, PI};
    Point::new(
        0.5 * (grid.value_at(0.0) - grid.value_at(PI)),
        0.5 * (grid.value_at(FRAC_PI_2) - grid.value_at(3.0 * FRAC_PI_2)),
    )
}

/// `B(poly, uᵢ) ≥ C(uᵢ) − tol` at every grid direction.
pub fn is_valid(poly: &Polygon, grid: &SupportGrid, tol: f64) -> bool {
    grid.iter().all(|(u, c)| poly.support(u) >= c - tol)
}

/// Largest shortfall `C(uᵢ) − B(poly, uᵢ)`; non-positive when valid.
pub fn max_shortfall(poly: &Polygon, grid: &SupportGrid) -> f64 {
    grid.iter().map(|(u, c)| c - poly.support(u)).fold(f64::NEG_INFINITY, f64::max)
}

/// Largest `|B(∩Π⁻, uᵢ) − C(uᵢ)|`: how far `C` is from being a support function.
pub fn properness_gap(grid: &SupportGrid) -> Result<f64> {
    let poly = halfspace_intersection(grid)?;
    Ok(grid.iter().map(|(u, c)| (poly.support(u) - c).abs()).fold(0.0, f64::max))
}

/// Whether `C` is, up to `tol`, the support function of its own half-plane intersection.
pub fn is_proper(grid: &SupportGrid, tol: f64) -> Result<bool> {
    Ok(properness_gap(grid)? <= tol)
}

fn coordinate_scale(points: &[Point]) -> f64 {
    points.iter().fold(f64::MIN_POSITIVE, |m, p| m.max(p.x.abs()).max(p.y.abs()))
}

/// Andrew's monotone chain, counter-clockwise, no collinear points.
fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Point> = if pass == 0 { &mut pts.iter() } else { &mut pts.iter().rev() };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Drops near-coincident neighbours (relative 1e-10), including last/first.
fn dedupe_cyclic(points: Vec<Point>) -> Vec<Point> {
    let tol = 1e-10 * coordinate_scale(&points);
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last().map_or(true, |&q| (p - q).norm() > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= tol {
        out.pop();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn square() -> Polygon {
        Polygon::new(vec![Point::new(-1.0, -1.0), Point::new(1.0, -1.0), Point::new(1.0, 1.0), Point::new(-1.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn support_of_square_and_triangle() {
        let sq = square();
        assert_eq!(sq.support(UnitVector::from_angle(0.0)), 1.0);
        assert!((sq.support(UnitVector::from_angle(FRAC_PI_4)) - SQRT_2).abs() < 1e-15);
        let tri = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 3.0)]).unwrap();
        assert!((tri.support(UnitVector::from_angle(FRAC_PI_2)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_polygon_is_degenerate_error() {
        assert_eq!(Polygon::new(vec![]).unwrap_err(), Error::DegeneratePolygon);
    }

    #[test]
    fn polygon_validation() {
        // Clockwise square.
        let cw = vec![Point::new(-1.0, -1.0), Point::new(-1.0, 1.0), Point::new(1.0, 1.0), Point::new(1.0, -1.0)];
        assert!(matches!(Polygon::new(cw), Err(Error::InvalidPolygon(_))));
        let dup = vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(Polygon::new(dup), Err(Error::InvalidPolygon(_))));
    }

    #[test]
    fn unit_vectors_on_quarter_turns_are_exact() {
        let u = UnitVector::on_grid(45, 180);
        assert_eq!(u.as_point(), Point::new(0.0, 1.0));
        let v = UnitVector::on_grid(17, 180).as_point();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((UnitVector::from_angle(-FRAC_PI_2).angle() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn grid_requires_three_finite_thresholds() {
        assert!(SupportGrid::new(vec![1.0, 1.0]).is_err());
        assert!(SupportGrid::new(vec![1.0, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn constant_grid_of_four_is_circumscribed_square() {
        let g = SupportGrid::constant(4, 2.0).unwrap();
        let p = halfspace_intersection(&g).unwrap();
        assert_eq!(p.len(), 4);
        for v in p.vertices() {
            assert!((v.x.abs() - 2.0).abs() < 1e-12 && (v.y.abs() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_grid_of_180_is_circumscribed_regular_polygon() {
        let g = SupportGrid::constant(180, 1.0).unwrap();
        let p = halfspace_intersection(&g).unwrap();
        for (u, c) in g.iter() {
            assert!((p.support(u) - c).abs() < 1e-9);
        }
        let rmax = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let want = 1.0 / cos(PI / 180.0);
        assert!((rmax - want).abs() < 1e-9, "{rmax} vs {want}");
        assert!((want - 1.000_152).abs() < 1e-6);
    }

    #[test]
    fn translated_disc_support_is_reproduced() {
        let c = Point::new(3.0, 4.0);
        let g = SupportGrid::from_fn(180, |u| u.project(c) + 1.0).unwrap();
        let p = halfspace_intersection(&g).unwrap();
        // Brute force over vertices.
        for (u, want) in g.iter() {
            let got = p.vertices().iter().map(|&v| u.project(v)).fold(f64::NEG_INFINITY, f64::max);
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_thresholds_rejected() {
        let g = SupportGrid::constant(12, -1.0).unwrap();
        assert_eq!(halfspace_intersection(&g).unwrap_err(), Error::InfeasibleThresholds);
    }

    #[test]
    fn point_support_collapses_to_point() {
        let v = Point::new(0.5, -2.0);
        let g = SupportGrid::from_fn(36, |u| u.project(v)).unwrap();
        let p = halfspace_intersection(&g).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.len(), 1);
        assert!((p.vertices()[0] - v).norm() < 1e-9);
    }

    #[test]
    fn hull_of_constant_grid_is_inscribed_polygon() {
        let g = SupportGrid::constant(36, 2.5).unwrap();
        let p = hull_contour(&g, Point::ORIGIN).unwrap();
        assert_eq!(p.len(), 36);
        for v in p.vertices() {
            assert!((v.norm() - 2.5).abs() < 1e-12);
        }
        for (u, c) in g.iter() {
            assert!((p.support(u) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn hull_matches_intersection_for_centred_disc() {
        let c = Point::new(3.0, 4.0);
        let g = SupportGrid::from_fn(180, |u| u.project(c) + 1.0).unwrap();
        let hull = hull_contour(&g, c).unwrap();
        let inter = halfspace_intersection(&g).unwrap();
        for (u, _) in g.iter() {
            assert!((hull.support(u) - inter.support(u)).abs() < 1e-6 * g.scale());
        }
        assert!((default_center(&g) - c).norm() < 1e-12);
    }

    #[test]
    fn hull_exceeds_dented_threshold() {
        let mut t = vec![1.0; 180];
        t[0] = 0.2;
        let g = SupportGrid::new(t).unwrap();
        let p = hull_contour(&g, Point::ORIGIN).unwrap();
        assert!(p.contains(Point::new(0.2, 0.0)));
        assert!(p.support(UnitVector::from_angle(0.0)) > 0.2 + 0.5);
        assert!(is_valid(&p, &g, 1e-9));
    }

    #[test]
    fn fully_clamped_hull_is_degenerate() {
        let g = SupportGrid::constant(8, -1.0).unwrap();
        assert_eq!(hull_contour(&g, Point::ORIGIN).unwrap_err(), Error::DegenerateHull);
    }

    #[test]
    fn validity_checks() {
        let g = SupportGrid::constant(90, 1.0).unwrap();
        let p = halfspace_intersection(&g).unwrap();
        assert!(is_valid(&p, &g, 1e-9 * g.scale()));
        let big = SupportGrid::constant(90, 2.0).unwrap();
        assert!(!is_valid(&square(), &big, 1e-9));
    }

    #[test]
    fn properness_examples() {
        let disc = SupportGrid::constant(180, 3.0).unwrap();
        assert!(is_proper(&disc, 1e-9 * disc.scale()).unwrap());
        let shifted = SupportGrid::from_fn(180, |u| u.project(Point::new(1.0, 1.0)) + 2.0).unwrap();
        assert!(is_proper(&shifted, 1e-9 * shifted.scale()).unwrap());
        // |cos θ| is the support function of the segment [-1, 1] × {0}.
        let seg = SupportGrid::from_fn(180, |u| u.as_point().x.abs()).unwrap();
        assert!(is_proper(&seg, 1e-9).unwrap());
        assert!(halfspace_intersection(&seg).unwrap().is_degenerate());
        let mut t = vec![1.0; 180];
        t[0] = 0.2;
        let dented = SupportGrid::new(t).unwrap();
        assert!(!is_proper(&dented, 1e-6).unwrap());
        let inter = halfspace_intersection(&dented).unwrap();
        let s1 = inter.support(dented.direction(1));
        assert!((s1 - 0.234).abs() < 0.01, "{s1}");
    }

    #[test]
    fn value_at_interpolates_periodically() {
        let g = SupportGrid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((g.value_at(FRAC_PI_4) - 0.5).abs() < 1e-12);
        assert!((g.value_at(2.0 * PI - FRAC_PI_4) - 1.5).abs() < 1e-12);
    }
}
