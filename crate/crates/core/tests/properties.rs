use envcontour_core::calibration::{invert_moment_ratio, moment_ratio};
use envcontour_core::geometry::{
    halfspace_intersection, hull_contour, is_valid, Point, Polygon, SupportGrid, UnitVector,
};
use envcontour_core::hitting::{hitting_time, simulate_sup_samples, sup_projection};
use envcontour_core::process::{
    simulate_iid_gaussian, simulate_ou, IidGaussian, OrnsteinUhlenbeck, PathSimulator, TimeGrid,
};
use envcontour_core::stats::correlation;
use proptest::prelude::*;

fn feasible_grid() -> impl Strategy<Value = (SupportGrid, Point)> {
    (3usize..40, -4.0..4.0f64, -4.0..4.0f64, prop::collection::vec(0.2..3.0f64, 40)).prop_map(|(n, cx, cy, r)| {
        let c = Point::new(cx, cy);
        let grid = SupportGrid::from_fn(n, |u| {
            let i = (u.angle() / std::f64::consts::TAU * n as f64).round() as usize % n;
            u.project(c) + r[i]
        })
        .unwrap();
        (grid, c)
    })
}

/// All pairwise line intersections that satisfy every constraint, hulled.
fn brute_force_intersection(grid: &SupportGrid) -> Polygon {
    let tol = 1e-9 * grid.scale();
    let hs: Vec<_> = grid.half_spaces().collect();
    let mut pts = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let (a, b) = (hs[i].normal.as_point(), hs[j].normal.as_point());
            let det = a.cross(b);
            if det.abs() < 1e-12 {
                continue;
            }
            let p = Point::new(
                (hs[i].threshold * b.y - hs[j].threshold * a.y) / det,
                (a.x * hs[j].threshold - b.x * hs[i].threshold) / det,
            );
            if hs.iter().all(|h| h.excess(p) <= tol) {
                pts.push(p);
            }
        }
    }
    Polygon::hull_of(&pts).unwrap()
}

fn polygon() -> impl Strategy<Value = Polygon> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..30).prop_filter_map("needs area", |pts| {
        let pts: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Polygon::hull_of(&pts).ok().filter(|p| p.area() > 1e-3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intersection_matches_brute_force((grid, _) in feasible_grid(), angle in 0.0..std::f64::consts::TAU) {
        let fast = halfspace_intersection(&grid).unwrap();
        let slow = brute_force_intersection(&grid);
        let tol = 1e-8 * grid.scale();
        for (u, _) in grid.iter() {
            prop_assert!((fast.support(u) - slow.support(u)).abs() <= tol);
        }
        let u = UnitVector::from_angle(angle);
        prop_assert!((fast.support(u) - slow.support(u)).abs() <= tol);
    }

    #[test]
    fn intersection_never_exceeds_constraints((grid, _) in feasible_grid()) {
        let poly = halfspace_intersection(&grid).unwrap();
        let tol = 1e-9 * grid.scale();
        for (u, c) in grid.iter() {
            prop_assert!(poly.support(u) <= c + tol);
        }
    }

    #[test]
    fn hull_without_clamps_is_valid((grid, center) in feasible_grid()) {
        let hull = hull_contour(&grid, center).unwrap();
        prop_assert!(is_valid(&hull, &grid, 1e-9 * grid.scale()));
    }

    #[test]
    fn support_is_homogeneous_and_translation_covariant(
        poly in polygon(),
        s in 0.01..10.0f64,
        dx in -10.0..10.0f64,
        dy in -10.0..10.0f64,
        angle in 0.0..std::f64::consts::TAU,
    ) {
        let u = UnitVector::from_angle(angle);
        let base = poly.support(u);
        prop_assert!((poly.scaled(s).support(u) - s * base).abs() <= 1e-10 * (1.0 + s * base.abs()));
        let x = Point::new(dx, dy);
        prop_assert!((poly.translated(x).support(u) - base - u.project(x)).abs() <= 1e-10 * (1.0 + base.abs() + x.norm()));
    }

    #[test]
    fn moment_ratio_is_increasing_and_invertible(k in 0.2..20.0f64, dk in 1e-3..1.0f64) {
        prop_assert!(moment_ratio(k + dk) > moment_ratio(k));
        let back = invert_moment_ratio(moment_ratio(k)).unwrap();
        prop_assert!((back - k).abs() <= 1e-10 * k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulators_are_reproducible(seed in any::<u64>(), theta in 0.01..2.0f64) {
        let grid = TimeGrid::new(0.5, 64, 0.0).unwrap();
        prop_assert_eq!(simulate_iid_gaussian(&grid, seed), simulate_iid_gaussian(&grid, seed));
        prop_assert_eq!(simulate_ou(&grid, theta, seed).unwrap(), simulate_ou(&grid, theta, seed).unwrap());
    }

    #[test]
    fn supremum_is_monotone_in_time(seed in any::<u64>(), angle in 0.0..std::f64::consts::TAU) {
        let sim = IidGaussian::planar(1.0);
        let path = sim.sample(seed, 0, 50).unwrap();
        let u = UnitVector::from_angle(angle);
        let sups: Vec<f64> = (1..=50).map(|t| sup_projection(&path, u, t as f64).unwrap()).collect();
        prop_assert!(sups.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn half_spaces_nest(seed in any::<u64>(), b in -2.0..2.0f64, db in 0.0..2.0f64) {
        let sim = OrnsteinUhlenbeck::new(0.3, 1.0).unwrap();
        let path = sim.sample(seed, 3, 200).unwrap();
        let u = UnitVector::on_grid(0, 4);
        let lower = hitting_time(&path, u, b).unwrap_or(f64::INFINITY);
        let upper = hitting_time(&path, u, b + db).unwrap_or(f64::INFINITY);
        prop_assert!(lower <= upper);
    }

    #[test]
    fn quantile_grids_are_monotone_in_level(seed in any::<u64>(), q in 0.01..0.98f64, dq in 0.0..0.5f64) {
        let sim = IidGaussian::planar(1.0);
        let s = simulate_sup_samples(&sim, 12, 10.0, 150, seed).unwrap();
        let lo = s.quantile_grid(q).unwrap();
        let hi = s.quantile_grid((q + dq).min(0.99)).unwrap();
        prop_assert!(lo.grid.thresholds().iter().zip(hi.grid.thresholds()).all(|(a, b)| b >= a));
    }
}

#[test]
fn streams_are_uncorrelated() {
    let sim = IidGaussian::scalar(1.0);
    let n = 20_000;
    let a: Vec<f64> = sim.path(9, 0).take(n).map(|v| v.x).collect();
    for stream in 1..8 {
        let b: Vec<f64> = sim.path(9, stream).take(n).map(|v| v.x).collect();
        assert!(correlation(&a, &b).abs() < 4.0 / (n as f64).sqrt());
    }
}

#[test]
fn top_level_quantile_is_the_largest_sample() {
    let sim = IidGaussian::scalar(1.0);
    let s = simulate_sup_samples(&sim, 4, 5.0, 300, 1).unwrap();
    let est = s.sup_estimate(0);
    let max = *est.samples().last().unwrap();
    assert_eq!(s.quantile_grid(1.0 - 1e-9).unwrap().grid.threshold(0), max);
}
