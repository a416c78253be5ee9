// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use geodesica_core::curves::CUSP_MARGIN;
use geodesica_core::ode::{integrate, GeodesicProblem};
use geodesica_core::ray::{build_stack, trace, trace_invariant, TraceLimits};
use geodesica_core::solver::{path_functional, shoot, BoundaryProblem};
use geodesica_core::{Engine, Metric, PhysicalConstants, Point, Polyline, Termination, TraceMeta, Vertical};

fn power(alpha: f64) -> Metric {
    Metric::power_law(alpha).unwrap()
}

fn sample(f: impl Fn(f64) -> Point, t0: f64, t1: f64, n: usize) -> Polyline {
    let points = (0..=n).map(|k| f(t0 + (t1 - t0) * k as f64 / n as f64)).collect();
    let meta = TraceMeta { metric: "oracle".into(), engine: Engine::Ode, c: 0.0, termination: Termination::Budget };
    Polyline::new(points, meta)
}

fn endpoint(alpha: f64, c: f64, start: Point, dir: Vertical, ds: f64, x_end: f64) -> Point {
    let p = GeodesicProblem::new(power(alpha), c, start, dir).with_step(ds).with_x_limit(x_end);
    let line = integrate(&p).unwrap();
    assert_eq!(line.meta.termination, Termination::XSpan);
    line.last().unwrap()
}

#[test]
fn rk4_order() {
    // Line: exact at any step.
    let end = endpoint(0.0, 0.6, Point::new(0.0, 0.0), Vertical::Up, 0.1, 3.0);
    assert!((end.y - 4.0).abs() < 1e-12);

    // Catenary away from its vertex.
    let error =
        |ds| (endpoint(1.0, 1.0, Point::new(0.2, 0.2f64.cosh()), Vertical::Up, ds, 1.2).y - 1.2f64.cosh()).abs();
    let (e1, e2) = (error(0.1), error(0.05));
    assert!(e1 / e2 >= 8.0, "catenary {e1:e} / {e2:e}");

    // Unit circle under y^-1, short of the apex.
    let error = |ds| {
        let end = endpoint(-1.0, 1.0, Point::new(-0.8, 0.6), Vertical::Up, ds, -0.3);
        (end.y - (1.0 - 0.09f64).sqrt()).abs()
    };
    let (e1, e2) = (error(0.1), error(0.05));
    assert!(e1 / e2 >= 8.0, "circle {e1:e} / {e2:e}");
}

/// Rays launched horizontally at a geodesic vertex lying on a stack edge. The
/// first layer's horizontal run is `h·tan θ` with `cos θ ~ √h`, against the
/// exact `√(2h)`, so the error decays like `√h`: quadrupling the layers halves it.
#[test]
fn ray_from_vertex() {
    let chain = sample(|x| Point::new(x, x.cosh()), 0.0, 1.2, 100_000);
    let chain_error = |n: usize| {
        let stack = build_stack(&power(1.0), 1.0, 3.0, n).unwrap();
        let limits = TraceLimits { max_segments: 4 * n, x_limit: Some(1.0) };
        let ray = trace_invariant(&stack, Point::new(0.0, 1.0), 1.0, Vertical::Up, limits).unwrap();
        assert_eq!(ray.polyline.meta.termination, Termination::XSpan);
        ray.polyline.max_distance_to(&chain)
    };
    let circle = sample(|t| Point::new(t.cos(), t.sin()), 0.0, PI, 100_000);
    let circle_error = |n: usize| {
        let stack = build_stack(&power(-1.0), 0.1, 1.0, n).unwrap();
        let ray = trace(&stack, Point::new(0.0, 1.0), 1.0, Vertical::Up, 4 * n).unwrap();
        assert_eq!(ray.polyline.meta.termination, Termination::DomainExit);
        assert_eq!(ray.reflections, 1);
        ray.polyline.max_distance_to(&circle)
    };
    for error in [&chain_error as &dyn Fn(usize) -> f64, &circle_error] {
        let (e1, e4) = (error(10_000), error(40_000));
        assert!(e1 < 5e-3, "{e1:e}");
        assert!((1.8..2.2).contains(&(e1 / e4)), "{e1:e} / {e4:e}");
        assert!(error(100_000) < 2e-3);
    }
}

#[test]
fn straight_ray() {
    let stack = build_stack(&power(0.0), 0.0, 10.0, 100).unwrap();
    let ray = trace(&stack, Point::new(0.0, 1.0), FRAC_1_SQRT_2, Vertical::Up, 1000).unwrap();
    for p in &ray.polyline.points {
        assert!((p.y - 1.0 - p.x).abs() < 1e-12);
    }
}

/// Ray and ODE traces with the same start and `S = C`, on arcs without turning points.
#[test]
fn ray_matches_ode() {
    let cycloid = |t: f64| Point::new(t - t.sin(), 1.0 - t.cos());
    let cases = [
        (1.0, 1.0, Point::new(0.2, 0.2f64.cosh()), Vertical::Up, (1.0, 3.0), 1.5),
        (-0.5, FRAC_1_SQRT_2, cycloid(0.5), Vertical::Up, (0.0, 2.0), cycloid(2.5).x),
        (-1.0, 1.0, Point::new(-0.8, 0.6), Vertical::Up, (0.3, 1.5), -0.3),
    ];
    for (alpha, c, start, dir, (lo, hi), x_end) in cases {
        // A fine reference, so the comparison sees the layering rather than chord sag.
        let ode = GeodesicProblem::new(power(alpha), c, start, dir).with_step(1e-4).with_x_limit(x_end);
        let ode = integrate(&ode).unwrap();
        let distance = |n: usize| {
            let stack = build_stack(&power(alpha), lo, hi, n).unwrap();
            let limits = TraceLimits { max_segments: 4 * n, x_limit: Some(x_end) };
            let ray = trace_invariant(&stack, start, c, dir, limits).unwrap();
            assert_eq!(ray.polyline.meta.termination, Termination::XSpan);
            assert!(ray.invariant_spread() < 1e-12);
            ode.sup_distance(&ray.polyline)
        };
        let (d1, d2) = (distance(10_000), distance(20_000));
        assert!(d1 < 5e-3, "α={alpha}: {d1:e}");
        assert!(d2 < d1, "α={alpha}: {d1:e} -> {d2:e}");
    }
}

fn classical() -> [(f64, Point, Point); 5] {
    let cycloid = |t: f64| Point::new(t - t.sin(), 1.0 - t.cos());
    let chain = (Point::new(-1.0, 1f64.cosh()), Point::new(1.0, 1f64.cosh()));
    let arc = (Point::new(-0.6, 0.8), Point::new(0.6, 0.8));
    [
        (0.0, arc.0, arc.1),
        (1.0, chain.0, chain.1),
        (-0.5, cycloid(CUSP_MARGIN), cycloid(PI - CUSP_MARGIN)),
        (-1.0, arc.0, arc.1),
        (0.5, chain.0, chain.1),
    ]
}

fn raw(alpha: f64, line: &Polyline) -> f64 {
    path_functional(&power(alpha), line, &PhysicalConstants::default()).unwrap().raw
}

#[test]
fn refinement_is_stable() {
    for (alpha, p1, p2) in classical() {
        // The midpoint rule on y^-1/2 at the cycloid cusp converges like √ds.
        let ds = if alpha == -0.5 { 2e-4 } else { 2e-3 };
        let coarse = shoot(&BoundaryProblem::ode(power(alpha), p1, p2, ds)).unwrap();
        let fine = shoot(&BoundaryProblem::ode(power(alpha), p1, p2, ds / 2.0)).unwrap();
        assert!(coarse.miss <= 1e-9 && fine.miss <= 1e-9);
        let (a, b) = (raw(alpha, &coarse.polyline), raw(alpha, &fine.polyline));
        assert!((a - b).abs() < 1e-3 * b, "α={alpha}: {a} vs {b}");

        let coarse = shoot(&BoundaryProblem::ray(power(alpha), p1, p2, 10_000)).unwrap();
        let fine = shoot(&BoundaryProblem::ray(power(alpha), p1, p2, 20_000)).unwrap();
        assert!(coarse.miss <= 1e-9 && fine.miss <= 1e-9);
        let (a, b) = (raw(alpha, &coarse.polyline), raw(alpha, &fine.polyline));
        assert!((a - b).abs() < 1e-3 * b, "α={alpha} ray: {a} vs {b}");
    }
}

#[test]
fn engines_agree_on_boundary_problems() {
    for (alpha, p1, p2) in classical() {
        // The cusp of the cycloid needs a finer step for the midpoint rule on y^-1/2.
        let (ds, layers) = if alpha == -0.5 { (1e-4, 40_000) } else { (1e-3, 10_000) };
        let ode = shoot(&BoundaryProblem::ode(power(alpha), p1, p2, ds)).unwrap();
        let ray = shoot(&BoundaryProblem::ray(power(alpha), p1, p2, layers)).unwrap();
        let d = ode.polyline.sup_distance(&ray.polyline);
        assert!(d < 5e-3, "α={alpha}: {d:e}");
        let (a, b) = (raw(alpha, &ode.polyline), raw(alpha, &ray.polyline));
        assert!((a - b).abs() < 1e-3 * a, "α={alpha}: {a} vs {b}");
        assert!((ode.c - ray.c).abs() < 5e-3 * ode.c.abs().max(1.0), "α={alpha}: C {} vs {}", ode.c, ray.c);
    }
}

#[test]
fn wide_hyperbolic_endpoints_have_no_geodesic_within_budget() {
    let problem =
        BoundaryProblem::ode(power(-1.0), Point::new(-50.0, 0.1), Point::new(50.0, 0.1), 1e-2).with_max_arclength(20.0);
    assert!(shoot(&problem).is_err());
}
