// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use geodesica_core::curves::{beltrami_residual, fit_constant, Family, ParametricCurve};
use geodesica_core::ode::{integrate, integrate_with_tangents, tangent_from_c, GeodesicProblem};
use geodesica_core::ray::{build_stack, trace, trace_invariant, TraceLimits};
use geodesica_core::solver::{path_functional, shoot, BoundaryProblem};
use geodesica_core::{Metric, PhysicalConstants, Point, Vertical};
use proptest::prelude::*;

fn power(alpha: f64) -> Metric {
    Metric::power_law(alpha).unwrap()
}

fn classical_alpha() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.0, 1.0, -0.5, -1.0, 0.5])
}

fn vertical() -> impl Strategy<Value = Vertical> {
    prop::bool::ANY.prop_map(|up| if up { Vertical::Up } else { Vertical::Down })
}

proptest! {
    #[test]
    fn weight_times_velocity_is_one(alpha in -4.0f64..4.0, y in 0.01f64..50.0) {
        let m = power(alpha);
        let gv = m.eval_g(y).unwrap() * m.velocity(y).unwrap();
        prop_assert!((gv - 1.0).abs() < 4.0 * f64::EPSILON, "g·v = {gv}");
    }

    #[test]
    fn reciprocal_sine_weight_times_velocity(a in 0.5f64..4.0, y in 0.001f64..0.999) {
        let m = Metric::reciprocal_sine(a).unwrap();
        // Stay clear of the poles, where g is unbounded.
        let v = m.velocity(y).unwrap();
        prop_assume!(v.abs() > 1e-6);
        let gv = m.eval_g(y).unwrap() * v;
        prop_assert!((gv - 1.0).abs() < 1e-12, "g·v = {gv}");
    }

    #[test]
    fn designed_weight_divided_by_slope_is_the_constant(c in 0.1f64..5.0, k in -2.0f64..2.0, y in -3.0f64..3.0) {
        let h = move |y: f64| k * y * y + 1.0;
        let m = Metric::designed(h, c).unwrap();
        let g = m.eval_g(y).unwrap();
        let residual = g / (1.0 + h(y) * h(y)).sqrt() - c;
        prop_assert!(residual.abs() < 1e-12 * c);
    }

    #[test]
    fn integer_powers_match_products(n in -5i32..=5, y in 0.05f64..20.0) {
        let g = power(n as f64).eval_g(y).unwrap();
        let mut product = 1.0;
        for _ in 0..n.unsigned_abs() {
            product *= y;
        }
        if n < 0 {
            product = 1.0 / product;
        }
        prop_assert!((g - product).abs() <= 1e-14 * product.abs(), "{g} vs {product}");
    }

    #[test]
    fn tangent_is_unit(alpha in classical_alpha(), y in 0.05f64..5.0, frac in -1.0f64..=1.0, dir in vertical()) {
        let m = power(alpha);
        let c = frac * m.eval_g(y).unwrap();
        let t = tangent_from_c(&m, c, y, dir).unwrap();
        prop_assert!((t.hypot() - 1.0).abs() < 1e-14);
        prop_assert!(t.y == 0.0 || t.y.signum() == dir.sign());
    }

    #[test]
    fn line_constant(a in -3.0f64..3.0, b in -2.0f64..2.0) {
        let line = ParametricCurve::new(Family::Line { a, b }, (-1.0, 1.0)).unwrap();
        let fit = fit_constant(&line, 0.0, 1000).unwrap();
        prop_assert!((fit.c_squared - 1.0 / (1.0 + a * a)).abs() < 1e-12);
        prop_assert!(fit.max_residual < 1e-12);
    }

    #[test]
    fn residual_ignores_parameterization(t in -1.5f64..1.5, c2 in 0.0f64..2.0) {
        // The catenary traced with parameter s = t³ (sign kept), against the plain one.
        fn eval(s: f64) -> Point {
            let t = s.cbrt();
            Point::new(t, t.cosh())
        }
        fn deriv(s: f64) -> Point {
            let t = s.cbrt();
            let dt = 1.0 / (3.0 * t * t);
            Point::new(dt, t.sinh() * dt)
        }
        prop_assume!(t.abs() > 1e-3);
        let plain = ParametricCurve::new(Family::Catenary, (-2.0, 2.0)).unwrap();
        let slow = ParametricCurve::new(Family::Custom { name: "catenary(s^3)", eval, deriv }, (-8.0, 8.0)).unwrap();
        let a = beltrami_residual(&plain, 1.0, t, c2).unwrap();
        let b = beltrami_residual(&slow, 1.0, t * t * t, c2).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn beltrami_invariant_along_traces(
        alpha in classical_alpha(),
        y0 in 0.5f64..2.0,
        frac in -0.95f64..0.95,
        dir in vertical(),
    ) {
        let m = power(alpha);
        let c = frac * m.eval_g(y0).unwrap();
        let problem = GeodesicProblem::new(m.clone(), c, Point::new(0.0, y0), dir)
            .with_step(1e-2)
            .with_max_arclength(2.0);
        let trace = integrate_with_tangents(&problem).unwrap();
        for (p, t) in trace.polyline.points.iter().zip(&trace.tangents) {
            let invariant = m.eval_g(p.y).unwrap() * t.x;
            prop_assert!((invariant - c).abs() < 1e-8 * (1.0 + c.abs()), "{invariant} vs {c} at {p:?}");
        }
    }

    #[test]
    fn reverse_integration_returns(
        alpha in classical_alpha(),
        y0 in 0.5f64..2.0,
        frac in -0.95f64..0.95,
        dir in vertical(),
    ) {
        let m = power(alpha);
        let ds = 1e-2;
        let c = frac * m.eval_g(y0).unwrap();
        let start = Point::new(0.3, y0);
        let forward = GeodesicProblem::new(m.clone(), c, start, dir).with_step(ds).with_max_arclength(1.5);
        let out = integrate_with_tangents(&forward).unwrap();
        let end = out.polyline.last().unwrap();
        let t_end = *out.tangents.last().unwrap();
        let back = GeodesicProblem::new(m, -c, end, Vertical::from_sign(-t_end.y))
            .with_step(ds)
            .with_max_arclength(out.arclength);
        let home = integrate(&back).unwrap().last().unwrap();
        prop_assert!(home.distance(start) < 10.0 * ds, "returned to {home:?}");
    }

    #[test]
    fn snell_invariant_is_exact(
        alpha in classical_alpha(),
        y0 in 0.5f64..2.0,
        sin0 in -1.0f64..1.0,
        dir in vertical(),
    ) {
        let stack = build_stack(&power(alpha), 0.2, 3.0, 500).unwrap();
        let ray = trace(&stack, Point::new(0.0, y0), sin0, dir, 5000).unwrap();
        prop_assert!(ray.invariant_spread() < 1e-12 * (1.0 + ray.invariant().abs()));
        // Total internal reflection keeps the angle.
        for pair in ray.states.windows(2).filter(|w| w[0].vertical != w[1].vertical) {
            prop_assert_eq!(pair[0].sin_theta.abs(), pair[1].sin_theta.abs());
        }
    }

    #[test]
    fn uniform_stack_keeps_direction(sin0 in -0.99f64..0.99, dir in vertical(), y0 in 0.1f64..0.9) {
        let stack = build_stack(&power(0.0), 0.0, 1.0, 50).unwrap();
        let ray = trace_invariant(&stack, Point::new(0.0, y0), sin0, dir, TraceLimits::segments(1000)).unwrap();
        prop_assert_eq!(ray.reflections, 0);
        let first = ray.polyline.first().unwrap();
        let last = ray.polyline.last().unwrap();
        let d = last - first;
        let expected = sin0 / (1.0 - sin0 * sin0).sqrt();
        prop_assert!((d.x / d.y.abs() - expected).abs() < 1e-9);
        prop_assert!(ray.states.iter().all(|s| s.sin_theta == sin0));
    }

    #[test]
    fn scale_covariance(alpha in -2.0f64..2.0, lambda in prop::sample::select(vec![2.0, 0.5])) {
        let m = power(alpha);
        let points: Vec<Point> = (0..=40).map(|k| {
            let t = k as f64 / 40.0;
            Point::new(t, 1.0 + 0.5 * (3.0 * t).sin())
        }).collect();
        let base = geodesica_core::Polyline::new(points.clone(), meta());
        let scaled = geodesica_core::Polyline::new(points.iter().map(|&p| p * lambda).collect(), meta());
        let k = PhysicalConstants::default();
        let a = path_functional(&m, &base, &k).unwrap().raw;
        let b = path_functional(&m, &scaled, &k).unwrap().raw;
        prop_assert!((b - a * lambda.powf(1.0 + alpha)).abs() < 1e-12 * b.abs());
    }
}

fn meta() -> geodesica_core::TraceMeta {
    geodesica_core::TraceMeta {
        metric: "power".into(),
        engine: geodesica_core::Engine::Ode,
        c: 0.0,
        termination: geodesica_core::Termination::Budget,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shooting_hits_random_endpoints(alpha in classical_alpha(), dx in 0.3f64..1.5, y1 in 0.6f64..1.5, y2 in 0.6f64..1.5) {
        let (p1, p2) = (Point::new(0.0, y1), Point::new(dx, y2));
        let result = shoot(&BoundaryProblem::ode(power(alpha), p1, p2, 1e-2));
        // Not every pair is joined by a geodesic (α = 1 needs the chain to clear the axis).
        prop_assume!(result.is_ok());
        let r = result.unwrap();
        prop_assert!(r.miss <= 1e-9);
        prop_assert_eq!(r.polyline.first().unwrap(), p1);
        prop_assert!((r.polyline.last().unwrap().x - dx).abs() < 1e-12);
    }
}
