// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Arclength integration of geodesics.
//!
//! Along a geodesic of `g(y)·ds` the horizontal component of the unit tangent
//! is pinned by the Beltrami constant, `dx/ds = C·v(y)` with `v = 1/g`. The
//! vertical component `q = dy/ds` is carried as a state variable and obeys
//! `dq/ds = -C²·v·v'`, obtained by differentiating `(C·v)² + q² = 1`. This
//! form has no square root, so turning points (`q = 0`) are crossed like any
//! other point and the vertical direction flips on its own. Poles of `g` are
//! zeros of `v` and are crossed the same way.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Engine, Point, Polyline, Termination, TraceMeta, Vertical};
use crate::metric::Metric;
use crate::{Error, Result};

/// Halvings allowed when a step leaves the domain or has to land on a limit.
const MAX_HALVINGS: usize = 60;

/// Largest departure from unit speed accepted after one step.
const MAX_DRIFT: f64 = 1e-6;

/// Slack on `|C·v| <= 1` accepted at the start point.
const TANGENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct GeodesicProblem {
    pub metric: Metric,
    /// Beltrami constant `C = g(y)·dx/ds`. Its sign selects the horizontal
    /// direction of travel in media with positive weight.
    pub c: f64,
    pub start: Point,
    /// Initial vertical direction. Irrelevant when the start is a turning point.
    pub vertical: Vertical,
    /// Arclength step `ds`.
    pub step: f64,
    pub max_arclength: f64,
    /// Stop as soon as `x` reaches this value.
    pub x_limit: Option<f64>,
    /// Stop instead of continuing into a region where `g < 0`.
    pub stop_on_negative_index: bool,
}

impl GeodesicProblem {
    pub fn new(metric: Metric, c: f64, start: Point, vertical: Vertical) -> GeodesicProblem {
        GeodesicProblem {
            metric,
            c,
            start,
            vertical,
            step: 1e-3,
            max_arclength: 10.0,
            x_limit: None,
            stop_on_negative_index: false,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_max_arclength(mut self, max_arclength: f64) -> Self {
        self.max_arclength = max_arclength;
        self
    }

    pub fn with_x_limit(mut self, x: f64) -> Self {
        self.x_limit = Some(x);
        self
    }

    pub fn stop_on_negative_index(mut self, stop: bool) -> Self {
        self.stop_on_negative_index = stop;
        self
    }
}

/// Unit tangent `(dx/ds, dy/ds)` carrying Beltrami constant `c` at height `y`.
pub fn tangent_from_c(metric: &Metric, c: f64, y: f64, vertical: Vertical) -> Result<Point> {
    let ratio = c * metric.velocity(y)?;
    if ratio.abs() > 1.0 + TANGENT_SLACK {
        return Err(Error::NoRealTangent { y, ratio: ratio.abs() });
    }
    let ratio = ratio.clamp(-1.0, 1.0);
    let cos = libm::sqrt((1.0 - ratio * ratio).max(0.0));
    Ok(Point::new(ratio, vertical.sign() * cos))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct State {
    x: f64,
    y: f64,
    q: f64,
}

/// `|dx/ds|² + |dy/ds|² - 1` at the end of a step.
fn speed_drift(metric: &Metric, c: f64, s: State) -> f64 {
    match metric.velocity(s.y) {
        Ok(v) => libm::fabs(s.q * s.q + c * c * v * v - 1.0),
        Err(_) => f64::INFINITY,
    }
}

/// Derivative of the state; the first component is also `dx/ds`.
fn rate(metric: &Metric, c: f64, s: State) -> Result<State> {
    let (v, dv) = metric.velocity_slope(s.y)?;
    Ok(State { x: c * v, y: s.q, q: -c * c * v * dv })
}

fn rk4(metric: &Metric, c: f64, s: State, h: f64) -> Result<State> {
    let shift = |k: State, f: f64| State { x: s.x + f * k.x, y: s.y + f * k.y, q: s.q + f * k.q };
    let k1 = rate(metric, c, s)?;
    let k2 = rate(metric, c, shift(k1, 0.5 * h))?;
    let k3 = rate(metric, c, shift(k2, 0.5 * h))?;
    let k4 = rate(metric, c, shift(k3, h))?;
    let next = State {
        x: s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        y: s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        q: s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
    };
    // The end point has to be a valid place to continue from.
    metric.velocity_slope(next.y)?;
    Ok(next)
}

/// An integrated geodesic with the unit tangent at each vertex.
#[derive(Debug, Clone)]
pub struct OdeTrace {
    pub polyline: Polyline,
    pub tangents: Vec<Point>,
    pub arclength: f64,
}

/// Integrates the geodesic with fixed-step RK4 in arclength.
pub fn integrate(problem: &GeodesicProblem) -> Result<Polyline> {
    integrate_with_tangents(problem).map(|t| t.polyline)
}

pub fn integrate_with_tangents(problem: &GeodesicProblem) -> Result<OdeTrace> {
    let GeodesicProblem { metric, c, start, step, max_arclength, .. } = problem;
    let (c, step, budget) = (*c, *step, *max_arclength);
    if !(step > 0.0 && step.is_finite()) || !c.is_finite() || !(budget >= 0.0) {
        return Err(Error::InvalidParams("step must be positive and C finite"));
    }
    let t0 = tangent_from_c(metric, c, start.y, problem.vertical)?;
    let mut state = State { x: start.x, y: start.y, q: t0.y };
    let mut points = vec![*start];
    let mut tangents = vec![t0];
    let mut s = 0.0;

    let push = |st: State, points: &mut Vec<Point>, tangents: &mut Vec<Point>| -> Result<()> {
        let v = metric.velocity(st.y)?;
        points.push(Point::new(st.x, st.y));
        tangents.push(Point::new(c * v, st.q));
        Ok(())
    };

    let termination = loop {
        let remaining = budget - s;
        if remaining <= 0.0 {
            break Termination::Budget;
        }
        let mut h = step.min(remaining);
        let mut next = rk4(metric, c, state, h);
        let mut halvings = 0;
        // Near a sharp turning point a full step can leave the unit tangent
        // far behind; such steps are retried at half length like domain exits.
        let accept = |n: &Result<State>| n.as_ref().is_ok_and(|n| speed_drift(metric, c, *n) <= MAX_DRIFT);
        while !accept(&next) {
            if halvings == MAX_HALVINGS {
                break;
            }
            halvings += 1;
            h *= 0.5;
            next = rk4(metric, c, state, h);
        }
        let next = match next {
            Ok(n) if h >= step * libm::ldexp(1.0, -40) => n,
            Ok(_) => break Termination::DomainExit,
            Err(Error::Pole { .. } | Error::ZeroWeight { .. }) => break Termination::Pole,
            Err(_) => break Termination::DomainExit,
        };

        if let Some(limit) = problem.x_limit {
            if (state.x - limit) * (next.x - limit) <= 0.0 && next.x != state.x {
                let (hit, h_hit) = land_on_x(metric, c, state, h, limit)?;
                if h_hit > 0.0 {
                    push(State { x: limit, ..hit }, &mut points, &mut tangents)?;
                    s += h_hit;
                }
                break Termination::XSpan;
            }
        }
        if problem.stop_on_negative_index && metric.velocity(next.y)? < 0.0 {
            break Termination::NegativeIndex;
        }
        push(next, &mut points, &mut tangents)?;
        state = next;
        s += h;
    };

    Ok(OdeTrace {
        polyline: Polyline::new(points, TraceMeta { metric: metric.spec(), engine: Engine::Ode, c, termination }),
        tangents,
        arclength: s,
    })
}

/// Finds the step length in `(0, h]` at which `x` reaches `limit`.
fn land_on_x(metric: &Metric, c: f64, state: State, h: f64, limit: f64) -> Result<(State, f64)> {
    let side = (state.x - limit).signum();
    let (mut lo, mut hi) = (0.0, h);
    let mut best = rk4(metric, c, state, h)?;
    for _ in 0..MAX_HALVINGS {
        let mid = 0.5 * (lo + hi);
        let trial = rk4(metric, c, state, mid)?;
        if (trial.x - limit) * side > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            best = trial;
        }
    }
    Ok((best, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn power(alpha: f64) -> Metric {
        Metric::power_law(alpha).unwrap()
    }

    #[test]
    fn tangent_examples() {
        let t = tangent_from_c(&power(0.0), FRAC_1_SQRT_2, 3.0, Vertical::Up).unwrap();
        assert!((t.x - FRAC_1_SQRT_2).abs() < 1e-15 && (t.y - FRAC_1_SQRT_2).abs() < 1e-15);

        let ch = libm::cosh(1.0);
        let t = tangent_from_c(&power(1.0), 1.0, ch, Vertical::Up).unwrap();
        assert!((t.x - 0.64805).abs() < 1e-5);
        assert!((t.y - libm::tanh(1.0)).abs() < 1e-15);

        let t = tangent_from_c(&power(1.0), 1.0, 1.0, Vertical::Up).unwrap();
        assert_eq!(t, Point::new(1.0, 0.0));
    }

    #[test]
    fn tangent_below_turning_level() {
        let err = tangent_from_c(&power(1.0), 1.0, 0.5, Vertical::Up).unwrap_err();
        assert!(matches!(err, Error::NoRealTangent { .. }));
        let problem = GeodesicProblem::new(power(1.0), 1.0, Point::new(0.0, 0.5), Vertical::Up);
        assert!(integrate(&problem).is_err());
    }

    #[test]
    fn catenary_endpoint() {
        let problem =
            GeodesicProblem::new(power(1.0), 1.0, Point::new(0.0, 1.0), Vertical::Up).with_step(1e-4).with_x_limit(1.0);
        let line = integrate(&problem).unwrap();
        assert_eq!(line.meta.termination, Termination::XSpan);
        let end = line.last().unwrap();
        assert_eq!(end.x, 1.0);
        assert!((end.y - libm::cosh(1.0)).abs() < 1e-6);
    }

    #[test]
    fn horizontal_line_at_unit_weight() {
        let problem = GeodesicProblem::new(power(0.0), 1.0, Point::new(0.0, 5.0), Vertical::Up).with_max_arclength(2.0);
        let line = integrate(&problem).unwrap();
        assert!(line.points.iter().all(|p| p.y == 5.0));
        assert!((line.last().unwrap().x - 2.0).abs() < 1e-12);
        assert_eq!(line.meta.termination, Termination::Budget);
    }

    #[test]
    fn semicircle_from_apex() {
        let problem = GeodesicProblem::new(power(-1.0), 1.0, Point::new(0.0, 1.0), Vertical::Down)
            .with_step(1e-3)
            .with_max_arclength(PI / 2.0 - 0.05);
        let line = integrate(&problem).unwrap();
        for p in &line.points {
            assert!((p.hypot() - 1.0).abs() < 1e-6, "{p:?}");
        }
        let end = line.last().unwrap();
        assert!((end.x - libm::cos(0.05)).abs() < 1e-6);
    }

    #[test]
    fn leaves_domain_at_axis() {
        let problem = GeodesicProblem::new(power(-1.0), 1.0, Point::new(0.0, 1.0), Vertical::Down)
            .with_step(1e-2)
            .with_max_arclength(3.0);
        let line = integrate(&problem).unwrap();
        assert_eq!(line.meta.termination, Termination::DomainExit);
        let end = line.last().unwrap();
        assert!(end.y > 0.0 && end.y < 1e-2);
        for w in line.points.windows(2) {
            assert!(w[0] != w[1]);
            assert!(w[0].distance(w[1]) <= 2.0 * 1e-2);
        }
    }

    #[test]
    fn negative_index_can_stop_the_trace() {
        let metric = Metric::reciprocal_sine(4.0).unwrap();
        let problem = GeodesicProblem::new(metric, 0.5, Point::new(0.0, 0.99), Vertical::Down).with_max_arclength(5.0);
        let through = integrate(&problem).unwrap();
        assert!(through.x_reversals() >= 1);
        let stopped = integrate(&problem.clone().stop_on_negative_index(true)).unwrap();
        assert_eq!(stopped.meta.termination, Termination::NegativeIndex);
        assert_eq!(stopped.x_reversals(), 0);
    }

    #[test]
    fn sharp_turn_keeps_unit_speed() {
        // For α = 1/2 the curve turns at y = C² with curvature ~ 1/C³.
        let c = 0.059 * libm::sqrt(0.5);
        let problem = GeodesicProblem::new(power(0.5), c, Point::new(0.0, 0.5), Vertical::Down)
            .with_step(1e-2)
            .with_max_arclength(1.5);
        let trace = integrate_with_tangents(&problem).unwrap();
        assert!(trace.polyline.points.iter().any(|p| p.y < 2.0 * c * c));
        for t in &trace.tangents {
            assert!((t.hypot() - 1.0).abs() < 1e-5, "{t:?}");
        }
    }
}
