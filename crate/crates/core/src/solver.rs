// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Two-point boundary value problems and path functionals.
//!
//! Geodesics are found by shooting from `p1` over the launch angle `θ1`
//! (measured from the vertical). The Beltrami constant of a launch is
//! `C = g(y1)·sin θ1`, and a geodesic through `p2` needs `|C| <= |g(y2)|`, so
//! the coarse scan samples 64 levels of `C` in `(0, min(|g1|, |g2|)]` on both
//! the ascending and descending branch. Adjacent angles whose endpoint miss
//! `y(x2) - y2` changes sign are refined by bisection.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::geometry::{Engine, Point, Polyline, Vertical};
use crate::metric::{Metric, PhysicalConstants};
use crate::ode::{integrate, GeodesicProblem};
use crate::ray::{build_stack, trace_invariant, LayerStack, TraceLimits};
use crate::{Error, Result};

/// `C` levels per branch in the coarse scan.
pub const SCAN_LEVELS: usize = 64;
pub const MAX_BISECTIONS: usize = 200;
/// Launch angles in each local ray scan, and its initial half-width in radians.
const ZOOM_SAMPLES: usize = 128;
const ZOOM_REACH: f64 = 0.02;

/// Default arclength budget, in multiples of the endpoint distance.
const BUDGET_FACTOR: f64 = 8.0;
/// The ODE scan uses at least this many steps per chord. Ray traces are cheap
/// and their miss is sensitive to the layering, so they scan at full resolution.
const SCAN_RESOLUTION: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    /// RK4 arclength step.
    Step(f64),
    /// Number of layers in the ray tracer's stack.
    Layers(usize),
}

impl Resolution {
    pub fn engine(self) -> Engine {
        match self {
            Resolution::Step(_) => Engine::Ode,
            Resolution::Layers(_) => Engine::Ray,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryProblem {
    pub metric: Metric,
    pub p1: Point,
    pub p2: Point,
    pub resolution: Resolution,
    /// Accepted endpoint miss `|y(x2) - y2|`.
    pub tolerance: f64,
    /// Arclength budget per trace; defaults to a multiple of `|p2 - p1|`.
    pub max_arclength: Option<f64>,
    /// Ray engine only: heights covered by the layer stack.
    pub stack_extent: Option<(f64, f64)>,
}

impl BoundaryProblem {
    pub fn ode(metric: Metric, p1: Point, p2: Point, step: f64) -> BoundaryProblem {
        BoundaryProblem {
            metric,
            p1,
            p2,
            resolution: Resolution::Step(step),
            tolerance: 1e-9,
            max_arclength: None,
            stack_extent: None,
        }
    }

    pub fn ray(metric: Metric, p1: Point, p2: Point, n_layers: usize) -> BoundaryProblem {
        BoundaryProblem {
            metric,
            p1,
            p2,
            resolution: Resolution::Layers(n_layers),
            tolerance: 1e-9,
            max_arclength: None,
            stack_extent: None,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_arclength(mut self, max_arclength: f64) -> Self {
        self.max_arclength = Some(max_arclength);
        self
    }

    pub fn with_stack_extent(mut self, lo: f64, hi: f64) -> Self {
        self.stack_extent = Some((lo, hi));
        self
    }

    pub fn engine(&self) -> Engine {
        self.resolution.engine()
    }

    fn validate(&self) -> Result<()> {
        if !(self.p1.x < self.p2.x) {
            return Err(Error::InvalidParams("endpoints must satisfy x1 < x2"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive"));
        }
        match self.resolution {
            Resolution::Step(ds) if !(ds > 0.0 && ds.is_finite()) => Err(Error::InvalidParams("step must be positive")),
            Resolution::Layers(n) if n < 2 => Err(Error::InvalidParams("need at least two layers")),
            _ => Ok(()),
        }
    }

    /// Layer stack extent: the endpoints padded by their separation, clipped to the domain.
    fn default_extent(&self) -> (f64, f64) {
        let pad = (self.p2.x - self.p1.x).max((self.p2.y - self.p1.y).abs());
        let (lower, upper) = self.metric.domain();
        let lo = (self.p1.y.min(self.p2.y) - pad).max(lower);
        let hi = (self.p1.y.max(self.p2.y) + pad).min(upper);
        (lo, hi)
    }
}

#[derive(Debug, Clone)]
pub struct ShootingResult {
    pub polyline: Polyline,
    /// Beltrami constant of the converged launch.
    pub c: f64,
    /// Launch angle from the vertical at `p1`.
    pub launch_angle: f64,
    /// Final `|y(x2) - y2|`.
    pub miss: f64,
    pub iterations: usize,
    /// Launch-angle bracket the bisection started from.
    pub bracket: (f64, f64),
}

/// Evaluates launches at one resolution.
enum Shooter {
    Ode { step: f64, budget: f64 },
    Ray { stack: LayerStack, max_segments: usize },
}

struct Shot {
    miss: f64,
    polyline: Polyline,
}

struct Launcher<'a> {
    problem: &'a BoundaryProblem,
    g1: f64,
}

impl Launcher<'_> {
    fn c_of(&self, theta: f64) -> f64 {
        self.g1 * libm::sin(theta)
    }

    fn fire(&self, shooter: &Shooter, theta: f64) -> Result<Option<Shot>> {
        let BoundaryProblem { metric, p1, p2, .. } = self.problem;
        let c = self.c_of(theta);
        let vertical = vertical_of(theta);
        let polyline = match shooter {
            Shooter::Ode { step, budget } => {
                let gp = GeodesicProblem::new(metric.clone(), c, *p1, vertical)
                    .with_step(*step)
                    .with_max_arclength(*budget)
                    .with_x_limit(p2.x);
                match integrate(&gp) {
                    Ok(line) => line,
                    Err(Error::NoRealTangent { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            Shooter::Ray { stack, max_segments } => {
                let limits = TraceLimits { max_segments: *max_segments, x_limit: Some(p2.x) };
                match trace_invariant(stack, *p1, c, vertical, limits) {
                    Ok(ray) => ray.polyline,
                    Err(Error::NoRealTangent { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
        };
        if polyline.meta.termination != crate::Termination::XSpan {
            return Ok(None);
        }
        let end = polyline.last().expect("trace has a start point");
        Ok(Some(Shot { miss: end.y - p2.y, polyline }))
    }
}

fn vertical_of(theta: f64) -> Vertical {
    if theta <= 0.5 * PI {
        Vertical::Up
    } else {
        Vertical::Down
    }
}

/// Cheap ODE tracer for locating sign changes of the miss.
fn scanner(problem: &BoundaryProblem) -> Shooter {
    let chord = problem.p1.distance(problem.p2);
    let budget = problem.max_arclength.unwrap_or(BUDGET_FACTOR * chord);
    let step = match problem.resolution {
        Resolution::Step(ds) => ds.max(chord / SCAN_RESOLUTION),
        Resolution::Layers(_) => chord / SCAN_RESOLUTION,
    };
    Shooter::Ode { step, budget }
}

fn shooter(problem: &BoundaryProblem) -> Result<Shooter> {
    let chord = problem.p1.distance(problem.p2);
    Ok(match problem.resolution {
        Resolution::Step(step) => {
            let budget = problem.max_arclength.unwrap_or(BUDGET_FACTOR * chord);
            Shooter::Ode { step, budget }
        }
        Resolution::Layers(n) => {
            let (lo, hi) = problem.stack_extent.unwrap_or_else(|| problem.default_extent());
            let stack = build_stack(&problem.metric, lo, hi, n)?;
            Shooter::Ray { stack, max_segments: 8 * n }
        }
    })
}

/// Solves the boundary value problem by shooting from `p1`.
///
/// When several launches hit `p2`, the one with the smallest functional wins.
pub fn shoot(problem: &BoundaryProblem) -> Result<ShootingResult> {
    problem.validate()?;
    let (p1, p2) = (problem.p1, problem.p2);
    let g1 = problem.metric.eval_g(p1.y)?;
    let g2 = problem.metric.eval_g(p2.y)?;
    let c_max = g1.abs().min(g2.abs());
    let launcher = Launcher { problem, g1 };

    let mut angles: Vec<f64> = (1..=SCAN_LEVELS)
        .flat_map(|k| {
            let up = libm::asin((c_max * k as f64 / SCAN_LEVELS as f64 / g1.abs()).min(1.0));
            [up, PI - up]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();

    let coarse = scanner(problem);
    let fine = shooter(problem)?;
    let mut search = Search { launcher: &launcher, solutions: Vec::new(), failure: None };
    if let Shooter::Ode { .. } = fine {
        search.scan(&coarse, &fine, &angles)?;
    } else {
        // The ray miss jumps whenever the turning layer changes, which hides
        // sign changes from a coarse scan, and every turning layer near the
        // true one carries its own root. Locate launches with the ODE, then
        // scan densely with rays around each and let the functional decide.
        let mut guide = Search { launcher: &launcher, solutions: Vec::new(), failure: None };
        guide.scan(&coarse, &coarse, &angles)?;
        if guide.solutions.is_empty() {
            return Err(guide.failure.unwrap_or(Error::NoBracket));
        }
        for (_, located) in &guide.solutions {
            let theta = located.launch_angle;
            let mut reach = ZOOM_REACH;
            for _ in 0..3 {
                let found = search.solutions.len();
                let (lo, hi) = ((theta - reach).max(0.0), (theta + reach).min(PI));
                let zoom: Vec<f64> =
                    (0..=ZOOM_SAMPLES).map(|j| lo + (hi - lo) * j as f64 / ZOOM_SAMPLES as f64).collect();
                search.scan(&fine, &fine, &zoom)?;
                if search.solutions.len() > found {
                    break;
                }
                reach *= 4.0;
            }
        }
    }

    let Search { solutions, failure, .. } = search;
    solutions.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)).map(|(_, r)| r).ok_or(failure.unwrap_or(Error::NoBracket))
}

/// Converged launches, each with its raw functional.
struct Search<'a, 'b> {
    launcher: &'a Launcher<'b>,
    solutions: Vec<(f64, ShootingResult)>,
    failure: Option<Error>,
}

impl Search<'_, '_> {
    /// Fires every angle with `scan` and refines each sign change with `fine`.
    fn scan(&mut self, scan: &Shooter, fine: &Shooter, angles: &[f64]) -> Result<()> {
        let misses = angles
            .iter()
            .map(|&theta| Ok(self.launcher.fire(scan, theta)?.map(|shot| shot.miss)))
            .collect::<Result<Vec<_>>>()?;
        for (k, pair) in misses.windows(2).enumerate() {
            let (Some(a), Some(b)) = (pair[0], pair[1]) else { continue };
            if a * b > 0.0 {
                continue;
            }
            match bisect(self.launcher, fine, (angles[k], angles[k + 1])) {
                Ok(Some(result)) => {
                    let metric = &self.launcher.problem.metric;
                    let value = path_functional(metric, &result.polyline, &PhysicalConstants::default())
                        .map_or(f64::INFINITY, |f| f.raw);
                    self.solutions.push((value, result));
                }
                Ok(None) => {}
                Err(e) => self.failure = Some(e),
            }
        }
        Ok(())
    }
}

/// Refines one coarse bracket at full resolution. `Ok(None)` means the bracket
/// did not survive the change of resolution.
///
/// The ray engine's miss is only piecewise continuous: each time the turning
/// layer changes it jumps. When bisection closes in on such a jump, the search
/// steps away from it on the side with the smaller miss until the sign flips
/// again, then resumes bisecting.
fn bisect(launcher: &Launcher<'_>, shooter: &Shooter, bracket: (f64, f64)) -> Result<Option<ShootingResult>> {
    let tol = launcher.problem.tolerance;
    let (Some(at_lo), Some(at_hi)) = (launcher.fire(shooter, bracket.0)?, launcher.fire(shooter, bracket.1)?) else {
        return Ok(None);
    };
    if at_lo.miss * at_hi.miss > 0.0 {
        return Ok(None);
    }
    let width = bracket.1 - bracket.0;
    let (mut lo, mut hi) = ((bracket.0, at_lo.miss), (bracket.1, at_hi.miss));
    let mut best = if at_lo.miss.abs() <= at_hi.miss.abs() { (lo.0, at_lo) } else { (hi.0, at_hi) };
    let mut iterations = 0;
    while best.1.miss.abs() > tol {
        if iterations >= MAX_BISECTIONS {
            return Err(Error::NonConvergence { iterations, miss: best.1.miss.abs() });
        }
        let mid = 0.5 * (lo.0 + hi.0);
        if mid > lo.0 && mid < hi.0 {
            iterations += 1;
            let Some(shot) = launcher.fire(shooter, mid)? else {
                return Ok(None);
            };
            if shot.miss.signum() == lo.1.signum() {
                lo = (mid, shot.miss);
            } else {
                hi = (mid, shot.miss);
            }
            if shot.miss.abs() < best.1.miss.abs() {
                best = (mid, shot);
            }
            continue;
        }

        // Collapsed onto a jump: walk away from it, starting on the side
        // with the smaller miss.
        let sides = if lo.1.abs() <= hi.1.abs() { [(lo, -1.0), (hi, 1.0)] } else { [(hi, 1.0), (lo, -1.0)] };
        let mut bracketed = None;
        for (near, dir) in sides {
            let mut last = near;
            let mut step = width * 1e-9;
            while iterations < MAX_BISECTIONS && step <= width {
                iterations += 1;
                let theta = near.0 + dir * step;
                let Some(shot) = launcher.fire(shooter, theta)? else { break };
                let miss = shot.miss;
                if miss.abs() < best.1.miss.abs() {
                    best = (theta, shot);
                }
                if miss.signum() != near.1.signum() {
                    bracketed = Some(if dir < 0.0 { ((theta, miss), last) } else { (last, (theta, miss)) });
                    break;
                }
                last = (theta, miss);
                step *= 2.0;
            }
            if bracketed.is_some() || best.1.miss.abs() <= tol {
                break;
            }
        }
        if best.1.miss.abs() <= tol {
            break;
        }
        let Some(pair) = bracketed else {
            return Err(Error::NonConvergence { iterations, miss: best.1.miss.abs() });
        };
        (lo, hi) = pair;
    }
    let (theta, shot) = best;
    Ok(Some(ShootingResult {
        c: launcher.c_of(theta),
        launch_angle: theta,
        miss: shot.miss.abs(),
        iterations,
        bracket,
        polyline: shot.polyline,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    /// `Σ g(y_mid)·|segment|`.
    pub raw: f64,
    /// `raw` times the physical prefactor.
    pub physical: f64,
}

/// Midpoint-rule approximation of `∫ g(y) ds` along the polyline.
pub fn path_functional(metric: &Metric, polyline: &Polyline, constants: &PhysicalConstants) -> Result<FunctionalValue> {
    let raw = weighted_length(metric, &polyline.points)?;
    Ok(FunctionalValue { raw, physical: raw * constants.scale_for(metric) })
}

fn weighted_length(metric: &Metric, points: &[Point]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParams("a functional needs at least two points"));
    }
    points.windows(2).try_fold(0.0, |acc, w| {
        let g = metric.eval_g(0.5 * (w[0].y + w[1].y))?;
        Ok(acc + g * w[0].distance(w[1]))
    })
}

/// Lateral area `2π ∫ y ds` of the surface swept by rotating the polyline about the x axis.
pub fn catenoid_area(polyline: &Polyline) -> Result<f64> {
    if polyline.len() < 2 {
        return Err(Error::InvalidParams("a functional needs at least two points"));
    }
    if let Some(p) = polyline.points.iter().find(|p| !(p.y > 0.0)) {
        return Err(Error::NonPositiveY { y: p.y });
    }
    let metric = Metric::power_law(1.0)?;
    Ok(2.0 * PI * weighted_length(&metric, &polyline.points)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    /// Functional of the unperturbed polyline.
    pub base: f64,
    /// `perturbed - base` for each perturbation; infinite when the perturbed
    /// curve left the metric domain.
    pub margins: Vec<f64>,
    pub min_margin: f64,
}

impl MinimalityReport {
    pub fn passed(&self) -> bool {
        self.min_margin > 0.0
    }
}

/// Pushes the interior of the converged curve off itself with `n_perturbations`
/// random smooth bumps of height `amplitude` (endpoints fixed) and records how
/// much each one raises the functional.
pub fn minimality_check<R: Rng + ?Sized>(
    metric: &Metric,
    result: &ShootingResult,
    n_perturbations: usize,
    amplitude: f64,
    rng: &mut R,
) -> Result<MinimalityReport> {
    let points = &result.polyline.points;
    let base = weighted_length(metric, points)?;
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidParams("need interior vertices to perturb"));
    }

    let mut u = Vec::with_capacity(n);
    let mut s = 0.0;
    u.push(0.0);
    for w in points.windows(2) {
        s += w[0].distance(w[1]);
        u.push(s);
    }
    u.iter_mut().for_each(|v| *v /= s);

    let normals: Vec<Point> = (0..n)
        .map(|i| {
            let d = points[(i + 1).min(n - 1)] - points[i.saturating_sub(1)];
            let len = d.hypot();
            Point::new(-d.y / len, d.x / len)
        })
        .collect();

    let mut margins = Vec::with_capacity(n_perturbations);
    let mut perturbed = points.clone();
    for _ in 0..n_perturbations {
        let width = rng.gen_range(0.2..0.6);
        let a = rng.gen_range(0.05..(0.95 - width));
        let b = a + width;
        let height = if rng.gen_bool(0.5) { amplitude } else { -amplitude };
        for i in 0..n {
            let bump = if u[i] > a && u[i] < b {
                let s = libm::sin(PI * (u[i] - a) / width);
                height * s * s
            } else {
                0.0
            };
            perturbed[i] = points[i] + normals[i] * bump;
        }
        perturbed[0] = points[0];
        perturbed[n - 1] = points[n - 1];
        let margin = match weighted_length(metric, &perturbed) {
            Ok(value) => value - base,
            Err(Error::OutOfDomain { .. } | Error::Pole { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        margins.push(margin);
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MinimalityReport { base, margins, min_margin })
}
