// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Plane points and the polylines produced by the geodesic engines.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Point {
        Point { x, y }
    }

    pub fn hypot(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).hypot()
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        self + (other - self) * t
    }

    /// Euclidean distance from `self` to the segment `a`–`b`.
    pub fn distance_to_segment(self, a: Point, b: Point) -> f64 {
        let ab = b - a;
        let len2 = ab.x * ab.x + ab.y * ab.y;
        if len2 == 0.0 {
            return self.distance(a);
        }
        let ap = self - a;
        let t = ((ap.x * ab.x + ap.y * ab.y) / len2).clamp(0.0, 1.0);
        self.distance(a.lerp(b, t))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Point {
        Point::new(x, y)
    }
}

/// Vertical direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertical {
    Up,
    Down,
}

impl Vertical {
    pub fn sign(self) -> f64 {
        match self {
            Vertical::Up => 1.0,
            Vertical::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Vertical {
        match self {
            Vertical::Up => Vertical::Down,
            Vertical::Down => Vertical::Up,
        }
    }

    /// `Up` for non-negative values, `Down` otherwise.
    pub fn from_sign(s: f64) -> Vertical {
        if s < 0.0 {
            Vertical::Down
        } else {
            Vertical::Up
        }
    }
}

/// Why a trace stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Arclength or segment budget exhausted.
    Budget,
    /// The trace reached the requested `x` limit.
    XSpan,
    /// The trace left the metric domain or the layer stack.
    DomainExit,
    /// The trace ran into a point where the weight is infinite (zero speed).
    Pole,
    /// The trace entered a region of negative weight and was asked to stop there.
    NegativeIndex,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::XSpan => "x-span",
            Termination::DomainExit => "domain-exit",
            Termination::Pole => "pole",
            Termination::NegativeIndex => "negative-index",
        }
    }

    pub fn parse(s: &str) -> Option<Termination> {
        Some(match s {
            "budget" => Termination::Budget,
            "x-span" => Termination::XSpan,
            "domain-exit" => Termination::DomainExit,
            "pole" => Termination::Pole,
            "negative-index" => Termination::NegativeIndex,
            _ => return None,
        })
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which solver produced a polyline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Ode,
    Ray,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Ode => "ode",
            Engine::Ray => "ray",
        }
    }

    pub fn parse(s: &str) -> Option<Engine> {
        match s {
            "ode" => Some(Engine::Ode),
            "ray" => Some(Engine::Ray),
            _ => None,
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    /// Metric spec string, e.g. `power:-1`.
    pub metric: String,
    pub engine: Engine,
    /// Beltrami constant (equivalently the Snell invariant) of the trace.
    pub c: f64,
    pub termination: Termination,
}

/// Ordered plane points approximating a geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub meta: TraceMeta,
}

impl Polyline {
    pub fn new(points: Vec<Point>, meta: TraceMeta) -> Polyline {
        Polyline { points, meta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> Option<Point> {
        self.points.first().copied()
    }

    pub fn last(&self) -> Option<Point> {
        self.points.last().copied()
    }

    pub fn arclength(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn reversed(&self) -> Polyline {
        let mut points = self.points.clone();
        points.reverse();
        Polyline::new(points, self.meta.clone())
    }

    /// Maps every vertex `(x, y)` to `(x, 1 - y)`.
    pub fn flip_axis(&self) -> Polyline {
        let points = self.points.iter().map(|p| Point::new(p.x, 1.0 - p.y)).collect();
        Polyline::new(points, self.meta.clone())
    }

    /// Largest distance from any vertex of `self` to the polyline `other`.
    pub fn max_distance_to(&self, other: &Polyline) -> f64 {
        if other.len() < 2 {
            return self.points.iter().map(|&p| other.distance_to_point(p)).fold(0.0, f64::max);
        }
        let index = SegmentIndex::new(&other.points);
        self.points.iter().map(|&p| index.distance(p)).fold(0.0, f64::max)
    }

    /// Symmetric Hausdorff distance between the two polylines.
    pub fn sup_distance(&self, other: &Polyline) -> f64 {
        self.max_distance_to(other).max(other.max_distance_to(self))
    }

    pub fn distance_to_point(&self, p: Point) -> f64 {
        match self.points.as_slice() {
            [] => f64::INFINITY,
            [only] => p.distance(*only),
            pts => pts.windows(2).map(|w| p.distance_to_segment(w[0], w[1])).fold(f64::INFINITY, f64::min),
        }
    }

    /// Number of times the horizontal direction of travel changes sign.
    pub fn x_reversals(&self) -> usize {
        let mut last = 0.0f64;
        let mut count = 0;
        for w in self.points.windows(2) {
            let dx = w[1].x - w[0].x;
            if dx == 0.0 {
                continue;
            }
            if last != 0.0 && dx.signum() != last.signum() {
                count += 1;
            }
            last = dx;
        }
        count
    }

    /// Linear interpolation of `y` at `x` along the first segment spanning `x`.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        self.points.windows(2).find_map(|w| {
            let (a, b) = (w[0], w[1]);
            let (lo, hi) = if a.x <= b.x { (a.x, b.x) } else { (b.x, a.x) };
            if x < lo || x > hi {
                return None;
            }
            if a.x == b.x {
                return Some(a.y);
            }
            Some(a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x))
        })
    }
}

/// Uniform grid over the segments of a polyline for nearest-segment queries.
struct SegmentIndex<'a> {
    points: &'a [Point],
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl<'a> SegmentIndex<'a> {
    fn new(points: &'a [Point]) -> SegmentIndex<'a> {
        let n = points.len() - 1;
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let cell = libm::sqrt(w * h / n as f64).max(w.max(h) / n as f64).max(1e-300);
        let nx = ((w / cell) as usize + 1).min(4096);
        let ny = ((h / cell) as usize + 1).min(4096);
        let mut index = SegmentIndex { points, origin: lo, cell, nx, ny, cells: vec![Vec::new(); nx * ny] };
        for k in 0..n {
            let (a, b) = (points[k], points[k + 1]);
            let (i0, j0) = index.cell_of(Point::new(a.x.min(b.x), a.y.min(b.y)));
            let (i1, j1) = index.cell_of(Point::new(a.x.max(b.x), a.y.max(b.y)));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    index.cells[j * nx + i].push(k as u32);
                }
            }
        }
        index
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let clamp = |v: f64, n: usize| if v > 0.0 { (v as usize).min(n - 1) } else { 0 };
        (clamp((p.x - self.origin.x) / self.cell, self.nx), clamp((p.y - self.origin.y) / self.cell, self.ny))
    }

    fn distance(&self, p: Point) -> f64 {
        let (ci, cj) = self.cell_of(p);
        let mut best = f64::INFINITY;
        let mut r = 0usize;
        loop {
            let (i0, i1) = (ci.saturating_sub(r), (ci + r).min(self.nx - 1));
            let (j0, j1) = (cj.saturating_sub(r), (cj + r).min(self.ny - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    // Only the ring added at this radius.
                    if r > 0 && i != ci.wrapping_sub(r) && i != ci + r && j != cj.wrapping_sub(r) && j != cj + r {
                        continue;
                    }
                    for &k in &self.cells[j * self.nx + i] {
                        let k = k as usize;
                        best = best.min(p.distance_to_segment(self.points[k], self.points[k + 1]));
                    }
                }
            }
            let covered = i0 == 0 && j0 == 0 && i1 == self.nx - 1 && j1 == self.ny - 1;
            if best <= r as f64 * self.cell || covered {
                return best;
            }
            r += 1;
        }
    }
}
