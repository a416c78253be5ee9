// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Ray tracing through a stack of horizontal constant-speed layers.
//!
//! Inside a layer a ray is straight. At each interface the Snell invariant
//! `S = sin θ / v` (θ measured from the vertical) carries over to the next
//! layer; when `|S·v| >= 1` there the ray is totally reflected and keeps its
//! angle. Layers with negative speed flip the sign of `sin θ`, which sends the
//! ray back in `x`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Engine, Point, Polyline, Termination, TraceMeta, Vertical};
use crate::metric::Metric;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct LayerStack {
    metric: Metric,
    y_bottom: f64,
    y_top: f64,
    velocities: Vec<f64>,
}

/// Samples `velocity(metric, ·)` at the midpoints of `n_layers` equal layers.
///
/// The edges may sit on the boundary of the metric domain as long as every
/// midpoint is inside it. A midpoint where the weight has a pole gets speed 0.
pub fn build_stack(metric: &Metric, y_bottom: f64, y_top: f64, n_layers: usize) -> Result<LayerStack> {
    if n_layers < 2 {
        return Err(Error::InvalidParams("a layer stack needs at least two layers"));
    }
    if !(y_bottom < y_top) || !y_bottom.is_finite() || !y_top.is_finite() {
        return Err(Error::InvalidParams("stack extent must be a finite interval"));
    }
    let (lower, upper) = metric.domain();
    for y in [y_bottom, y_top] {
        if y < lower || y > upper {
            return Err(Error::OutOfDomain { y, lower, upper });
        }
    }
    let h = (y_top - y_bottom) / n_layers as f64;
    let velocities =
        (0..n_layers).map(|i| metric.velocity(y_bottom + (i as f64 + 0.5) * h)).collect::<Result<Vec<_>>>()?;
    Ok(LayerStack { metric: metric.clone(), y_bottom, y_top, velocities })
}

impl LayerStack {
    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn n_layers(&self) -> usize {
        self.velocities.len()
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.y_bottom, self.y_top)
    }

    pub fn layer_height(&self) -> f64 {
        (self.y_top - self.y_bottom) / self.n_layers() as f64
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    /// Indices of layers whose speed is exactly zero.
    pub fn poles(&self) -> Vec<usize> {
        self.velocities.iter().enumerate().filter(|(_, v)| **v == 0.0).map(|(i, _)| i).collect()
    }

    /// Height of interface `k`, `0 <= k <= n_layers`.
    fn edge(&self, k: usize) -> f64 {
        if k == self.n_layers() {
            self.y_top
        } else {
            self.y_bottom + (self.y_top - self.y_bottom) * k as f64 / self.n_layers() as f64
        }
    }

    /// Layer a ray at height `y` moving in `dir` is about to cross, if any.
    ///
    /// Moving up from an interface enters the layer above it, moving down the
    /// layer below.
    fn layer_ahead(&self, y: f64, dir: Vertical) -> Option<usize> {
        let n = self.n_layers();
        match dir {
            Vertical::Up if y >= self.y_top => return None,
            Vertical::Down if y <= self.y_bottom => return None,
            _ => {}
        }
        let f = (y - self.y_bottom) / self.layer_height();
        let mut i = (libm::floor(f).max(0.0) as usize).min(n - 1);
        // Rounding in `f` can be off by one next to an interface.
        match dir {
            Vertical::Up => {
                while i > 0 && y < self.edge(i) {
                    i -= 1;
                }
                while i + 1 < n && y >= self.edge(i + 1) {
                    i += 1;
                }
            }
            Vertical::Down => {
                while i > 0 && y <= self.edge(i) {
                    i -= 1;
                }
                while i + 1 < n && y > self.edge(i + 1) {
                    i += 1;
                }
            }
        }
        Some(i)
    }
}

/// Sine of the angle to the vertical in a layer of speed `v_next`.
///
/// Values with magnitude above one mean total internal reflection.
pub fn snell_step(invariant: f64, v_next: f64) -> f64 {
    invariant * v_next
}

/// State of a ray at the start of a straight segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub position: Point,
    /// Signed sine of the angle to the vertical.
    pub sin_theta: f64,
    pub vertical: Vertical,
    /// `sin θ / v` recomputed in the current layer.
    pub invariant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceLimits {
    pub max_segments: usize,
    pub x_limit: Option<f64>,
}

impl TraceLimits {
    pub fn segments(max_segments: usize) -> TraceLimits {
        TraceLimits { max_segments, x_limit: None }
    }
}

#[derive(Debug, Clone)]
pub struct RayTrace {
    pub polyline: Polyline,
    /// One state per segment.
    pub states: Vec<RayState>,
    pub reflections: usize,
}

impl RayTrace {
    /// Snell invariant of the launch.
    pub fn invariant(&self) -> f64 {
        self.polyline.meta.c
    }

    /// Largest deviation of any per-layer `sin θ / v` from the launch invariant.
    pub fn invariant_spread(&self) -> f64 {
        let s = self.invariant();
        self.states.iter().map(|st| (st.invariant - s).abs()).fold(0.0, f64::max)
    }
}

/// Traces a ray that leaves `start` with angle `asin(sin_theta0)` to the vertical.
///
/// The invariant is fixed by the metric at the start point, `S = sin θ0 / v(start.y)`,
/// so that it coincides with the Beltrami constant of the matching geodesic.
pub fn trace(
    stack: &LayerStack,
    start: Point,
    sin_theta0: f64,
    vertical: Vertical,
    max_segments: usize,
) -> Result<RayTrace> {
    if !(sin_theta0.abs() <= 1.0) {
        return Err(Error::InvalidParams("|sin θ0| must not exceed 1"));
    }
    let v = stack.metric.velocity(start.y)?;
    if v == 0.0 {
        return Err(Error::Pole { y: start.y });
    }
    trace_invariant(stack, start, sin_theta0 / v, vertical, TraceLimits::segments(max_segments))
}

/// Traces a ray from `start` carrying Snell invariant `invariant`.
///
/// The start may lie on the stack boundary, including a boundary where the
/// speed vanishes.
pub fn trace_invariant(
    stack: &LayerStack,
    start: Point,
    invariant: f64,
    vertical: Vertical,
    limits: TraceLimits,
) -> Result<RayTrace> {
    let (lo, hi) = stack.extent();
    if !(start.y >= lo && start.y <= hi) {
        return Err(Error::StartOutsideStack { y: start.y });
    }
    let meta = |termination| TraceMeta { metric: stack.metric.spec(), engine: Engine::Ray, c: invariant, termination };
    let mut points = vec![start];
    let mut states = Vec::new();
    let mut reflections = 0;

    // Pick the launch layer; a ray that cannot enter it turns around at once.
    let mut dir = vertical;
    let mut layer = None;
    for candidate in [dir, dir.flipped()] {
        if let Some(i) = stack.layer_ahead(start.y, candidate) {
            if stack.velocities[i] == 0.0 {
                let polyline = Polyline::new(points, meta(Termination::Pole));
                return Ok(RayTrace { polyline, states, reflections });
            }
            if snell_step(invariant, stack.velocities[i]).abs() < 1.0 {
                layer = Some(i);
                dir = candidate;
                break;
            }
        }
    }
    let Some(mut i) = layer else {
        let reason = match stack.layer_ahead(start.y, vertical) {
            None => Termination::DomainExit,
            Some(i) if snell_step(invariant, stack.velocities[i]).abs() == 1.0 => {
                // Grazing: the ray runs along the layer at constant height.
                let v = stack.velocities[i];
                states.push(RayState { position: start, sin_theta: invariant * v, vertical, invariant });
                let reason = match limits.x_limit {
                    Some(limit) if (limit - start.x) * invariant * v > 0.0 => {
                        points.push(Point::new(limit, start.y));
                        Termination::XSpan
                    }
                    _ => Termination::Budget,
                };
                return Ok(RayTrace { polyline: Polyline::new(points, meta(reason)), states, reflections });
            }
            Some(_) => return Err(Error::NoRealTangent { y: start.y, ratio: invariant.abs() }),
        };
        return Ok(RayTrace { polyline: Polyline::new(points, meta(reason)), states, reflections });
    };
    if dir != vertical {
        reflections += 1;
    }

    let n = stack.n_layers();
    let mut pos = start;
    let termination = loop {
        if states.len() >= limits.max_segments {
            break Termination::Budget;
        }
        let v = stack.velocities[i];
        let sin = snell_step(invariant, v);
        let cos = libm::sqrt(1.0 - sin * sin);
        states.push(RayState { position: pos, sin_theta: sin, vertical: dir, invariant: sin / v });

        let target = match dir {
            Vertical::Up => stack.edge(i + 1),
            Vertical::Down => stack.edge(i),
        };
        let rise = (target - pos.y).abs();
        let next = Point::new(pos.x + sin / cos * rise, target);

        if let Some(limit) = limits.x_limit {
            if (pos.x - limit) * (next.x - limit) <= 0.0 && next.x != pos.x {
                let t = (limit - pos.x) / (next.x - pos.x);
                let hit = Point::new(limit, pos.y + t * (next.y - pos.y));
                if hit != pos {
                    points.push(hit);
                }
                break Termination::XSpan;
            }
        }
        points.push(next);
        pos = next;

        let j = match dir {
            Vertical::Up if i + 1 < n => i + 1,
            Vertical::Down if i > 0 => i - 1,
            _ => break Termination::DomainExit,
        };
        let v_next = stack.velocities[j];
        if v_next == 0.0 {
            break Termination::Pole;
        }
        if snell_step(invariant, v_next).abs() >= 1.0 {
            dir = dir.flipped();
            reflections += 1;
        } else {
            i = j;
        }
    };

    Ok(RayTrace { polyline: Polyline::new(points, meta(termination)), states, reflections })
}
