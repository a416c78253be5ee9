// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Ray-traced geodesic families.
//!
//! `fig4` launches power-law rays for `α = -0.25, -0.5, -1, -2, -4` from
//! `(-√(1 - ε²), ε)` with invariant `S = 1`. Every curve rises to the common
//! turning height `y = 1`, where the stack ends, and the unit circle is the
//! `α = -1` member. Plotted against `1 - y` the curves are ordered top to
//! bottom by decreasing `α`.
//!
//! `fig5` drops rays from `(0, 1 - ε)` with `S = 1/2` through reciprocal-sine
//! media `1/sin(a(1 - y))`, `a = 1..4`, down to `y = 0`. Only `a = 4` reaches
//! negative speeds (below `y = 1 - π/4`) and turns back in `x`.

use std::thread;

use geodesica_core::ray::{build_stack, trace_invariant, TraceLimits};
use geodesica_core::{Metric, Point, Polyline, Result, Vertical};

/// Distance of the common start from the edge of the medium.
pub const EPSILON: f64 = 1e-3;
pub const FIG4_ALPHAS: [f64; 5] = [-0.25, -0.5, -1.0, -2.0, -4.0];
pub const FIG5_FREQUENCIES: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
pub const FIG5_INVARIANT: f64 = 0.5;
pub const DEFAULT_LAYERS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig4,
    Fig5,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }

    /// Whether plots use `1 - y` as the vertical axis.
    pub fn flip_axis(self) -> bool {
        self == Figure::Fig4
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    /// File stem, e.g. `fig4_alpha_-0.25`.
    pub name: String,
    pub label: String,
    pub color: &'static str,
    /// Traced in metric coordinates; apply [`Polyline::flip_axis`] for plotting.
    pub polyline: Polyline,
}

pub fn fig4_start() -> Point {
    Point::new(-(1.0 - EPSILON * EPSILON).sqrt(), EPSILON)
}

pub fn fig5_start() -> Point {
    Point::new(0.0, 1.0 - EPSILON)
}

struct Job {
    name: String,
    label: String,
    color: &'static str,
    metric: Metric,
    start: Point,
    invariant: f64,
    vertical: Vertical,
}

pub fn generate(figure: Figure, n_layers: usize) -> Result<Vec<Curve>> {
    let jobs: Vec<Job> = match figure {
        Figure::Fig4 => FIG4_ALPHAS
            .iter()
            .map(|&alpha| {
                Ok(Job {
                    name: format!("fig4_alpha_{alpha}"),
                    label: format!("α = {alpha}"),
                    color: if alpha == -1.0 { "red" } else { "black" },
                    metric: Metric::power_law(alpha)?,
                    start: fig4_start(),
                    invariant: 1.0,
                    vertical: Vertical::Up,
                })
            })
            .collect::<Result<_>>()?,
        Figure::Fig5 => FIG5_FREQUENCIES
            .iter()
            .zip(["black", "green", "blue", "red"])
            .map(|(&a, color)| {
                Ok(Job {
                    name: format!("fig5_a_{a}"),
                    label: format!("a = {a}"),
                    color,
                    metric: Metric::reciprocal_sine(a)?,
                    start: fig5_start(),
                    invariant: FIG5_INVARIANT,
                    vertical: Vertical::Down,
                })
            })
            .collect::<Result<_>>()?,
    };
    thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|job| scope.spawn(move || run(job, n_layers))).collect();
        handles.into_iter().map(|h| h.join().expect("trace thread panicked")).collect()
    })
}

fn run(job: Job, n_layers: usize) -> Result<Curve> {
    let stack = build_stack(&job.metric, 0.0, 1.0, n_layers)?;
    let ray = trace_invariant(&stack, job.start, job.invariant, job.vertical, TraceLimits::segments(8 * n_layers))?;
    Ok(Curve { name: job.name, label: job.label, color: job.color, polyline: ray.polyline })
}
