// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Closed-form geodesics and the Beltrami residual used to check them.
//!
//! For a power-law metric the first integral reads
//! `y^{2α}·dx² / (dx² + dy²) = C²`; [`beltrami_residual`] evaluates the left
//! side minus `C²` along a parametric curve.

use core::f64::consts::PI;

use crate::geometry::Point;
use crate::metric::Metric;
use crate::{Error, Result};

/// Default distance kept from cusps (cycloid) and from `y = 0` (semicircle).
pub const CUSP_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
pub enum Family {
    /// `(t, a·t + b)`
    Line { a: f64, b: f64 },
    /// `(t, cosh t)`
    Catenary,
    /// `(r(t - sin t), r(1 - cos t))`
    Cycloid { r: f64 },
    /// `(r cos t, r sin t)`
    Semicircle { r: f64 },
    /// `(t, t²/4 + 1)`
    Parabola,
    /// `(t, e^t)`
    Exponential,
    /// Any other curve, given by its position and velocity.
    Custom { name: &'static str, eval: fn(f64) -> Point, deriv: fn(f64) -> Point },
}

#[derive(Debug, Clone, Copy)]
pub struct ParametricCurve {
    pub family: Family,
    pub t_range: (f64, f64),
}

impl ParametricCurve {
    pub fn new(family: Family, t_range: (f64, f64)) -> Result<ParametricCurve> {
        let (t0, t1) = t_range;
        if !(t0.is_finite() && t1.is_finite() && t0 <= t1) {
            return Err(Error::InvalidParams("parameter range must be a finite interval"));
        }
        let ok = match family {
            Family::Line { a, b } => a.is_finite() && b.is_finite(),
            Family::Cycloid { r } | Family::Semicircle { r } => r.is_finite() && r > 0.0,
            _ => true,
        };
        if !ok {
            return Err(Error::InvalidParams("curve parameters out of range"));
        }
        Ok(ParametricCurve { family, t_range })
    }

    /// One arch of the cycloid, keeping [`CUSP_MARGIN`] away from both cusps.
    pub fn cycloid(r: f64) -> Result<ParametricCurve> {
        ParametricCurve::new(Family::Cycloid { r }, (CUSP_MARGIN, 2.0 * PI - CUSP_MARGIN))
    }

    /// Upper half circle, keeping [`CUSP_MARGIN`] away from the axis.
    pub fn semicircle(r: f64) -> Result<ParametricCurve> {
        ParametricCurve::new(Family::Semicircle { r }, (CUSP_MARGIN, PI - CUSP_MARGIN))
    }

    /// `y = sin² x`, a geodesic of a designed metric.
    pub fn sine_squared(t_range: (f64, f64)) -> Result<ParametricCurve> {
        fn eval(t: f64) -> Point {
            let s = libm::sin(t);
            Point::new(t, s * s)
        }
        fn deriv(t: f64) -> Point {
            Point::new(1.0, libm::sin(2.0 * t))
        }
        ParametricCurve::new(Family::Custom { name: "sin^2", eval, deriv }, t_range)
    }

    pub fn eval(&self, t: f64) -> Point {
        match self.family {
            Family::Line { a, b } => Point::new(t, a * t + b),
            Family::Catenary => Point::new(t, libm::cosh(t)),
            Family::Cycloid { r } => Point::new(r * (t - libm::sin(t)), r * (1.0 - libm::cos(t))),
            Family::Semicircle { r } => Point::new(r * libm::cos(t), r * libm::sin(t)),
            Family::Parabola => Point::new(t, 0.25 * t * t + 1.0),
            Family::Exponential => Point::new(t, libm::exp(t)),
            Family::Custom { eval, .. } => eval(t),
        }
    }

    /// `(dx/dt, dy/dt)`.
    pub fn deriv(&self, t: f64) -> Point {
        match self.family {
            Family::Line { a, .. } => Point::new(1.0, a),
            Family::Catenary => Point::new(1.0, libm::sinh(t)),
            Family::Cycloid { r } => Point::new(r * (1.0 - libm::cos(t)), r * libm::sin(t)),
            Family::Semicircle { r } => Point::new(-r * libm::sin(t), r * libm::cos(t)),
            Family::Parabola => Point::new(1.0, 0.5 * t),
            Family::Exponential => Point::new(1.0, libm::exp(t)),
            Family::Custom { deriv, .. } => deriv(t),
        }
    }

    /// `n ≥ 2` equally spaced parameters covering `t_range`.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let (t0, t1) = self.t_range;
        let last = n.saturating_sub(1).max(1) as f64;
        (0..n).map(move |i| t0 + (t1 - t0) * i as f64 / last)
    }
}

/// Convenience constructor mirroring [`ParametricCurve::new`].
pub fn make_curve(family: Family, t_range: (f64, f64)) -> Result<ParametricCurve> {
    ParametricCurve::new(family, t_range)
}

/// Fitted Beltrami constant and worst deviation from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeltramiCheck {
    pub c_squared: f64,
    pub max_residual: f64,
}

/// `g(y)²·dx² / (dx² + dy²)`, the squared Beltrami quantity of the curve at `t`.
pub fn beltrami_lhs(curve: &ParametricCurve, metric: &Metric, t: f64) -> Result<f64> {
    let p = curve.eval(t);
    let d = curve.deriv(t);
    let speed2 = d.x * d.x + d.y * d.y;
    if speed2 == 0.0 {
        return Err(Error::DegenerateTangent { t });
    }
    let g = metric.eval_g(p.y)?;
    Ok(g * g * d.x * d.x / speed2)
}

/// Residual of the first integral for the power-law metric `y^α`.
///
/// Only the direction of the tangent enters, so the residual does not change
/// under monotone reparameterization of the curve.
pub fn beltrami_residual(curve: &ParametricCurve, alpha: f64, t: f64, c_squared: f64) -> Result<f64> {
    let p = curve.eval(t);
    let d = curve.deriv(t);
    let speed2 = d.x * d.x + d.y * d.y;
    if speed2 == 0.0 {
        return Err(Error::DegenerateTangent { t });
    }
    let weight2 = if alpha == 0.0 { 1.0 } else { libm::pow(p.y, 2.0 * alpha) };
    Ok(weight2 * d.x * d.x / speed2 - c_squared)
}

/// Fits `C²` as the mean Beltrami quantity over `n_samples` grid points.
pub fn fit_constant(curve: &ParametricCurve, alpha: f64, n_samples: usize) -> Result<BeltramiCheck> {
    fit_with(curve, n_samples, |t| beltrami_residual(curve, alpha, t, 0.0))
}

/// As [`fit_constant`], for an arbitrary metric.
pub fn fit_constant_for(curve: &ParametricCurve, metric: &Metric, n_samples: usize) -> Result<BeltramiCheck> {
    fit_with(curve, n_samples, |t| beltrami_lhs(curve, metric, t))
}

fn fit_with(curve: &ParametricCurve, n_samples: usize, lhs: impl Fn(f64) -> Result<f64>) -> Result<BeltramiCheck> {
    if n_samples < 3 {
        return Err(Error::InvalidParams("need at least three samples"));
    }
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for t in curve.grid(n_samples) {
        let v = lhs(t)?;
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let c_squared = sum / n_samples as f64;
    let max_residual = (hi - c_squared).max(c_squared - lo);
    Ok(BeltramiCheck { c_squared, max_residual })
}
