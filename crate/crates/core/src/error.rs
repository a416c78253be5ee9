// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

use core::fmt;

/// Errors reported by the geodesic machinery.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `y` lies outside the open domain of the metric.
    OutOfDomain { y: f64, lower: f64, upper: f64 },
    /// The weight evaluated to zero or below where a positive weight is required.
    NonPositiveWeight { y: f64, weight: f64 },
    /// The weight is exactly zero, so the propagation speed is undefined.
    ZeroWeight { y: f64 },
    /// The weight is infinite or not a number at `y`.
    Pole { y: f64 },
    /// A metric or curve was constructed from invalid parameters.
    InvalidParams(&'static str),
    /// `dx² + dy² = 0` at the requested curve parameter.
    DegenerateTangent { t: f64 },
    /// `|C / g(y)| > 1`: no real direction carries this Beltrami constant at `y`.
    NoRealTangent { y: f64, ratio: f64 },
    /// The ray start point is not inside the layer stack.
    StartOutsideStack { y: f64 },
    /// The polyline has fewer than two points or a point with `y <= 0`.
    NonPositiveY { y: f64 },
    /// No launch angle produced a sign change of the endpoint miss.
    NoBracket,
    /// Bisection ran out of iterations before the miss dropped below tolerance.
    NonConvergence { iterations: usize, miss: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfDomain { y, lower, upper } => {
                write!(f, "y = {y} is outside the metric domain ({lower}, {upper})")
            }
            Error::NonPositiveWeight { y, weight } => {
                write!(f, "non-positive weight {weight} at y = {y}")
            }
            Error::ZeroWeight { y } => write!(f, "zero weight at y = {y}"),
            Error::Pole { y } => write!(f, "metric pole at y = {y}"),
            Error::InvalidParams(what) => write!(f, "invalid parameters: {what}"),
            Error::DegenerateTangent { t } => write!(f, "degenerate tangent at t = {t}"),
            Error::NoRealTangent { y, ratio } => {
                write!(f, "no real tangent at y = {y}: |C/g| = {ratio} > 1")
            }
            Error::StartOutsideStack { y } => write!(f, "start height {y} is outside the layer stack"),
            Error::NonPositiveY { y } => write!(f, "polyline reaches y = {y} <= 0"),
            Error::NoBracket => f.write_str("no launch angle brackets the target endpoint"),
            Error::NonConvergence { iterations, miss } => {
                write!(f, "shooting did not converge after {iterations} iterations (miss {miss})")
            }
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::ZeroWeight { .. } => "ZeroWeight",
            Error::Pole { .. } => "Pole",
            Error::InvalidParams(_) => "InvalidParams",
            Error::DegenerateTangent { .. } => "DegenerateTangent",
            Error::NoRealTangent { .. } => "NoRealTangent",
            Error::StartOutsideStack { .. } => "StartOutsideStack",
            Error::NonPositiveY { .. } => "NonPositiveY",
            Error::NoBracket => "NoBracket",
            Error::NonConvergence { .. } => "NonConvergence",
        }
    }
}
