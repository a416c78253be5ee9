// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Vertical metrics `g(y)` and their propagation speeds `v(y) = 1/g(y)`.
//!
//! Four kinds are supported:
//!
//! - power law, `g = y^α`;
//! - reciprocal sine, `g = 1/sin(a(1 - y))`, which changes sign across its poles;
//! - designed, either `g = C·√(1 + h(y)²)` built from a slope law `y' = h(y)`,
//!   or an arbitrary weight function;
//! - sampled, piecewise-linear through `(y, g)` pairs.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::{Error, Result};

/// A real function of the height, with its first derivative.
///
/// Closures get a central-difference derivative; implementors that know the
/// derivative exactly should override [`ScalarFn::derivative`].
pub trait ScalarFn: Send + Sync {
    fn eval(&self, y: f64) -> f64;

    fn derivative(&self, y: f64) -> f64 {
        let h = 1e-5 * y.abs().max(1.0);
        (self.eval(y + h) - self.eval(y - h)) / (2.0 * h)
    }
}

impl<F> ScalarFn for F
where
    F: Fn(f64) -> f64 + Send + Sync,
{
    fn eval(&self, y: f64) -> f64 {
        self(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    PowerLaw,
    ReciprocalSine,
    Designed,
    Sampled,
}

#[derive(Clone)]
enum Profile {
    PowerLaw {
        alpha: f64,
    },
    ReciprocalSine {
        a: f64,
    },
    /// `g = scale·√(1 + h(y)²)`.
    Slope {
        h: Arc<dyn ScalarFn>,
        scale: f64,
    },
    Weight(Arc<dyn ScalarFn>),
    Sampled {
        ys: Arc<[f64]>,
        gs: Arc<[f64]>,
    },
}

/// A weight function `g(y)` on an open interval of heights.
///
/// Cloning is cheap; user functions and samples are shared.
#[derive(Clone)]
pub struct Metric {
    profile: Profile,
    lower: f64,
    upper: f64,
    label: String,
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric")
            .field("spec", &format_args!("{self}"))
            .field("domain", &(self.lower, self.upper))
            .finish()
    }
}

/// Renders the metric in the `kind:ARG` spec grammar.
impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.profile {
            Profile::PowerLaw { alpha } => write!(f, "power:{alpha}"),
            Profile::ReciprocalSine { a } => write!(f, "recipsin:{a}"),
            Profile::Slope { .. } | Profile::Weight(_) => write!(f, "designed:{}", self.label),
            Profile::Sampled { .. } => write!(f, "sampled:{}", self.label),
        }
    }
}

impl Metric {
    /// `g(y) = y^α`. The domain is the whole line for `α = 0` and `y > 0` otherwise.
    pub fn power_law(alpha: f64) -> Result<Metric> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParams("power-law exponent must be finite"));
        }
        let lower = if alpha == 0.0 { f64::NEG_INFINITY } else { 0.0 };
        Ok(Metric { profile: Profile::PowerLaw { alpha }, lower, upper: f64::INFINITY, label: String::new() })
    }

    /// `g(y) = 1/sin(a(1 - y))` on `0 < y < 1`.
    ///
    /// The sign of the weight is kept; see [`Metric::poles`] for where it blows up.
    pub fn reciprocal_sine(a: f64) -> Result<Metric> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParams("reciprocal-sine frequency must be positive"));
        }
        Ok(Metric { profile: Profile::ReciprocalSine { a }, lower: 0.0, upper: 1.0, label: String::new() })
    }

    /// Metric for which every curve with slope law `y' = h(y)` is a geodesic
    /// with Beltrami constant `scale`: `g(y) = scale·√(1 + h(y)²)`.
    pub fn designed(h: impl ScalarFn + 'static, scale: f64) -> Result<Metric> {
        Metric::designed_arc(Arc::new(h), scale)
    }

    pub fn designed_arc(h: Arc<dyn ScalarFn>, scale: f64) -> Result<Metric> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParams("designed metric scale must be positive"));
        }
        Ok(Metric {
            profile: Profile::Slope { h, scale },
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            label: String::from("slope"),
        })
    }

    /// A designed metric given directly by its weight function.
    pub fn from_weight(label: impl Into<String>, g: Arc<dyn ScalarFn>) -> Metric {
        Metric { profile: Profile::Weight(g), lower: f64::NEG_INFINITY, upper: f64::INFINITY, label: label.into() }
    }

    /// Piecewise-linear metric through `(y, g)` samples with strictly increasing `y`.
    pub fn sampled(label: impl Into<String>, samples: &[(f64, f64)]) -> Result<Metric> {
        if samples.len() < 2 {
            return Err(Error::InvalidParams("sampled metric needs at least two samples"));
        }
        if samples.iter().any(|(y, g)| !y.is_finite() || !g.is_finite()) {
            return Err(Error::InvalidParams("sampled metric values must be finite"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParams("sampled heights must be strictly increasing"));
        }
        let ys: Arc<[f64]> = samples.iter().map(|s| s.0).collect();
        let gs: Arc<[f64]> = samples.iter().map(|s| s.1).collect();
        Ok(Metric { lower: ys[0], upper: ys[ys.len() - 1], profile: Profile::Sampled { ys, gs }, label: label.into() })
    }

    /// Restricts (or widens) the open domain of validity.
    pub fn with_domain(mut self, lower: f64, upper: f64) -> Result<Metric> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidParams("domain must be a non-empty interval"));
        }
        if let Profile::PowerLaw { alpha } = self.profile {
            if alpha < 0.0 && lower < 0.0 {
                return Err(Error::InvalidParams("negative exponents need y > 0"));
            }
        }
        self.lower = lower;
        self.upper = upper;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Metric {
        self.label = label.into();
        self
    }

    pub fn kind(&self) -> MetricKind {
        match self.profile {
            Profile::PowerLaw { .. } => MetricKind::PowerLaw,
            Profile::ReciprocalSine { .. } => MetricKind::ReciprocalSine,
            Profile::Slope { .. } | Profile::Weight(_) => MetricKind::Designed,
            Profile::Sampled { .. } => MetricKind::Sampled,
        }
    }

    /// The power-law exponent, if this is a power-law metric.
    pub fn alpha(&self) -> Option<f64> {
        match self.profile {
            Profile::PowerLaw { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn contains(&self, y: f64) -> bool {
        y > self.lower && y < self.upper
    }

    pub fn spec(&self) -> String {
        format!("{self}")
    }

    fn check_domain(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { y, lower: self.lower, upper: self.upper })
        }
    }

    /// Signed weight `g(y)`.
    ///
    /// Reciprocal-sine metrics may return negative values; use
    /// [`Metric::eval_g_positive`] where a positive weight is required.
    pub fn eval_g(&self, y: f64) -> Result<f64> {
        self.check_domain(y)?;
        let g = match &self.profile {
            Profile::PowerLaw { alpha } => power(y, *alpha),
            Profile::ReciprocalSine { a } => {
                let s = libm::sin(a * (1.0 - y));
                if s == 0.0 {
                    return Err(Error::Pole { y });
                }
                1.0 / s
            }
            Profile::Slope { h, scale } => {
                let slope = h.eval(y);
                scale * libm::sqrt(1.0 + slope * slope)
            }
            Profile::Weight(g) => g.eval(y),
            Profile::Sampled { ys, gs } => interpolate(ys, gs, y).0,
        };
        if g.is_nan() {
            return Err(Error::OutOfDomain { y, lower: self.lower, upper: self.upper });
        }
        if g.is_infinite() {
            return Err(Error::Pole { y });
        }
        Ok(g)
    }

    /// Like [`Metric::eval_g`] but rejects `g(y) <= 0`.
    pub fn eval_g_positive(&self, y: f64) -> Result<f64> {
        let g = self.eval_g(y)?;
        if g <= 0.0 {
            return Err(Error::NonPositiveWeight { y, weight: g });
        }
        Ok(g)
    }

    /// Signed propagation speed `1/g(y)`; zero at a pole of the weight.
    pub fn velocity(&self, y: f64) -> Result<f64> {
        Ok(self.velocity_slope(y)?.0)
    }

    /// Speed `v(y)` together with `dv/dy`.
    ///
    /// For power-law and reciprocal-sine metrics both are evaluated in closed
    /// form, which stays finite across the poles of the weight.
    pub fn velocity_slope(&self, y: f64) -> Result<(f64, f64)> {
        self.check_domain(y)?;
        match &self.profile {
            Profile::PowerLaw { alpha } => {
                if *alpha == 0.0 {
                    return Ok((1.0, 0.0));
                }
                let v = power(y, -alpha);
                Ok((v, -alpha * v / y))
            }
            Profile::ReciprocalSine { a } => {
                let u = a * (1.0 - y);
                Ok((libm::sin(u), -a * libm::cos(u)))
            }
            Profile::Slope { h, scale } => {
                let slope = h.eval(y);
                let root = libm::sqrt(1.0 + slope * slope);
                let g = scale * root;
                let dg = scale * slope * h.derivative(y) / root;
                reciprocal(y, g, dg)
            }
            Profile::Weight(g) => reciprocal(y, g.eval(y), g.derivative(y)),
            Profile::Sampled { ys, gs } => {
                let (g, dg) = interpolate(ys, gs, y);
                reciprocal(y, g, dg)
            }
        }
    }

    /// Heights in `[lo, hi]` where the weight has a pole.
    ///
    /// Only reciprocal-sine metrics have poles: `y = 1 - kπ/a`.
    pub fn poles(&self, lo: f64, hi: f64) -> Vec<f64> {
        let Profile::ReciprocalSine { a } = self.profile else {
            return Vec::new();
        };
        let k_min = libm::ceil((1.0 - hi) * a / PI) as i64;
        let k_max = libm::floor((1.0 - lo) * a / PI) as i64;
        (k_min..=k_max).rev().map(|k| 1.0 - k as f64 * PI / a).collect()
    }
}

/// `g(y) = scale·√(1 + h(y)²)`.
pub fn design_metric(h: impl ScalarFn + 'static, scale: f64) -> Result<Metric> {
    Metric::designed(h, scale)
}

fn power(y: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        y
    } else {
        libm::pow(y, alpha)
    }
}

fn reciprocal(y: f64, g: f64, dg: f64) -> Result<(f64, f64)> {
    if g.is_nan() || dg.is_nan() {
        return Err(Error::Pole { y });
    }
    if g.is_infinite() {
        return Ok((0.0, 0.0));
    }
    if g == 0.0 {
        return Err(Error::ZeroWeight { y });
    }
    Ok((1.0 / g, -dg / (g * g)))
}

/// Value and slope of the piecewise-linear interpolant; at a knot the slope of
/// the segment to the right is used.
fn interpolate(ys: &[f64], gs: &[f64], y: f64) -> (f64, f64) {
    let i = ys.partition_point(|&k| k <= y).clamp(1, ys.len() - 1);
    let (y0, y1) = (ys[i - 1], ys[i]);
    let (g0, g1) = (gs[i - 1], gs[i]);
    let slope = (g1 - g0) / (y1 - y0);
    (g0 + slope * (y - y0), slope)
}

/// Constants that turn the raw functional into a physical quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub gravity: f64,
    pub density: f64,
    /// Prefactor for metrics without a dedicated physical reading.
    pub prefactor: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { gravity: 1.0, density: 1.0, prefactor: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(gravity: f64, density: f64, prefactor: f64) -> Result<Self> {
        if !(gravity > 0.0 && density > 0.0) || !prefactor.is_finite() {
            return Err(Error::InvalidParams("gravity and density must be positive"));
        }
        Ok(PhysicalConstants { gravity, density, prefactor })
    }

    /// Scale applied to `∫ g ds`: `gρ` for the hanging chain (`α = 1`),
    /// `(2g)^-1/2` for the sliding bead (`α = -1/2`), the prefactor otherwise.
    pub fn scale_for(&self, metric: &Metric) -> f64 {
        match metric.alpha() {
            Some(1.0) => self.gravity * self.density,
            Some(-0.5) => 1.0 / libm::sqrt(2.0 * self.gravity),
            _ => self.prefactor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_g_examples() {
        assert_eq!(Metric::power_law(1.0).unwrap().eval_g(2.0).unwrap(), 2.0);
        assert_eq!(Metric::power_law(0.0).unwrap().eval_g(7.3).unwrap(), 1.0);
        let hyperbola = design_metric(|y: f64| y * y, 1.0).unwrap();
        assert!(close(hyperbola.eval_g(1.0).unwrap(), libm::sqrt(2.0), 1e-15));
        assert_eq!(hyperbola.eval_g(0.0).unwrap(), 1.0);
    }

    #[test]
    fn velocity_examples() {
        let brach = Metric::power_law(-0.5).unwrap();
        assert!(close(brach.velocity(4.0).unwrap(), 2.0, 1e-15));
        assert_eq!(Metric::power_law(1.0).unwrap().velocity(2.0).unwrap(), 0.5);
        let v = Metric::reciprocal_sine(4.0).unwrap().velocity(0.05).unwrap();
        assert!(close(v, libm::sin(3.8), 1e-15));
        assert!(close(v, -0.61186, 1e-5));
    }

    #[test]
    fn designed_examples() {
        let flat = design_metric(|_: f64| 0.0, 1.0).unwrap();
        for y in [-3.0, 0.0, 2.5] {
            assert_eq!(flat.eval_g(y).unwrap(), 1.0);
        }
        let exp = design_metric(|y: f64| y, 1.0).unwrap();
        assert!(close(exp.eval_g(2.0).unwrap(), 2.23607, 1e-5));
        assert_eq!(exp.kind(), MetricKind::Designed);
    }

    #[test]
    fn domain_errors() {
        let hyp = Metric::power_law(-1.0).unwrap();
        assert!(matches!(hyp.eval_g(0.0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(hyp.eval_g(-1.0), Err(Error::OutOfDomain { .. })));
        assert!(matches!(hyp.velocity(-1.0), Err(Error::OutOfDomain { .. })));
        assert!(hyp.clone().with_domain(-1.0, 1.0).is_err());
        assert!(Metric::power_law(0.0).unwrap().eval_g(-5.0).is_ok());
        assert!(Metric::power_law(f64::NAN).is_err());
        assert!(Metric::reciprocal_sine(0.0).is_err());
    }

    #[test]
    fn reciprocal_sine_signs_and_poles() {
        let m = Metric::reciprocal_sine(4.0).unwrap();
        assert!(m.eval_g(0.05).unwrap() < 0.0);
        assert!(matches!(m.eval_g_positive(0.05), Err(Error::NonPositiveWeight { .. })));
        assert_eq!(m.poles(0.0, 1.0).len(), 2);
        let poles = m.poles(0.0, 0.99);
        assert_eq!(poles.len(), 1);
        assert!(close(poles[0], 1.0 - PI / 4.0, 1e-15));
        assert!(Metric::reciprocal_sine(3.0).unwrap().poles(0.0, 0.999).is_empty());
        // The speed is finite and zero at the pole itself.
        let (v, dv) = m.velocity_slope(poles[0]).unwrap();
        assert!(v.abs() < 1e-15);
        assert!(close(dv, -4.0 * libm::cos(PI), 1e-12));
    }

    #[test]
    fn zero_weight_is_reported() {
        let m = Metric::from_weight("y", Arc::new(|y: f64| y));
        assert!(matches!(m.velocity(0.0), Err(Error::ZeroWeight { .. })));
        let pole = Metric::from_weight("1/y", Arc::new(|y: f64| 1.0 / y));
        assert!(matches!(pole.eval_g(0.0), Err(Error::Pole { .. })));
        assert_eq!(pole.velocity(0.0).unwrap(), 0.0);
    }

    #[test]
    fn sampled_interpolation() {
        let m = Metric::sampled("t", &[(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)]).unwrap();
        assert!(close(m.eval_g(0.5).unwrap(), 2.0, 1e-15));
        assert!(close(m.eval_g(1.5).unwrap(), 2.5, 1e-15));
        let (v, dv) = m.velocity_slope(0.5).unwrap();
        assert!(close(v, 0.5, 1e-15));
        assert!(close(dv, -2.0 / 4.0, 1e-15));
        assert!(m.eval_g(2.0).is_err());
        assert!(Metric::sampled("bad", &[(0.0, 1.0)]).is_err());
        assert!(Metric::sampled("bad", &[(0.0, 1.0), (0.0, 2.0)]).is_err());
        assert_eq!(m.spec(), "sampled:t");
    }

    #[test]
    fn velocity_slope_matches_finite_differences() {
        let metrics = vec![
            Metric::power_law(-0.5).unwrap(),
            Metric::power_law(1.0).unwrap(),
            Metric::power_law(-4.0).unwrap(),
            Metric::reciprocal_sine(2.5).unwrap(),
            design_metric(|y: f64| y * y, 1.3).unwrap(),
        ];
        for m in &metrics {
            for y in [0.2, 0.45, 0.7] {
                let h = 1e-6;
                let fd = (m.velocity(y + h).unwrap() - m.velocity(y - h).unwrap()) / (2.0 * h);
                let (_, dv) = m.velocity_slope(y).unwrap();
                assert!(close(dv, fd, 1e-6 * (1.0 + fd.abs())), "{m}: {dv} vs {fd}");
            }
        }
    }

    #[test]
    fn physical_scale() {
        let c = PhysicalConstants::new(9.81, 2.0, 3.0).unwrap();
        assert!(close(c.scale_for(&Metric::power_law(1.0).unwrap()), 19.62, 1e-12));
        assert!(close(c.scale_for(&Metric::power_law(-0.5).unwrap()), 1.0 / libm::sqrt(19.62), 1e-15));
        assert_eq!(c.scale_for(&Metric::power_law(-1.0).unwrap()), 3.0);
        assert!(PhysicalConstants::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        assert_eq!(Metric::power_law(-0.5).unwrap().spec(), "power:-0.5");
        assert_eq!(Metric::reciprocal_sine(4.0).unwrap().spec(), "recipsin:4");
        let m = Metric::from_weight("sqrt(1+y^4)", Arc::new(|y: f64| y));
        assert_eq!(m.spec(), "designed:sqrt(1+y^4)");
    }
}
