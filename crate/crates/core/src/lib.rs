// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Geodesics in a half-plane whose metric depends only on the height `y`.
//!
//! Every problem handled here minimizes a path functional of the form
//! `∫ g(y) ds`. The straight line (`g = 1`), the catenary (`g = y`), the
//! brachistochrone (`g = y^-1/2`) and hyperbolic geodesics (`g = 1/y`) are all
//! members of the power-law family `g = y^α`; the crate also supports
//! reciprocal-sine media, metrics designed from a slope law, and sampled
//! profiles.
//!
//! Because `g` has no `x` dependence, the quantity `g(y)·sin θ` (with `θ`
//! measured from the vertical) is conserved along every geodesic. Two
//! independent solvers exploit this:
//!
//! - [`ode`] integrates the geodesic in arclength with fixed-step RK4.
//! - [`ray`] traces a light ray through a stack of constant-velocity layers,
//!   applying Snell's law at every interface.
//!
//! [`solver`] builds two-point boundary value solving on top of either
//! engine, and evaluates the path functionals.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod curves;
mod error;
pub mod geometry;
pub mod metric;
pub mod ode;
pub mod ray;
pub mod solver;

pub use error::Error;
pub use geometry::{Engine, Point, Polyline, Termination, TraceMeta, Vertical};
pub use metric::{Metric, PhysicalConstants, ScalarFn};

pub type Result<T, E = Error> = core::result::Result<T, E>;
