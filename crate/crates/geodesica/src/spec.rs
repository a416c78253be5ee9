// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Metric specs: `power:ALPHA`, `recipsin:A`, `designed:EXPR` and `sampled:PATH`.

use std::path::Path;
use std::sync::Arc;

use geodesica_core::Metric;
use thiserror::Error;

use crate::expr::{Expr, ParseError};
use crate::io;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("metric spec '{0}' has no 'kind:' prefix (expected power:, recipsin:, designed: or sampled:)")]
    MissingKind(String),
    #[error("unknown metric kind '{0}'")]
    UnknownKind(String),
    #[error("bad number '{0}' in metric spec")]
    BadNumber(String),
    #[error("bad expression: {0}")]
    Expr(#[from] ParseError),
    #[error(transparent)]
    Metric(#[from] geodesica_core::Error),
    #[error("reading samples: {0}")]
    Samples(#[from] io::FormatError),
}

/// Parses a metric spec.
///
/// The weight of a `designed:` spec is the expression itself, for example
/// `designed:sqrt(1+y^4)`.
pub fn parse_metric(spec: &str) -> Result<Metric, SpecError> {
    let spec = spec.trim();
    let Some((kind, arg)) = spec.split_once(':') else {
        return Err(SpecError::MissingKind(spec.to_owned()));
    };
    let arg = unquote(arg.trim());
    match kind.trim() {
        "power" => Ok(Metric::power_law(number(arg)?)?),
        "recipsin" => Ok(Metric::reciprocal_sine(number(arg)?)?),
        "designed" => {
            let expr = Expr::parse(arg)?;
            Ok(Metric::from_weight(expr.source().to_owned(), Arc::new(expr)))
        }
        "sampled" => {
            let samples = io::read_samples(Path::new(arg))?;
            Ok(Metric::sampled(arg, &samples)?)
        }
        other => Err(SpecError::UnknownKind(other.to_owned())),
    }
}

fn number(s: &str) -> Result<f64, SpecError> {
    s.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| SpecError::BadNumber(s.to_owned()))
}

fn unquote(s: &str) -> &str {
    for q in ['"', '\''] {
        if let Some(inner) = s.strip_prefix(q).and_then(|s| s.strip_suffix(q)) {
            return inner;
        }
    }
    s
}
