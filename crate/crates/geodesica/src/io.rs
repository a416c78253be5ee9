// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! Polyline files: CSV (`x,y`), a self-describing JSON envelope, and SVG plots.
//!
//! Coordinates are written with 12 significant digits. Reading a file back and
//! writing it again reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use geodesica_core::{Engine, Point, Polyline, Termination, TraceMeta};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("expected header '{expected}', found '{found}'")]
    Header { expected: &'static str, found: String },
    #[error("unknown {field} '{value}'")]
    Unknown { field: &'static str, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// `v` rounded to 12 significant digits.
pub fn canonical(v: f64) -> f64 {
    if !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

/// Shortest text that reads back as `canonical(v)`.
pub fn format_number(v: f64) -> String {
    format!("{:?}", canonical(v))
}

/// The polyline as it reads back from a file.
pub fn canonicalize(line: &Polyline) -> Polyline {
    let points = line.points.iter().map(|p| Point::new(canonical(p.x), canonical(p.y))).collect();
    let meta = TraceMeta { c: canonical(line.meta.c), ..line.meta.clone() };
    Polyline::new(points, meta)
}

pub fn write_csv<W: Write>(points: &[Point], out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y"])?;
    for p in points {
        w.write_record([format_number(p.x), format_number(p.y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(points: &[Point]) -> String {
    let mut buf = Vec::new();
    write_csv(points, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn read_pairs<R: Read>(input: R, header: [&'static str; 2]) -> Result<Vec<(f64, f64)>, FormatError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let found = r.headers()?.iter().collect::<Vec<_>>().join(",");
    let expected = if header[0] == "x" { "x,y" } else { "y,g" };
    if found != expected {
        return Err(FormatError::Header { expected, found });
    }
    let mut pairs = Vec::new();
    for record in r.deserialize() {
        pairs.push(record?);
    }
    Ok(pairs)
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Point>, FormatError> {
    Ok(read_pairs(input, ["x", "y"])?.into_iter().map(|(x, y)| Point::new(x, y)).collect())
}

/// `(y, g)` samples of a tabulated metric.
pub fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, FormatError> {
    read_pairs(fs::File::open(path)?, ["y", "g"])
}

pub fn write_samples<W: Write>(samples: &[(f64, f64)], out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "g"])?;
    for &(y, g) in samples {
        w.write_record([format_number(y), format_number(g)])?;
    }
    w.flush()?;
    Ok(())
}

/// The JSON form of a polyline, or of a failed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub metric: String,
    pub engine: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub termination: Option<String>,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Stable error code such as `NoBracket`.
    pub reason: String,
    pub message: String,
}

impl Envelope {
    pub fn from_polyline(line: &Polyline) -> Envelope {
        let line = canonicalize(line);
        Envelope {
            metric: line.meta.metric.clone(),
            engine: line.meta.engine.as_str().to_owned(),
            c: Some(line.meta.c),
            termination: Some(line.meta.termination.as_str().to_owned()),
            points: line.points.iter().map(|p| [p.x, p.y]).collect(),
            error: None,
        }
    }

    pub fn failure(metric: &str, engine: Engine, error: &geodesica_core::Error) -> Envelope {
        Envelope {
            metric: metric.to_owned(),
            engine: engine.as_str().to_owned(),
            c: None,
            termination: None,
            points: Vec::new(),
            error: Some(Failure { reason: error.code().to_owned(), message: error.to_string() }),
        }
    }

    pub fn to_polyline(&self) -> Result<Polyline, FormatError> {
        let unknown = |field, value: &str| FormatError::Unknown { field, value: value.to_owned() };
        let engine = Engine::parse(&self.engine).ok_or_else(|| unknown("engine", &self.engine))?;
        let termination = self.termination.as_deref().unwrap_or("");
        let termination = Termination::parse(termination).ok_or_else(|| unknown("termination", termination))?;
        let meta = TraceMeta { metric: self.metric.clone(), engine, c: self.c.unwrap_or(f64::NAN), termination };
        Ok(Polyline::new(self.points.iter().map(|&[x, y]| Point::new(x, y)).collect(), meta))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

pub fn json_string(line: &Polyline) -> String {
    Envelope::from_polyline(line).to_json()
}

pub fn read_json<R: Read>(input: R) -> Result<Polyline, FormatError> {
    let envelope: Envelope = serde_json::from_reader(input)?;
    envelope.to_polyline()
}

/// One curve of an SVG plot.
#[derive(Debug, Clone)]
pub struct Series<'a> {
    pub label: String,
    pub points: &'a [Point],
    pub color: &'static str,
    pub width: f64,
}

impl<'a> Series<'a> {
    pub fn new(label: impl Into<String>, points: &'a [Point]) -> Series<'a> {
        Series { label: label.into(), points, color: "black", width: 1.5 }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
/// Plotted vertices per curve; longer polylines are thinned evenly.
const MAX_PLOTTED: usize = 4000;

/// Renders the curves with axes and a legend, keeping the aspect ratio 1:1.
pub fn svg_string(series: &[Series<'_>], y_label: &str) -> String {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in series.iter().flat_map(|s| s.points).filter(|p| p.x.is_finite() && p.y.is_finite()) {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !(lo.x <= hi.x) {
        lo = Point::new(0.0, 0.0);
        hi = Point::new(1.0, 1.0);
    }
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let scale = ((WIDTH - 2.0 * MARGIN) / span).min((HEIGHT - 2.0 * MARGIN) / span);
    let sx = |x: f64| MARGIN + (x - lo.x) * scale;
    let sy = |y: f64| HEIGHT - MARGIN - (y - lo.y) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (sx(lo.x), sx(hi.x), sy(lo.y), sy(hi.y));
    let _ = writeln!(
        s,
        r#"<g stroke="gray" stroke-width="1"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11" fill="gray">"#);
    let _ = writeln!(s, r#"<text x="{x0:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(lo.x));
    let _ = writeln!(s, r#"<text x="{x1:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 16.0, tick(hi.x));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{y0:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, tick(lo.y));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{y1:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, tick(hi.y));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">x</text>"#, (x0 + x1) / 2.0, y0 + 30.0);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        x0 - 30.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    let _ = writeln!(s, "</g>");

    for (k, series) in series.iter().enumerate() {
        let stride = series.points.len().div_ceil(MAX_PLOTTED).max(1);
        let mut path = String::new();
        let n = series.points.len();
        for (i, p) in series.points.iter().enumerate() {
            if i % stride != 0 && i + 1 != n {
                continue;
            }
            let _ = write!(path, "{}{:.2},{:.2}", if path.is_empty() { "M" } else { " L" }, sx(p.x), sy(p.y));
        }
        let _ = writeln!(
            s,
            r#"<path d="{path}" fill="none" stroke="{}" stroke-width="{}"><title>{}</title></path>"#,
            series.color,
            series.width,
            escape(&series.label)
        );
        let ly = MARGIN / 2.0 + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11" fill="{}" text-anchor="end">{}</text>"#,
            WIDTH - 8.0,
            series.color,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders one polyline in `format`.
pub fn render(line: &Polyline, format: Format) -> String {
    match format {
        Format::Csv => csv_string(&line.points),
        Format::Json => json_string(line),
        Format::Svg => {
            let label = format!("{} ({}, C = {})", line.meta.metric, line.meta.engine, format_number(line.meta.c));
            svg_string(&[Series::new(label, &line.points)], "y")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Polyline {
        let points = vec![Point::new(0.0, 1.0), Point::new(0.1, 1.0 / 3.0), Point::new(1e-7, -2.5e12)];
        let meta = TraceMeta {
            metric: "power:-1".into(),
            engine: Engine::Ray,
            c: 0.6180339887498949,
            termination: Termination::XSpan,
        };
        Polyline::new(points, meta)
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(1f64.cosh()), "1.54308063482");
        assert_eq!(format_number(2.0), "2.0");
        assert_eq!(format_number(-2.5e12), "-2500000000000.0");
        assert_eq!(format_number(1.234567890123456e-7), "1.23456789012e-7");
    }

    #[test]
    fn csv_round_trip() {
        let line = line();
        let text = csv_string(&line.points);
        assert!(text.starts_with("x,y\n0.0,1.0\n"));
        let back = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, canonicalize(&line).points);
        assert_eq!(csv_string(&back), text);
    }

    #[test]
    fn json_round_trip() {
        let line = line();
        let text = json_string(&line);
        let back = read_json(text.as_bytes()).unwrap();
        assert_eq!(back, canonicalize(&line));
        assert_eq!(json_string(&back), text);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["C"], 0.61803398875);
        assert_eq!(v["termination"], "x-span");
        assert_eq!(v["points"][1][1], 0.333333333333);
    }

    #[test]
    fn failure_envelope() {
        let text = Envelope::failure("power:1", Engine::Ode, &geodesica_core::Error::NoBracket).to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["error"]["reason"], "NoBracket");
        assert!(v["C"].is_null());
        assert_eq!(v["points"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(read_csv("a,b\n1,2\n".as_bytes()), Err(FormatError::Header { .. })));
        assert!(read_csv("x,y\n1,oops\n".as_bytes()).is_err());
    }

    #[test]
    fn svg_has_every_curve() {
        let a = [Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        let b = [Point::new(0.0, 1.0), Point::new(1.0, 0.0)];
        let mut red = Series::new("b <red>", &b);
        red.color = "red";
        let s = svg_string(&[Series::new("a", &a), red], "1 - y");
        assert_eq!(s.matches("<path").count(), 2);
        assert!(s.contains("stroke=\"red\""));
        assert!(s.contains("b &lt;red&gt;"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}
