// Copyright 2026 the Geodesica Authors
// SPDX-License-Identifier: Apache-2.0 OR MIT

//! The `geodesica` command line.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 when the solver
//! fails. Solver failures print a JSON envelope whose `error.reason` names the
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use geodesica_core::curves::{fit_constant, Family, ParametricCurve};
use geodesica_core::ode::{integrate, GeodesicProblem};
use geodesica_core::ray::{build_stack, trace};
use geodesica_core::solver::{shoot, BoundaryProblem};
use geodesica_core::{Engine, Metric, Point, Polyline, Vertical};

use crate::expr::Expr;
use crate::figures::{self, Figure};
use crate::io::{self, Envelope, Format, Series};
use crate::spec::parse_metric;

#[derive(Debug, Parser)]
#[command(name = "geodesica", version, about = "Geodesics of metrics g(y)·ds in the half-plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the boundary problem between two points.
    Solve(SolveArgs),
    /// Trace a geodesic from a start point and launch angle.
    Trace(TraceArgs),
    /// Check the closed-form geodesics against the Beltrami identity.
    Verify(VerifyArgs),
    /// Write the geodesic families of figures 4 and 5.
    Figures(FiguresArgs),
    /// Build the metric that makes a slope law `y' = h(y)` geodesic.
    Design(DesignArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Ode,
    Ray,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Ode => Engine::Ode,
            EngineArg::Ray => Engine::Ray,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Svg => Format::Svg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    Up,
    Down,
}

/// A comma-separated pair such as `-0.6,0.8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Pair, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got '{s}'"))?;
        let num =
            |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad number '{t}'"));
        Ok(Pair(num(a)?, num(b)?))
    }
}

impl From<Pair> for Point {
    fn from(p: Pair) -> Point {
        Point::new(p.0, p.1)
    }
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format; guessed from the --out extension, CSV otherwise.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write 1 - y instead of y.
    #[arg(long)]
    pub flip_axis: bool,
}

impl Output {
    fn format(&self) -> Format {
        self.format.map(Format::from).or_else(|| self.out.as_deref().and_then(Format::from_path)).unwrap_or(Format::Csv)
    }

    fn emit(&self, line: &Polyline) -> anyhow::Result<()> {
        let line = if self.flip_axis { line.flip_axis() } else { line.clone() };
        write_text(self.out.as_deref(), &io::render(&line, self.format()))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Metric spec: power:ALPHA, recipsin:A, designed:EXPR or sampled:PATH.
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Pair,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Pair,
    #[arg(long, value_enum, default_value = "ode")]
    pub engine: EngineArg,
    /// Arclength step of the ODE engine.
    #[arg(long, default_value_t = 1e-3)]
    pub ds: f64,
    /// Layer count of the ray engine.
    #[arg(long, default_value_t = 10_000)]
    pub layers: usize,
    /// Tolerance on the endpoint miss.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub metric: String,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Pair,
    /// Sine of the launch angle to the vertical; its sign picks the x direction.
    #[arg(long, allow_hyphen_values = true)]
    pub sin: f64,
    #[arg(long, value_enum, default_value = "up")]
    pub dir: DirArg,
    #[arg(long, value_enum, default_value = "ray")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 1e-3)]
    pub ds: f64,
    #[arg(long, default_value_t = 10_000)]
    pub layers: usize,
    /// Layer stack extent LO,HI; defaults to two units around the start, clipped to the metric domain.
    #[arg(long, allow_hyphen_values = true)]
    pub stack: Option<Pair>,
    /// Arclength budget of the ODE engine.
    #[arg(long, default_value_t = 10.0)]
    pub max_length: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Samples per curve.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureArg {
    Fig4,
    Fig5,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(value_enum)]
    pub which: FigureArg,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Format of the per-curve files.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long, default_value_t = figures::DEFAULT_LAYERS)]
    pub layers: usize,
    /// Also write one SVG overlaying every curve.
    #[arg(long)]
    pub overlay: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Slope law h(y) as an expression in y.
    #[arg(long, allow_hyphen_values = true)]
    pub slope: String,
    /// The constant C in g(y) = C·√(1 + h(y)²).
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Tabulate g on LO,HI and write `y,g` samples to --out.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<Pair>,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn execute(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Solve(args) => solve(args),
        Command::Trace(args) => trace_cmd(args),
        Command::Verify(args) => verify(args),
        Command::Figures(args) => figures_cmd(args),
        Command::Design(args) => design(args),
    }
}

fn metric(spec: &str) -> anyhow::Result<Metric> {
    parse_metric(spec).with_context(|| format!("metric '{spec}'"))
}

fn write_text(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                // A reader such as `head` closing early is not an error.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

/// Reports a solver failure on standard output and returns exit code 2.
fn failure(metric: &Metric, engine: Engine, error: &geodesica_core::Error) -> i32 {
    print!("{}", Envelope::failure(&metric.spec(), engine, error).to_json());
    eprintln!("error: {error}");
    2
}

fn solve(args: SolveArgs) -> anyhow::Result<i32> {
    let m = metric(&args.metric)?;
    let (p1, p2) = (args.from.into(), args.to.into());
    let problem = match args.engine {
        EngineArg::Ode => BoundaryProblem::ode(m.clone(), p1, p2, args.ds),
        EngineArg::Ray => BoundaryProblem::ray(m.clone(), p1, p2, args.layers),
    }
    .with_tolerance(args.tol);
    match shoot(&problem) {
        Ok(result) => {
            args.output.emit(&result.polyline)?;
            eprintln!(
                "C = {}, launch angle = {}, miss = {:e}, iterations = {}",
                io::format_number(result.c),
                io::format_number(result.launch_angle),
                result.miss,
                result.iterations
            );
            Ok(0)
        }
        Err(e @ geodesica_core::Error::InvalidParams(_)) => bail!("{e}"),
        Err(e) => Ok(failure(&m, args.engine.into(), &e)),
    }
}

fn trace_cmd(args: TraceArgs) -> anyhow::Result<i32> {
    let m = metric(&args.metric)?;
    let start: Point = args.start.into();
    let vertical = match args.dir {
        DirArg::Up => Vertical::Up,
        DirArg::Down => Vertical::Down,
    };
    if !(args.sin.abs() <= 1.0) {
        bail!("--sin must lie in [-1, 1]");
    }
    let result = match args.engine {
        EngineArg::Ray => {
            let (lo, hi) = match args.stack {
                Some(Pair(lo, hi)) => (lo, hi),
                None => {
                    let (dlo, dhi) = m.domain();
                    ((start.y - 2.0).max(dlo), (start.y + 2.0).min(dhi))
                }
            };
            build_stack(&m, lo, hi, args.layers)
                .and_then(|stack| trace(&stack, start, args.sin, vertical, 8 * args.layers))
                .map(|ray| ray.polyline)
        }
        EngineArg::Ode => m.velocity(start.y).and_then(|v| {
            let problem = GeodesicProblem::new(m.clone(), args.sin / v, start, vertical)
                .with_step(args.ds)
                .with_max_arclength(args.max_length);
            integrate(&problem)
        }),
    };
    match result {
        Ok(line) => {
            args.output.emit(&line)?;
            eprintln!(
                "termination = {}, C = {}, vertices = {}",
                line.meta.termination,
                io::format_number(line.meta.c),
                line.len()
            );
            Ok(0)
        }
        Err(e @ (geodesica_core::Error::InvalidParams(_) | geodesica_core::Error::StartOutsideStack { .. })) => {
            bail!("{e}")
        }
        Err(e) => Ok(failure(&m, args.engine.into(), &e)),
    }
}

/// One row of the verification table.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub name: &'static str,
    pub metric: &'static str,
    pub expected: f64,
    pub c_squared: f64,
    pub max_residual: f64,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.max_residual < 1e-9 && (self.c_squared - self.expected).abs() < 1e-6
    }
}

/// Fits the Beltrami constant of every closed-form geodesic.
pub fn verify_rows(samples: usize) -> geodesica_core::Result<Vec<VerifyRow>> {
    let rows: [(&'static str, &'static str, ParametricCurve, f64, f64); 5] = [
        ("line a=1", "power:0", ParametricCurve::new(Family::Line { a: 1.0, b: 0.0 }, (-2.0, 2.0))?, 0.0, 0.5),
        ("catenary", "power:1", ParametricCurve::new(Family::Catenary, (-2.0, 2.0))?, 1.0, 1.0),
        ("brachistochrone r=2", "power:-0.5", ParametricCurve::cycloid(2.0)?, -0.5, 0.25),
        ("hyperbolic r=2", "power:-1", ParametricCurve::semicircle(2.0)?, -1.0, 0.25),
        ("parabola", "power:0.5", ParametricCurve::new(Family::Parabola, (-3.0, 3.0))?, 0.5, 1.0),
    ];
    rows.into_iter()
        .map(|(name, metric, curve, alpha, expected)| {
            let fit = fit_constant(&curve, alpha, samples)?;
            Ok(VerifyRow { name, metric, expected, c_squared: fit.c_squared, max_residual: fit.max_residual })
        })
        .collect()
}

fn verify(args: VerifyArgs) -> anyhow::Result<i32> {
    if args.samples < 3 {
        bail!("--samples must be at least 3");
    }
    let rows = verify_rows(args.samples)?;
    println!("{:<22} {:<11} {:>10} {:>10} {:>12}  status", "curve", "metric", "C^2", "expected", "residual");
    let mut ok = true;
    for row in &rows {
        ok &= row.passed();
        println!(
            "{:<22} {:<11} {:>10.6} {:>10.6} {:>12.3e}  {}",
            row.name,
            row.metric,
            row.c_squared,
            row.expected,
            row.max_residual,
            if row.passed() { "ok" } else { "FAIL" }
        );
    }
    Ok(if ok { 0 } else { 1 })
}

fn figures_cmd(args: FiguresArgs) -> anyhow::Result<i32> {
    let figure = match args.which {
        FigureArg::Fig4 => Figure::Fig4,
        FigureArg::Fig5 => Figure::Fig5,
    };
    if args.layers < 2 {
        bail!("--layers must be at least 2");
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let curves = figures::generate(figure, args.layers)?;
    let plotted: Vec<Polyline> =
        curves.iter().map(|c| if figure.flip_axis() { c.polyline.flip_axis() } else { c.polyline.clone() }).collect();
    let format = Format::from(args.format);
    for (curve, line) in curves.iter().zip(&plotted) {
        let path = args.out.join(format!("{}.{}", curve.name, format.extension()));
        write_text(Some(&path), &io::render(line, format))?;
        println!("{}", path.display());
    }
    if args.overlay {
        let series: Vec<Series<'_>> = curves
            .iter()
            .zip(&plotted)
            .map(|(c, line)| Series {
                label: c.label.clone(),
                points: &line.points,
                color: c.color,
                width: if c.color == "red" { 2.5 } else { 1.5 },
            })
            .collect();
        let y_label = if figure.flip_axis() { "1 - y" } else { "y" };
        let path = args.out.join(format!("{}.svg", figure.name()));
        write_text(Some(&path), &io::svg_string(&series, y_label))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn design(args: DesignArgs) -> anyhow::Result<i32> {
    let h = Expr::parse(&args.slope).with_context(|| format!("slope '{}'", args.slope))?;
    let weight = format!("{}*sqrt(1+({})^2)", io::format_number(args.scale), h.source());
    let m = Metric::designed_arc(Arc::new(h.clone()), args.scale)?;
    println!("designed:{weight}");
    if let Some(Pair(lo, hi)) = args.range {
        if !(lo < hi) || args.samples < 2 {
            bail!("--range needs LO < HI and --samples at least 2");
        }
        let samples = (0..args.samples)
            .map(|k| {
                let y = lo + (hi - lo) * k as f64 / (args.samples - 1) as f64;
                m.eval_g(y).map(|g| (y, g))
            })
            .collect::<geodesica_core::Result<Vec<_>>>()?;
        match &args.out {
            Some(path) => {
                let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
                io::write_samples(&samples, file)?;
            }
            None => io::write_samples(&samples, std::io::stdout().lock())?,
        }
    }
    Ok(0)
}
