// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Every option can also come from a JSON file given with `--config`; flags
//! win over the file, and the file wins over built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    bound_study, chord_decay_study, coverage_convergence, ellipse_deviation_study,
    integrator_order_study, ConvergenceReport,
};
use crate::error::{Error, Result};
use crate::force_measures::{measure_at, ratio_convergence};
use crate::geometry::{CurveKind, ForceCenter, PlanarCurve, Plane, SampledCurve};
use crate::integrator::{integrate, ForceLaw};
use crate::io::{self, parse_vector, Format};
use crate::polygon::{construct, Termination};

const DEFAULT_MAX_STEPS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(name = "polyorb", version, about = "Polygonal central-force orbits")]
pub struct Cli {
    /// JSON file with default values for any option.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the chord polygon inscribed in a curve.
    Construct(ConstructArgs),
    /// Run the impulse integrator.
    Integrate(IntegrateArgs),
    /// Run a convergence study over a sweep of n.
    Converge(ConvergeArgs),
    /// Polygon and tangent force measures at one curve point.
    Measure(MeasureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Study {
    Chords,
    Coverage,
    Ratio,
    Order,
    Bound,
}

#[derive(Debug, Args, Default)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; guessed from the --out extension, else json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write whitespace-separated column files next to --out.
    #[arg(long)]
    emit_plot_data: bool,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// circle:r | ellipse-focus:a,e | ellipse-center:a,b | custom:path.csv
    #[arg(long)]
    curve: Option<String>,
    /// Force center x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Parameter of the first vertex.
    #[arg(long, allow_hyphen_values = true)]
    u0: Option<f64>,
    /// First chord length.
    #[arg(long)]
    s1: Option<f64>,
    /// Largest number of chords.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Parameter interval lo,hi.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    /// linear:k | inverse-square:gm | power:A,p
    #[arg(long)]
    law: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<String>,
    /// Total time.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Number of steps.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(value_enum)]
    study: Study,
    /// Curve for chords, coverage, ratio and bound.
    #[arg(long)]
    curve: Option<String>,
    /// Force center x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    /// Curve parameter where sweeps start.
    #[arg(long, allow_hyphen_values = true, alias = "u0")]
    u: Option<f64>,
    /// Polygon length; chords start at L/n.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Comma-separated sweep, e.g. 16,32,64.
    #[arg(long)]
    n: Option<String>,
    /// Parameter interval lo,hi.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Force law for the order study.
    #[arg(long)]
    law: Option<String>,
    /// Initial position for the order study.
    #[arg(long, allow_hyphen_values = true)]
    r0: Option<String>,
    /// Initial velocity for the order study.
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<String>,
    /// Total time for the order study.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Order study against the ellipse a,b centred on the force center, with
    /// a along r0 - center.
    #[arg(long)]
    ellipse: Option<String>,
    /// Print a summary table.
    #[arg(long)]
    report: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    curve: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, allow_hyphen_values = true, alias = "u0")]
    u: Option<f64>,
    /// First chord length; defaults to SP/1000.
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

/// A vector written either as `"x,y,z"` or `[x, y, z]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum VecValue {
    Array([f64; 3]),
    Text(String),
}

impl VecValue {
    fn into_text(self) -> String {
        match self {
            VecValue::Array([x, y, z]) => format!("{x:?},{y:?},{z:?}"),
            VecValue::Text(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ListValue {
    One(usize),
    Many(Vec<usize>),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PairValue {
    Array([f64; 2]),
    Text(String),
}

impl PairValue {
    fn into_text(self) -> String {
        match self {
            PairValue::Array([a, b]) => format!("{a:?},{b:?}"),
            PairValue::Text(s) => s,
        }
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    curve: Option<String>,
    center: Option<VecValue>,
    #[serde(alias = "u0")]
    u: Option<f64>,
    s1: Option<f64>,
    max_steps: Option<usize>,
    domain: Option<PairValue>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    n: Option<ListValue>,
    law: Option<String>,
    r0: Option<VecValue>,
    v0: Option<VecValue>,
    ellipse: Option<PairValue>,
    out: Option<PathBuf>,
    format: Option<Format>,
    report: Option<bool>,
    emit_plot_data: Option<bool>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }
}

/// Parses the command line and runs it, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg, sub)) => {
            eprintln!("error: {msg}\n");
            let mut cmd = Cli::command();
            let usage = match cmd.find_subcommand_mut(sub) {
                Some(sc) => sc.render_usage(),
                None => cmd.render_usage(),
            };
            eprintln!("{usage}\n\nFor more information, try '--help'.");
            1
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

enum Failure {
    Usage(String, &'static str),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn execute(cli: Cli) -> CmdResult {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Construct(a) => cmd_construct(a, file),
        Command::Integrate(a) => cmd_integrate(a, file),
        Command::Converge(a) => cmd_converge(a, file),
        Command::Measure(a) => cmd_measure(a, file),
    }
}

fn require<T>(v: Option<T>, flag: &str, sub: &'static str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required option --{flag}"), sub))
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::InvalidInput(format!("{what} must be finite, got {x}")))
    }
}

fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad {what} value {p:?} in {s:?}")))
        })
        .collect()
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    match parse_numbers(s, what)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Parse(format!("{what} takes two numbers, got {s:?}"))),
    }
}

/// Parses `circle:r`, `ellipse-focus:a,e`, `ellipse-center:a,b` or
/// `custom:path.csv`.
pub fn parse_curve(spec: &str) -> Result<PlanarCurve> {
    let (kind, params) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("curve spec {spec:?} lacks `kind:`")))?;
    match kind.trim() {
        "circle" => match parse_numbers(params, "circle")?.as_slice() {
            [r] => PlanarCurve::circle(*r),
            _ => Err(Error::Parse("circle takes one radius".into())),
        },
        "ellipse-focus" => {
            let (a, e) = parse_pair(params, "ellipse-focus")?;
            PlanarCurve::ellipse_focus(a, e)
        }
        "ellipse-center" => {
            let (a, b) = parse_pair(params, "ellipse-center")?;
            PlanarCurve::ellipse_center(a, b)
        }
        "custom" => {
            let file = fs::File::open(params.trim())?;
            Ok(PlanarCurve::sampled(SampledCurve::from_csv(file)?))
        }
        other => Err(Error::Parse(format!("unknown curve kind {other:?}"))),
    }
}

/// Parses `linear:k`, `inverse-square:gm` or `power:A,p`.
pub fn parse_law(spec: &str) -> Result<ForceLaw> {
    let (kind, params) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("force law {spec:?} lacks `kind:`")))?;
    let nums = parse_numbers(params, "force law")?;
    let law = match (kind.trim(), nums.as_slice()) {
        ("linear", [k]) => ForceLaw::Linear { k: *k },
        ("inverse-square", [gm]) => ForceLaw::InverseSquare { gm: *gm },
        ("power", [a, p]) => ForceLaw::PowerLaw {
            coefficient: *a,
            exponent: *p,
        },
        _ => return Err(Error::Parse(format!("bad force law {spec:?}"))),
    };
    law.validate()?;
    Ok(law)
}

/// Parses a comma-separated list of step counts.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad n value {p:?}")))
        })
        .collect()
}

fn list_text(v: ListValue) -> String {
    match v {
        ListValue::One(n) => n.to_string(),
        ListValue::Many(ns) => ns.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        ListValue::Text(s) => s,
    }
}

fn center_of(flag: Option<String>, file: Option<VecValue>) -> Result<ForceCenter> {
    match flag.or(file.map(VecValue::into_text)) {
        Some(s) => ForceCenter::new(parse_vector(&s)?),
        None => Ok(ForceCenter::origin()),
    }
}

fn vector_opt(flag: Option<String>, file: Option<VecValue>) -> Option<String> {
    flag.or(file.map(VecValue::into_text))
}

/// Applies `--domain`, or for closed analytic curves the default of two
/// turns from `u_start` when `two_turns` is set.
fn apply_domain(
    curve: PlanarCurve,
    domain: Option<String>,
    u_start: f64,
    two_turns: bool,
) -> Result<PlanarCurve> {
    if let Some(d) = domain {
        let (lo, hi) = parse_pair(&d, "domain")?;
        return curve.with_domain(lo, hi);
    }
    let closed = !matches!(curve.kind(), CurveKind::CustomSampled(_));
    if closed && two_turns {
        curve.with_domain(u_start, u_start + 2.0 * std::f64::consts::TAU)
    } else {
        Ok(curve)
    }
}

struct Output {
    out: Option<PathBuf>,
    format: Format,
    plot: bool,
}

fn resolve_output(
    args: OutputArgs,
    file: &FileConfig,
    sub: &'static str,
) -> std::result::Result<Output, Failure> {
    let out = args.out.or_else(|| file.out.clone());
    let format = args
        .format
        .or(file.format)
        .or_else(|| out.as_deref().and_then(Format::from_path))
        .unwrap_or(Format::Json);
    let plot = args.emit_plot_data || file.emit_plot_data.unwrap_or(false);
    if plot && out.as_deref().is_none_or(|p| p.as_os_str() == "-") {
        return Err(Failure::Usage("--emit-plot-data needs --out <file>".into(), sub));
    }
    Ok(Output { out, format, plot })
}

impl Output {
    fn write(&self, text: &str) -> Result<()> {
        io::write_output(self.out.as_deref(), text)
    }

    fn to_stdout(&self) -> bool {
        self.out.as_deref().is_none_or(|p| p.as_os_str() == "-")
    }

    /// `<out without extension>_<suffix>.dat`
    fn plot_path(&self, suffix: &str) -> PathBuf {
        let out = self.out.as_deref().expect("plot data requires --out");
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{stem}_{suffix}.dat"))
    }
}

fn cmd_construct(a: ConstructArgs, file: FileConfig) -> CmdResult {
    const SUB: &str = "construct";
    let spec = require(a.curve.or(file.curve.clone()), "curve", SUB)?;
    let s1 = require(a.s1.or(file.s1), "s1", SUB)?;
    let u0 = finite(a.u0.or(file.u).unwrap_or(0.0), "u0")?;
    let max_steps = a.max_steps.or(file.max_steps).unwrap_or(DEFAULT_MAX_STEPS);
    let domain = a.domain.or(file.domain.clone().map(PairValue::into_text));
    let center = center_of(a.center, file.center.clone())?;
    let output = resolve_output(a.output, &file, SUB)?;

    let curve = apply_domain(parse_curve(&spec)?, domain, u0, false)?;
    let orbit = construct(&curve, &center, u0, s1, max_steps)?;
    let text = match output.format {
        Format::Json => io::polygon_to_json(&orbit)?,
        Format::Csv => io::polygon_to_csv(&orbit)?,
    };
    output.write(&text)?;
    if output.plot {
        let (vertices, dense) = io::polygon_plot_data(&orbit, &curve)?;
        fs::write(output.plot_path("vertices"), vertices).map_err(Error::from)?;
        fs::write(output.plot_path("curve"), dense).map_err(Error::from)?;
    }
    eprintln!(
        "{} vertices, {} chords, termination {}",
        orbit.len(),
        orbit.chords().len(),
        orbit.termination().as_str()
    );
    Ok(if orbit.termination() == Termination::RadialTangency {
        2
    } else {
        0
    })
}

fn cmd_integrate(a: IntegrateArgs, file: FileConfig) -> CmdResult {
    const SUB: &str = "integrate";
    let law = parse_law(&require(a.law.or(file.law.clone()), "law", SUB)?)?;
    let r0 = parse_vector(&require(vector_opt(a.r0, file.r0.clone()), "r0", SUB)?)?;
    let v0 = parse_vector(&require(vector_opt(a.v0, file.v0.clone()), "v0", SUB)?)?;
    let total = require(a.t.or(file.t), "T", SUB)?;
    let n = match a.n {
        Some(n) => n,
        None => match file.n.clone() {
            Some(ListValue::One(n)) => n,
            Some(other) => parse_n_list(&list_text(other))?
                .first()
                .copied()
                .ok_or_else(|| Error::Parse("empty n".into()))?,
            None => return Err(Failure::Usage("missing required option --n".into(), SUB)),
        },
    };
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into(), SUB));
    }
    let center = center_of(a.center, file.center.clone())?;
    let output = resolve_output(a.output, &file, SUB)?;

    let traj = integrate(r0, v0, &law, center.position(), total, n)?;
    let text = match output.format {
        Format::Json => io::trajectory_to_json(&traj)?,
        Format::Csv => io::trajectory_to_csv(&traj)?,
    };
    output.write(&text)?;
    if output.plot {
        fs::write(output.plot_path("trajectory"), io::trajectory_plot_data(&traj))
            .map_err(Error::from)?;
    }
    let d = &traj.diagnostics;
    eprintln!(
        "{n} steps, |L| drift {:.3e}, out-of-plane {:.3e}, area spread {:.3e}, energy drift {:.3e}",
        d.max_angular_momentum_magnitude_drift,
        d.max_out_of_plane,
        d.area_spread(),
        d.max_energy_drift
    );
    Ok(0)
}

fn cmd_converge(a: ConvergeArgs, file: FileConfig) -> CmdResult {
    const SUB: &str = "converge";
    let n_text = require(a.n.or(file.n.clone().map(list_text)), "n", SUB)?;
    let n_values = parse_n_list(&n_text)?;
    if n_values.len() < 3 {
        return Err(Failure::Usage(
            format!("--n needs at least three values, got {}", n_values.len()),
            SUB,
        ));
    }
    let show_table = a.report || file.report.unwrap_or(false);
    let output = resolve_output(a.output, &file, SUB)?;
    let center = center_of(a.center, file.center.clone())?;
    let u = finite(a.u.or(file.u).unwrap_or(0.0), "u")?;
    let domain = a.domain.or(file.domain.clone().map(PairValue::into_text));

    let report: ConvergenceReport = match a.study {
        Study::Chords | Study::Coverage | Study::Bound | Study::Ratio => {
            let spec = require(a.curve.or(file.curve.clone()), "curve", SUB)?;
            let curve = apply_domain(parse_curve(&spec)?, domain, u, true)?;
            if a.study == Study::Ratio {
                ratio_convergence(&curve, &center, u, &n_values)?
            } else {
                let length = require(a.l.or(file.l), "L", SUB)?;
                match a.study {
                    Study::Chords => chord_decay_study(&curve, &center, u, length, &n_values)?,
                    Study::Coverage => coverage_convergence(&curve, &center, u, length, &n_values)?,
                    _ => bound_study(&curve, &center, u, length, &n_values)?.to_report()?,
                }
            }
        }
        Study::Order => {
            let law = parse_law(&require(a.law.or(file.law.clone()), "law", SUB)?)?;
            let r0 = parse_vector(&require(vector_opt(a.r0, file.r0.clone()), "r0", SUB)?)?;
            let v0 = parse_vector(&require(vector_opt(a.v0, file.v0.clone()), "v0", SUB)?)?;
            let total = require(a.t.or(file.t), "T", SUB)?;
            match a.ellipse.or(file.ellipse.clone().map(PairValue::into_text)) {
                Some(e) => {
                    let axes = parse_pair(&e, "ellipse")?;
                    let s = center.position();
                    let plane = Plane::new(s, (r0 - s).cross(v0), r0 - s)?;
                    ellipse_deviation_study(r0, v0, &law, total, &n_values, &plane, axes)?
                }
                None => integrator_order_study(r0, v0, &law, center.position(), total, &n_values)?,
            }
        }
    };

    let text = match output.format {
        Format::Json => io::report_to_json(&report)?,
        Format::Csv => io::report_to_csv(&report)?,
    };
    output.write(&text)?;
    if output.plot {
        fs::write(output.plot_path("report"), io::report_plot_data(&report)).map_err(Error::from)?;
    }
    let summary = if show_table {
        io::report_summary(&report)
    } else {
        io::summary_line(&report) + "\n"
    };
    if output.to_stdout() {
        eprint!("{summary}");
    } else {
        print!("{summary}");
    }
    Ok(0)
}

fn cmd_measure(a: MeasureArgs, file: FileConfig) -> CmdResult {
    const SUB: &str = "measure";
    let spec = require(a.curve.or(file.curve.clone()), "curve", SUB)?;
    let u = finite(a.u.or(file.u).unwrap_or(0.0), "u")?;
    let center = center_of(a.center, file.center.clone())?;
    let domain = a.domain.or(file.domain.clone().map(PairValue::into_text));
    let output = resolve_output(a.output, &file, SUB)?;
    let curve = apply_domain(parse_curve(&spec)?, domain, u, true)?;
    let s1 = match a.s1.or(file.s1) {
        Some(s) => s,
        None => 1e-3 * curve.evaluate(u)?.distance(center.position()),
    };
    let sample = measure_at(&curve, &center, u, s1)?;
    let text = match output.format {
        Format::Json => {
            let mut v = serde_json::to_value(sample).map_err(Error::from)?;
            v["ratio"] = sample.ratio().into();
            serde_json::to_string_pretty(&v).map_err(Error::from)? + "\n"
        }
        Format::Csv => format!(
            "u,measure_p1,measure_p6,ratio,scale\n{},{},{},{},{}\n",
            io::fmt_f64(sample.u),
            io::fmt_f64(sample.measure_p1),
            io::fmt_f64(sample.measure_p6),
            io::fmt_f64(sample.ratio()),
            io::fmt_f64(sample.scale)
        ),
    };
    output.write(&text)?;
    Ok(0)
}
