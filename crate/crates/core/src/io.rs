// SPDX-License-Identifier: Apache-2.0

//! File formats for polygons, trajectories and convergence reports.
//!
//! JSON uses the shortest round-trip float form. CSV writes floats with 17
//! significant digits and keeps non-tabular metadata on a leading `#` line, so
//! every format parses back to the value that was written.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::ConvergenceReport;
use crate::error::{Error, Result};
use crate::geometry::{PlanarCurve, Vector3};
use crate::integrator::{Diagnostics, ForceLaw, ImpulseTrajectory, Sample, State};
use crate::polygon::{PolygonOrbit, Termination, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// A float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} value {field:?}")))
}

fn opt_field(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(field, what).map(Some)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Splits off a `# <tag> ...` metadata line and returns its remainder.
fn split_meta<'a>(text: &'a str, tag: &str) -> Result<(&'a str, &'a str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let prefix = format!("# {tag} ");
    first
        .trim_end_matches('\r')
        .strip_prefix(&prefix)
        .map(|meta| (meta, rest))
        .ok_or_else(|| Error::Parse(format!("missing `# {tag}` metadata line")))
}

fn csv_records(body: &str) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let header = r.headers().map_err(csv_error)?.clone();
    let rows = r.records().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_error)?;
    Ok((header, rows))
}

fn column(header: &csv::StringRecord, name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
}

// ---------------------------------------------------------------- polygon

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    u: f64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Serialize, Deserialize)]
struct PolygonDoc {
    center: [f64; 3],
    vertices: Vec<VertexDoc>,
    chords: Vec<f64>,
    deflections: Vec<[f64; 3]>,
    deflection_angles: Vec<f64>,
    areas2: Vec<f64>,
    termination: Termination,
}

pub fn polygon_to_json(orbit: &PolygonOrbit) -> Result<String> {
    let doc = PolygonDoc {
        center: orbit.center().to_array(),
        vertices: orbit
            .vertices()
            .iter()
            .map(|v| VertexDoc {
                u: v.u,
                x: v.point.x,
                y: v.point.y,
                z: v.point.z,
            })
            .collect(),
        chords: orbit.chords().to_vec(),
        deflections: orbit.deflections().iter().map(|d| d.to_array()).collect(),
        deflection_angles: orbit.deflection_angles().to_vec(),
        areas2: orbit.areas2().to_vec(),
        termination: orbit.termination(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Parses a polygon; derived series are recomputed from the vertices.
pub fn polygon_from_json(text: &str) -> Result<PolygonOrbit> {
    let doc: PolygonDoc = serde_json::from_str(text)?;
    let vertices = doc
        .vertices
        .iter()
        .map(|v| Vertex {
            u: v.u,
            point: Vector3::new(v.x, v.y, v.z),
        })
        .collect();
    Ok(PolygonOrbit::from_vertices(
        Vector3::from_array(doc.center),
        vertices,
        doc.termination,
    ))
}

pub const POLYGON_COLUMNS: [&str; 11] = [
    "j", "u", "x", "y", "z", "chord", "cum_chord", "area2", "cum_area2", "deflection", "theta",
];

/// One row per vertex. `chord` and `area2` belong to the segment leaving the
/// vertex; `deflection` and `theta` are blank at the two ends.
pub fn polygon_to_csv(orbit: &PolygonOrbit) -> Result<String> {
    let c = orbit.center();
    let mut out = format!(
        "# polygon center={},{},{} termination={}\n",
        fmt_f64(c.x),
        fmt_f64(c.y),
        fmt_f64(c.z),
        orbit.termination().as_str()
    );
    let defl = orbit.deflection_magnitudes();
    let (mut cum_chord, mut cum_area) = (0.0, 0.0);
    let rows = orbit.vertices().iter().enumerate().map(|(j, v)| {
        let chord = orbit.chords().get(j).copied();
        let area = orbit.areas2().get(j).copied();
        let interior = j >= 1 && j + 1 < orbit.len();
        let row = vec![
            j.to_string(),
            fmt_f64(v.u),
            fmt_f64(v.point.x),
            fmt_f64(v.point.y),
            fmt_f64(v.point.z),
            opt_field(chord),
            fmt_f64(cum_chord),
            opt_field(area),
            fmt_f64(cum_area),
            opt_field(interior.then(|| defl[j - 1])),
            opt_field(interior.then(|| orbit.deflection_angles()[j - 1])),
        ];
        cum_chord += chord.unwrap_or(0.0);
        cum_area += area.unwrap_or(0.0);
        row
    });
    out += &csv_string(&POLYGON_COLUMNS, rows.collect::<Vec<_>>())?;
    Ok(out)
}

pub fn polygon_from_csv(text: &str) -> Result<PolygonOrbit> {
    let (meta, body) = split_meta(text, "polygon")?;
    let mut center = None;
    let mut termination = None;
    for item in meta.split_whitespace() {
        if let Some(c) = item.strip_prefix("center=") {
            center = Some(parse_vector(c)?);
        } else if let Some(t) = item.strip_prefix("termination=") {
            termination = Some(parse_termination(t)?);
        }
    }
    let center = center.ok_or_else(|| Error::Parse("polygon metadata lacks center".into()))?;
    let termination =
        termination.ok_or_else(|| Error::Parse("polygon metadata lacks termination".into()))?;
    let (header, rows) = csv_records(body)?;
    let idx = ["u", "x", "y", "z"]
        .iter()
        .map(|c| column(&header, c))
        .collect::<Result<Vec<_>>>()?;
    let vertices = rows
        .iter()
        .map(|r| {
            let get = |k: usize| parse_f64(r.get(idx[k]).unwrap_or(""), "vertex");
            Ok(Vertex {
                u: get(0)?,
                point: Vector3::new(get(1)?, get(2)?, get(3)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolygonOrbit::from_vertices(center, vertices, termination))
}

fn parse_termination(s: &str) -> Result<Termination> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| Error::Parse(format!("unknown termination {s:?}")))
}

/// Parses `x,y,z`.
pub fn parse_vector(s: &str) -> Result<Vector3> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected x,y,z, got {s:?}")));
    }
    let v = Vector3::new(
        parse_f64(parts[0], "vector")?,
        parse_f64(parts[1], "vector")?,
        parse_f64(parts[2], "vector")?,
    );
    v.ensure_finite("vector")?;
    Ok(v)
}

// ------------------------------------------------------------- trajectory

#[derive(Serialize, Deserialize)]
struct TrajectoryMeta {
    law: ForceLaw,
    center: [f64; 3],
    n: usize,
    #[serde(rename = "T")]
    total_time: f64,
    dt: f64,
    stride: usize,
    diagnostics: Diagnostics,
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    j: usize,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    vx: f64,
    vy: f64,
    vz: f64,
    #[serde(rename = "Lx")]
    lx: f64,
    #[serde(rename = "Ly")]
    ly: f64,
    #[serde(rename = "Lz")]
    lz: f64,
    area2_step: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryDoc {
    metadata: TrajectoryMeta,
    samples: Vec<SampleDoc>,
}

fn meta_of(traj: &ImpulseTrajectory) -> TrajectoryMeta {
    TrajectoryMeta {
        law: traj.law,
        center: traj.center.to_array(),
        n: traj.steps,
        total_time: traj.total_time,
        dt: traj.dt,
        stride: traj.stride,
        diagnostics: traj.diagnostics,
    }
}

fn assemble(meta: TrajectoryMeta, samples: Vec<SampleDoc>) -> ImpulseTrajectory {
    ImpulseTrajectory {
        law: meta.law,
        center: Vector3::from_array(meta.center),
        total_time: meta.total_time,
        steps: meta.n,
        dt: meta.dt,
        stride: meta.stride,
        samples: samples
            .into_iter()
            .map(|s| Sample {
                j: s.j,
                state: State::new(Vector3::new(s.x, s.y, s.z), Vector3::new(s.vx, s.vy, s.vz)),
                angular_momentum: Vector3::new(s.lx, s.ly, s.lz),
                area2_step: s.area2_step,
            })
            .collect(),
        diagnostics: meta.diagnostics,
    }
}

fn sample_doc(traj: &ImpulseTrajectory, s: &Sample) -> SampleDoc {
    SampleDoc {
        j: s.j,
        t: s.j as f64 * traj.dt,
        x: s.state.r.x,
        y: s.state.r.y,
        z: s.state.r.z,
        vx: s.state.v.x,
        vy: s.state.v.y,
        vz: s.state.v.z,
        lx: s.angular_momentum.x,
        ly: s.angular_momentum.y,
        lz: s.angular_momentum.z,
        area2_step: s.area2_step,
    }
}

pub fn trajectory_to_json(traj: &ImpulseTrajectory) -> Result<String> {
    let doc = TrajectoryDoc {
        metadata: meta_of(traj),
        samples: traj.samples.iter().map(|s| sample_doc(traj, s)).collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn trajectory_from_json(text: &str) -> Result<ImpulseTrajectory> {
    let doc: TrajectoryDoc = serde_json::from_str(text)?;
    Ok(assemble(doc.metadata, doc.samples))
}

pub const TRAJECTORY_COLUMNS: [&str; 12] = [
    "j", "t", "x", "y", "z", "vx", "vy", "vz", "Lx", "Ly", "Lz", "area2_step",
];

pub fn trajectory_to_csv(traj: &ImpulseTrajectory) -> Result<String> {
    let mut out = format!("# trajectory {}\n", serde_json::to_string(&meta_of(traj))?);
    let rows = traj.samples.iter().map(|s| {
        let d = sample_doc(traj, s);
        let mut row = vec![d.j.to_string()];
        row.extend(
            [d.t, d.x, d.y, d.z, d.vx, d.vy, d.vz, d.lx, d.ly, d.lz]
                .iter()
                .map(|&v| fmt_f64(v)),
        );
        row.push(opt_field(d.area2_step));
        row
    });
    out += &csv_string(&TRAJECTORY_COLUMNS, rows.collect::<Vec<_>>())?;
    Ok(out)
}

pub fn trajectory_from_csv(text: &str) -> Result<ImpulseTrajectory> {
    let (meta, body) = split_meta(text, "trajectory")?;
    let meta: TrajectoryMeta = serde_json::from_str(meta)?;
    let (header, rows) = csv_records(body)?;
    let idx = TRAJECTORY_COLUMNS
        .iter()
        .map(|c| column(&header, c))
        .collect::<Result<Vec<_>>>()?;
    let samples = rows
        .iter()
        .map(|r| {
            let field = |k: usize| r.get(idx[k]).unwrap_or("");
            let f = |k: usize| parse_f64(field(k), TRAJECTORY_COLUMNS[k]);
            Ok(SampleDoc {
                j: field(0)
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad step index {:?}", field(0))))?,
                t: f(1)?,
                x: f(2)?,
                y: f(3)?,
                z: f(4)?,
                vx: f(5)?,
                vy: f(6)?,
                vz: f(7)?,
                lx: f(8)?,
                ly: f(9)?,
                lz: f(10)?,
                area2_step: parse_opt(field(11), "area2_step")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(meta, samples))
}

// ----------------------------------------------------------------- report

pub fn report_to_json(report: &ConvergenceReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn report_from_json(text: &str) -> Result<ConvergenceReport> {
    Ok(serde_json::from_str(text)?)
}

/// Columns `n`, `metric` and one per series; fit statistics go on the
/// metadata line.
pub fn report_to_csv(report: &ConvergenceReport) -> Result<String> {
    let mut meta = serde_json::to_value(report)?;
    if let Value::Object(map) = &mut meta {
        map.remove("n");
        map.remove("metric");
        for key in report.series.keys() {
            map.remove(key);
        }
    }
    let mut out = format!("# report {}\n", serde_json::to_string(&meta)?);
    let mut header = vec!["n", "metric"];
    header.extend(report.series.keys().map(String::as_str));
    let rows = (0..report.n_values.len()).map(|i| {
        let mut row = vec![report.n_values[i].to_string(), fmt_f64(report.metric[i])];
        row.extend(report.series.values().map(|s| opt_field(s.get(i).copied())));
        row
    });
    out += &csv_string(&header, rows.collect::<Vec<_>>())?;
    Ok(out)
}

pub fn report_from_csv(text: &str) -> Result<ConvergenceReport> {
    let (meta, body) = split_meta(text, "report")?;
    let mut value: Value = serde_json::from_str(meta)?;
    let (header, rows) = csv_records(body)?;
    let map = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("report metadata is not an object".into()))?;
    for (k, name) in header.iter().enumerate() {
        let col = rows
            .iter()
            .map(|r| {
                let field = r.get(k).unwrap_or("");
                if name == "n" {
                    field
                        .parse::<u64>()
                        .map(Value::from)
                        .map_err(|_| Error::Parse(format!("bad n value {field:?}")))
                } else {
                    parse_f64(field, name).map(Value::from)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        map.insert(name.to_string(), Value::Array(col));
    }
    Ok(serde_json::from_value(value)?)
}

/// Plain-text table of a report for terminals.
pub fn report_summary(report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "study: {}", report.study);
    let _ = write!(s, "{:>8} {:>24}", "n", "metric");
    for name in report.series.keys() {
        let _ = write!(s, " {name:>24}");
    }
    s.push('\n');
    for (i, n) in report.n_values.iter().enumerate() {
        let _ = write!(s, "{:>8} {:>24.16e}", n, report.metric[i]);
        for col in report.series.values() {
            match col.get(i) {
                Some(v) => {
                    let _ = write!(s, " {v:>24.16e}");
                }
                None => {
                    let _ = write!(s, " {:>24}", "");
                }
            }
        }
        s.push('\n');
    }
    s += &summary_line(report);
    s.push('\n');
    for note in &report.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

/// One line with the fitted slope and extrapolated limit.
pub fn summary_line(report: &ConvergenceReport) -> String {
    let show = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
    format!(
        "{}: slope {} (95% CI +/- {}), residual {}, extrapolated {}",
        report.study,
        show(report.log_log_slope),
        show(report.slope_ci),
        report.residual.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}")),
        report
            .extrapolated_limit
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.12}")),
    )
}

// -------------------------------------------------------------- plot data

/// Whitespace-separated columns with a `#` header line, readable by gnuplot,
/// numpy.loadtxt and similar tools.
pub fn columns_to_text(names: &[&str], columns: &[Vec<f64>]) -> String {
    let mut s = format!("# {}\n", names.join(" "));
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..rows {
        let line: Vec<String> = columns
            .iter()
            .map(|c| c.get(i).map_or_else(|| "nan".into(), |&v| fmt_f64(v)))
            .collect();
        s += &line.join(" ");
        s.push('\n');
    }
    s
}

/// Polygon vertices, and the curve sampled densely over the same parameters.
pub fn polygon_plot_data(orbit: &PolygonOrbit, curve: &PlanarCurve) -> Result<(String, String)> {
    let (x, y, z): (Vec<f64>, Vec<f64>, Vec<f64>) = orbit.points().fold(
        (Vec::new(), Vec::new(), Vec::new()),
        |(mut x, mut y, mut z), p| {
            x.push(p.x);
            y.push(p.y);
            z.push(p.z);
            (x, y, z)
        },
    );
    let vertices = columns_to_text(&["x", "y", "z"], &[x, y, z]);
    let (lo, hi) = match (orbit.vertices().first(), orbit.vertices().last()) {
        (Some(a), Some(b)) if b.u > a.u => (a.u, b.u),
        _ => curve.domain(),
    };
    let samples = 2000;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 4];
    for i in 0..=samples {
        let u = lo + (hi - lo) * i as f64 / samples as f64;
        let p = curve.evaluate(u)?;
        cols[0].push(u);
        cols[1].push(p.x);
        cols[2].push(p.y);
        cols[3].push(p.z);
    }
    Ok((vertices, columns_to_text(&["u", "x", "y", "z"], &cols)))
}

pub fn trajectory_plot_data(traj: &ImpulseTrajectory) -> String {
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 4];
    for s in &traj.samples {
        cols[0].push(s.j as f64 * traj.dt);
        cols[1].push(s.state.r.x);
        cols[2].push(s.state.r.y);
        cols[3].push(s.state.r.z);
    }
    columns_to_text(&["t", "x", "y", "z"], &cols)
}

/// `n`, the metric, and the fitted power law at each `n` (when fitted).
pub fn report_plot_data(report: &ConvergenceReport) -> String {
    let n: Vec<f64> = report.n_values.iter().map(|&n| n as f64).collect();
    let fit = match (report.log_log_slope, report.intercept) {
        (Some(b), Some(a)) => n.iter().map(|&x| (a + b * x.ln()).exp()).collect(),
        _ => vec![f64::NAN; n.len()],
    };
    columns_to_text(&["n", "metric", "fit"], &[n, report.metric.clone(), fit])
}

/// Writes `contents` to `path`, or to standard output when `path` is `None`
/// or `-`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(fs::write(p, contents)?),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}
