// SPDX-License-Identifier: Apache-2.0

//! Curve-constrained polygonal orbit construction.
//!
//! Starting from a vertex on a given planar curve and a first chord of fixed
//! length, each new vertex is found by extending the current chord by its own
//! length to a point `c` and then moving from `c` along a line parallel to the
//! radius towards the force centre until the line meets the curve again. The
//! deflection from `c` is the discrete central impulse; it leaves the
//! twice-area of consecutive triangles `S P_j P_{j+1}` unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{triangle_area2, ForceCenter, PlanarCurve, Vector3};
use crate::roots::{bracket_forward, solve_bracketed, Bracket};

/// Radius/tangent angle below which a vertex counts as radially tangent (rad).
pub const TANGENCY_TOLERANCE: f64 = 1e-6;

/// Residual (relative to curve scale) at the domain end accepted as a hit.
const ENDPOINT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// The last vertex landed on the end of the curve's parameter domain.
    ReachedEndpoint,
    /// The deflection line from the extended chord misses the remaining curve.
    NoIntersection,
    /// The radius became tangent to the curve at the last vertex.
    RadialTangency,
    /// The requested number of chords was built.
    MaxSteps,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedEndpoint => "ReachedEndpoint",
            Termination::NoIntersection => "NoIntersection",
            Termination::RadialTangency => "RadialTangency",
            Termination::MaxSteps => "MaxSteps",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub u: f64,
    pub point: Vector3,
}

/// Result of one chord-extension and deflection step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NextVertex {
    Found {
        u: f64,
        point: Vector3,
        deflection: Vector3,
        /// The vertex sits on the upper end of the curve domain.
        at_endpoint: bool,
    },
    NoIntersection,
}

/// Vertices of a constructed polygon plus the per-chord and per-vertex series
/// derived from them.
///
/// Indexing is zero-based: chord `j` joins vertices `j` and `j + 1`, and
/// `deflections()[k]` belongs to interior vertex `k + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonOrbit {
    center: Vector3,
    vertices: Vec<Vertex>,
    chords: Vec<f64>,
    deflections: Vec<Vector3>,
    deflection_angles: Vec<f64>,
    areas2: Vec<f64>,
    termination: Termination,
}

impl PolygonOrbit {
    /// Rebuilds all derived series from the vertex list.
    pub fn from_vertices(center: Vector3, vertices: Vec<Vertex>, termination: Termination) -> Self {
        let pts: Vec<Vector3> = vertices.iter().map(|v| v.point).collect();
        let chords = pts.windows(2).map(|w| w[1].distance(w[0])).collect();
        let areas2 = pts
            .windows(2)
            .map(|w| triangle_area2(center, w[0], w[1]))
            .collect();
        let mut deflections = Vec::new();
        let mut deflection_angles = Vec::new();
        for w in pts.windows(3) {
            let d = deflection(w[0], w[1], w[2]);
            let secant = w[2] - w[0];
            deflection_angles.push(if d == Vector3::ZERO { 0.0 } else { d.angle_to(secant) });
            deflections.push(d);
        }
        PolygonOrbit {
            center,
            vertices,
            chords,
            deflections,
            deflection_angles,
            areas2,
            termination,
        }
    }

    pub fn center(&self) -> Vector3 {
        self.center
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn points(&self) -> impl Iterator<Item = Vector3> + '_ {
        self.vertices.iter().map(|v| v.point)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Chord lengths `s(j) = |P_{j+1} - P_j|`.
    pub fn chords(&self) -> &[f64] {
        &self.chords
    }

    /// Deflection vectors `P_{j+1} - (2 P_j - P_{j-1})` at interior vertices.
    /// This is also the second difference of the vertex sequence.
    pub fn deflections(&self) -> &[Vector3] {
        &self.deflections
    }

    pub fn deflection_magnitudes(&self) -> Vec<f64> {
        self.deflections.iter().map(|d| d.norm()).collect()
    }

    /// Angle between each deflection and the secant `P_{j+1} - P_{j-1}`
    /// (zero where the deflection vanishes). With this choice
    /// `e(j) (s(j) + s(j+1)) = d(j) cos(theta(j)) |P_{j+1} - P_{j-1}|` holds exactly.
    pub fn deflection_angles(&self) -> &[f64] {
        &self.deflection_angles
    }

    /// Twice the areas of triangles `S P_j P_{j+1}`.
    pub fn areas2(&self) -> &[f64] {
        &self.areas2
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// Chord-length differences `e(j) = s(j+1) - s(j)`.
    pub fn chord_differences(&self) -> Vec<f64> {
        self.chords.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Chords rebuilt as `s(1) + e(1) + ... + e(j-1)`.
    pub fn chords_from_differences(&self) -> Vec<f64> {
        let Some(&first) = self.chords.first() else {
            return Vec::new();
        };
        let mut out = vec![first];
        let mut s = first;
        for e in self.chord_differences() {
            s += e;
            out.push(s);
        }
        out
    }

    /// Total chord length `s(1) + ... + s(m)`.
    pub fn coverage_length(&self) -> f64 {
        self.chords.iter().sum()
    }

    /// Largest relative deviation of any twice-area from the first.
    pub fn max_area_spread(&self) -> f64 {
        match self.areas2.first() {
            Some(&a0) if a0 > 0.0 => self
                .areas2
                .iter()
                .map(|a| (a - a0).abs() / a0)
                .fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// Largest distance of a vertex from the plane through `S, P_1, P_2`.
    pub fn max_plane_residual(&self) -> f64 {
        if self.vertices.len() < 3 {
            return 0.0;
        }
        let p0 = self.vertices[0].point;
        let Some(n) = (p0 - self.center)
            .cross(self.vertices[1].point - p0)
            .normalized()
        else {
            return 0.0;
        };
        self.points()
            .map(|p| (p - self.center).dot(n).abs())
            .fold(0.0, f64::max)
    }
}

/// `next - (2 curr - prev)`, the displacement from the extended-chord point.
#[inline]
fn deflection(prev: Vector3, curr: Vector3, next: Vector3) -> Vector3 {
    let c = curr + (curr - prev);
    next - c
}

/// Angle between the radius at `u` and the curve tangent, folded to `[0, pi/2]`.
pub fn radial_tangent_angle(curve: &PlanarCurve, center: &ForceCenter, u: f64) -> Result<f64> {
    let p = curve.evaluate(u)?;
    let radius = center.position() - p;
    if radius.norm() <= 1e-12 * curve.scale() {
        return Err(Error::CenterOnCurve { u });
    }
    let t = curve.tangent(u)?;
    let a = radius.angle_to(t);
    Ok(a.min(std::f64::consts::PI - a))
}

fn check_tangency(curve: &PlanarCurve, center: &ForceCenter, vertex: usize, u: f64) -> Result<()> {
    let angle = radial_tangent_angle(curve, center, u)?;
    if angle < TANGENCY_TOLERANCE {
        Err(Error::RadialTangency { vertex, u, angle })
    } else {
        Ok(())
    }
}

fn check_center_in_plane(curve: &PlanarCurve, center: &ForceCenter) -> Result<()> {
    let off = curve.plane().signed_distance(center.position());
    if off.abs() > 1e-9 * curve.scale().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "force center lies {off:e} off the curve plane"
        )));
    }
    Ok(())
}

/// Places the second vertex: the first point after `u_start` at chordal
/// distance `s1` from the first vertex.
pub fn first_chord(curve: &PlanarCurve, u_start: f64, s1: f64) -> Result<Option<Vertex>> {
    let p1 = curve.evaluate(u_start)?;
    let (_, u_max) = curve.domain();
    let speed = curve.derivative(u_start)?.norm();
    if speed == 0.0 {
        return Err(Error::DegenerateParameterization { u: u_start });
    }
    let f = |u: f64| curve.jet(u).point.distance(p1) - s1;
    let df = |u: f64| {
        let j = curve.jet(u);
        let r = j.point - p1;
        let n = r.norm();
        if n == 0.0 {
            j.d1.norm()
        } else {
            r.dot(j.d1) / n
        }
    };
    // half the estimated increment keeps the march from stepping over the root
    let step = 0.5 * s1 / speed;
    match bracket_forward(f, u_start, step, u_max)? {
        Bracket::Found { lo, hi, f_lo, f_hi } => {
            let u = solve_bracketed(f, Some(&df), lo, hi, f_lo, f_hi)?;
            Ok(Some(Vertex {
                u,
                point: curve.jet(u).point,
            }))
        }
        Bracket::Exhausted { f_limit } => {
            if f_limit.abs() <= ENDPOINT_TOLERANCE * curve.scale() {
                Ok(Some(Vertex {
                    u: u_max,
                    point: curve.jet(u_max).point,
                }))
            } else {
                Ok(None)
            }
        }
    }
}

/// One construction step: extend the chord `prev -> curr` by its own length to
/// `c`, then intersect the line through `c` parallel to `S - curr` with the
/// curve, taking the nearest intersection ahead of `u_curr`.
pub fn next_vertex(
    curve: &PlanarCurve,
    center: &ForceCenter,
    prev: Vector3,
    curr: Vector3,
    u_curr: f64,
) -> Result<NextVertex> {
    let (_, u_max) = curve.domain();
    let radial = (center.position() - curr)
        .normalized()
        .ok_or(Error::CenterOnCurve { u: u_curr })?;
    let c = curr + (curr - prev);
    let normal = curve.plane_normal();
    let g = |u: f64| (curve.jet(u).point - c).cross(radial).dot(normal);
    let dg = |u: f64| curve.jet(u).d1.cross(radial).dot(normal);

    let speed = curve.derivative(u_curr)?.norm();
    if speed == 0.0 {
        return Err(Error::DegenerateParameterization { u: u_curr });
    }
    // a quarter chord per march step, so the far root of the line (at most
    // a few chords away on coarse polygons) cannot pair with the near one
    let step = 0.25 * (curr - prev).norm() / speed;
    if step == 0.0 {
        return Err(Error::InvalidInput("coincident consecutive vertices".into()));
    }
    let found = |u: f64| {
        let point = curve.jet(u).point;
        NextVertex::Found {
            u,
            point,
            deflection: point - c,
            at_endpoint: u >= u_max,
        }
    };
    match bracket_forward(g, u_curr, step, u_max)? {
        Bracket::Found { lo, hi, f_lo, f_hi } => {
            let u = solve_bracketed(g, Some(&dg), lo, hi, f_lo, f_hi)?;
            Ok(found(u))
        }
        Bracket::Exhausted { f_limit } => {
            if u_max > u_curr && f_limit.abs() <= ENDPOINT_TOLERANCE * curve.scale() {
                Ok(found(u_max))
            } else {
                Ok(NextVertex::NoIntersection)
            }
        }
    }
}

/// Builds the polygon from `u_start` with first chord `s1`, for at most
/// `max_steps` chords.
///
/// Tangency at the starting vertex is an error; tangency reached later ends
/// the construction with [`Termination::RadialTangency`] and the partial
/// polygon is returned.
pub fn construct(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u_start: f64,
    s1: f64,
    max_steps: usize,
) -> Result<PolygonOrbit> {
    if !(s1.is_finite() && s1 > 0.0) {
        return Err(Error::InvalidInput(format!("first chord must be positive, got {s1}")));
    }
    if max_steps == 0 {
        return Err(Error::InvalidInput("max_steps must be at least 1".into()));
    }
    check_center_in_plane(curve, center)?;
    let s = center.position();
    let p1 = curve.evaluate(u_start)?;
    check_tangency(curve, center, 0, u_start)?;

    let mut vertices = vec![Vertex { u: u_start, point: p1 }];
    let Some(v2) = first_chord(curve, u_start, s1)? else {
        return Ok(PolygonOrbit::from_vertices(s, vertices, Termination::NoIntersection));
    };
    let mut at_end = v2.u >= curve.domain().1;
    vertices.push(v2);

    let termination = loop {
        if at_end {
            break Termination::ReachedEndpoint;
        }
        if vertices.len() > max_steps {
            break Termination::MaxSteps;
        }
        let m = vertices.len();
        let (prev, curr) = (vertices[m - 2], vertices[m - 1]);
        match check_tangency(curve, center, m - 1, curr.u) {
            Ok(()) => {}
            Err(Error::RadialTangency { .. }) => break Termination::RadialTangency,
            Err(e) => return Err(e),
        }
        match next_vertex(curve, center, prev.point, curr.point, curr.u)? {
            NextVertex::Found {
                u,
                point,
                at_endpoint,
                ..
            } => {
                at_end = at_endpoint;
                vertices.push(Vertex { u, point });
            }
            NextVertex::NoIntersection => break Termination::NoIntersection,
        }
    };
    Ok(PolygonOrbit::from_vertices(s, vertices, termination))
}
