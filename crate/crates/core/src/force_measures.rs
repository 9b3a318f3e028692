// SPDX-License-Identifier: Apache-2.0

//! Two geometric estimators of central force along an orbit.
//!
//! The polygon measure divides the deflection at a vertex by the square of the
//! twice-area of the following triangle. The tangent measure takes a nearby
//! curve point Q, drops a line from Q parallel to the radius SP onto the
//! tangent at P (meeting it at R), and forms `QR / (SP * QT)^2` with QT the
//! distance from Q to the line SP. Both are proportional to the force; in the
//! limit of vanishing chords the polygon measure is twice the tangent measure.

use serde::{Deserialize, Serialize};

use crate::analysis::{richardson, validate_n_values, ConvergenceReport};
use crate::error::{Error, Result};
use crate::geometry::{ForceCenter, PlanarCurve};
use crate::parallel::{ordered_map, sweep_threads};
use crate::polygon::{construct, PolygonOrbit, TANGENCY_TOLERANCE};

/// First arc offset of the tangent-measure extrapolation, relative to `SP`.
pub const TANGENT_OFFSET: f64 = 2e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceMeasureSample {
    /// Curve parameter of the polygon vertex where both measures are taken.
    pub u: f64,
    pub measure_p1: f64,
    pub measure_p6: f64,
    /// Chord length at which the polygon measure was taken.
    pub scale: f64,
}

impl ForceMeasureSample {
    pub fn ratio(&self) -> f64 {
        self.measure_p1 / self.measure_p6
    }
}

/// `d(j) / areas2(j)^2` at interior vertex `j`.
pub fn prop1_measure(orbit: &PolygonOrbit, j: usize) -> Result<f64> {
    if j == 0 || j + 1 >= orbit.len() {
        return Err(Error::Index {
            index: j,
            len: orbit.len(),
        });
    }
    let d = orbit.deflections()[j - 1].norm();
    let a = orbit.areas2()[j];
    Ok(d / (a * a))
}

/// Parameter of the point at signed arc length `h` from `u`.
fn arc_offset(curve: &PlanarCurve, u: f64, h: f64) -> Result<f64> {
    let speed = curve.derivative(u)?.norm();
    let mut v = u + h / speed;
    for _ in 0..50 {
        let (lo, hi) = curve.domain();
        if v < lo || v > hi {
            return Err(Error::Domain { u: v, lo, hi });
        }
        let residual = curve.arc_length(u, v)? - h;
        let dv = residual / curve.derivative(v)?.norm();
        v -= dv;
        if dv.abs() <= 1e-15 * v.abs().max(1.0) {
            break;
        }
    }
    Ok(v)
}

/// Tangent measure `QR / (SP * QT)^2` with Q at arc offset `h` from `P = R(u)`.
pub fn prop6_measure(curve: &PlanarCurve, center: &ForceCenter, u: f64, h: f64) -> Result<f64> {
    if h == 0.0 || !h.is_finite() {
        return Err(Error::InvalidInput(format!("arc offset must be non-zero, got {h}")));
    }
    let p = curve.evaluate(u)?;
    let sp_vec = center.position() - p;
    let sp = sp_vec.norm();
    if sp <= 1e-12 * curve.scale() {
        return Err(Error::CenterOnCurve { u });
    }
    let radial = sp_vec / sp;
    let tangent = curve.tangent(u)?;
    let n = curve.plane_normal();
    let cross2 = |a: crate::geometry::Vector3, b| a.cross(b).dot(n);
    let sin_angle = cross2(tangent, radial);
    if sin_angle.abs() < TANGENCY_TOLERANCE.sin() {
        return Err(Error::RadialTangency {
            vertex: 0,
            u,
            angle: sin_angle.abs().asin(),
        });
    }
    let q = curve.evaluate(arc_offset(curve, u, h)?)?;
    let lambda = cross2(q - p, radial) / sin_angle;
    let r = p + tangent * lambda;
    let qr = q.distance(r);
    let qt = (q - p).cross(radial).norm();
    Ok(qr / (sp * qt).powi(2))
}

/// The tangent measure extrapolated to zero arc offset from offsets
/// `h, h/2, h/4` with `h = TANGENT_OFFSET * SP` (Richardson, orders 1 and 2).
/// The offset is taken backwards when forward points would leave the domain.
pub fn prop6_limit(curve: &PlanarCurve, center: &ForceCenter, u: f64) -> Result<f64> {
    let p = curve.evaluate(u)?;
    let sp = p.distance(center.position());
    if sp <= 1e-12 * curve.scale() {
        return Err(Error::CenterOnCurve { u });
    }
    let mut h = TANGENT_OFFSET * sp;
    let speed = curve.derivative(u)?.norm();
    if u + 2.0 * h / speed > curve.domain().1 {
        h = -h;
    }
    let vals = [h, h / 2.0, h / 4.0]
        .iter()
        .map(|&hk| prop6_measure(curve, center, u, hk))
        .collect::<Result<Vec<_>>>()?;
    richardson(&vals, 2.0, &[1.0, 2.0])
}

/// Both measures at the second vertex of a two-chord polygon started at
/// `u` with first chord `s1`.
pub fn measure_at(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u: f64,
    s1: f64,
) -> Result<ForceMeasureSample> {
    let orbit = construct(curve, center, u, s1, 2)?;
    if orbit.len() < 3 {
        return Err(Error::Numerical(format!(
            "polygon from u = {u} ended ({}) before an interior vertex",
            orbit.termination().as_str()
        )));
    }
    let uj = orbit.vertices()[1].u;
    Ok(ForceMeasureSample {
        u: uj,
        measure_p1: prop1_measure(&orbit, 1)?,
        measure_p6: prop6_limit(curve, center, uj)?,
        scale: s1,
    })
}

/// Polygon-to-tangent measure ratio at `u` for chords `s1 = SP / n`.
///
/// The limit is extrapolated from the three largest `n` (which must refine by
/// a constant factor); the metric is each ratio's distance from that limit.
pub fn ratio_convergence(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u: f64,
    n_values: &[usize],
) -> Result<ConvergenceReport> {
    validate_n_values(n_values)?;
    let k = n_values.len();
    let r1 = n_values[k - 1] as f64 / n_values[k - 2] as f64;
    let r0 = n_values[k - 2] as f64 / n_values[k - 3] as f64;
    if (r1 - r0).abs() > 1e-12 * r1 {
        return Err(Error::InvalidInput(
            "the three largest n must refine by a constant factor".into(),
        ));
    }
    let length = curve.evaluate(u)?.distance(center.position());
    let samples = ordered_map(n_values, sweep_threads(), |&n| {
        measure_at(curve, center, u, length / n as f64)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = samples.iter().map(ForceMeasureSample::ratio).collect();
    let limit = richardson(&ratios[k - 3..], r1, &[1.0, 2.0])?;
    let metric = ratios.iter().map(|r| (r - limit).abs()).collect();
    let mut report = ConvergenceReport::new("ratio", n_values, metric);
    report = match report.clone().with_fit() {
        Ok(r) => r,
        Err(_) => {
            report.notes.push("ratio deviations too small to fit".into());
            report
        }
    };
    report.extrapolated_limit = Some(limit);
    report.series.insert("ratio".into(), ratios);
    report
        .series
        .insert("prop1".into(), samples.iter().map(|s| s.measure_p1).collect());
    report
        .series
        .insert("prop6".into(), samples.iter().map(|s| s.measure_p6).collect());
    report
        .series
        .insert("u".into(), samples.iter().map(|s| s.u).collect());
    Ok(report)
}
