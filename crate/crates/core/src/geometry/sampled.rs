// SPDX-License-Identifier: Apache-2.0

//! User-supplied curves given as a table of `(u, x, y, z)` samples.
//!
//! Between samples the curve is the cubic through the four nearest samples
//! (local Lagrange interpolation), so it reproduces cubics exactly and its
//! first and second derivatives come from the same polynomial.

use std::io::Read;

use super::curve::{Jet, Plane};
use super::vector::Vector3;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SampledCurve {
    params: Vec<f64>,
    points: Vec<Vector3>,
    plane: Plane,
}

impl SampledCurve {
    /// Builds a curve from samples, fitting the plane from the data.
    pub fn new(params: Vec<f64>, points: Vec<Vector3>) -> Result<Self> {
        validate(&params, &points)?;
        let plane = fit_plane(&points)?;
        let curve = SampledCurve {
            params,
            points,
            plane,
        };
        curve.check_coplanar()?;
        Ok(curve)
    }

    /// Builds a curve whose samples are known to lie in `plane`. Needed for
    /// collinear data, which does not determine a plane on its own.
    pub fn with_plane(params: Vec<f64>, points: Vec<Vector3>, plane: Plane) -> Result<Self> {
        validate(&params, &points)?;
        let curve = SampledCurve {
            params,
            points,
            plane,
        };
        curve.check_coplanar()?;
        Ok(curve)
    }

    /// Reads CSV with header `u,x,y,z`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Parse(e.to_string()))?
            .iter()
            .map(str::to_ascii_lowercase)
            .collect::<Vec<_>>();
        if headers != ["u", "x", "y", "z"] {
            return Err(Error::Parse(format!(
                "expected header u,x,y,z, found {}",
                headers.join(",")
            )));
        }
        let mut params = Vec::new();
        let mut points = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let mut vals = [0.0; 4];
            for (k, v) in vals.iter_mut().enumerate() {
                let field = rec.get(k).ok_or_else(|| {
                    Error::Parse(format!("row {}: expected 4 columns", line + 1))
                })?;
                *v = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {field:?}", line + 1)))?;
            }
            params.push(vals[0]);
            points.push(Vector3::new(vals[1], vals[2], vals[3]));
        }
        SampledCurve::new(params, points)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vector3] {
        &self.points
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    pub fn parameter_range(&self) -> (f64, f64) {
        (self.params[0], self.params[self.params.len() - 1])
    }

    pub fn centroid(&self) -> Vector3 {
        let sum = self.points.iter().fold(Vector3::ZERO, |acc, &p| acc + p);
        sum / self.points.len() as f64
    }

    /// Largest distance of a sample from the centroid.
    pub fn extent(&self) -> f64 {
        let c = self.centroid();
        self.points
            .iter()
            .map(|p| p.distance(c))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    }

    pub(crate) fn knots_between(&self, u0: f64, u1: f64) -> impl Iterator<Item = f64> + '_ {
        self.params.iter().copied().filter(move |&u| u > u0 && u < u1)
    }

    fn check_coplanar(&self) -> Result<()> {
        let tol = 1e-9 * self.extent().max(1.0);
        for (i, p) in self.points.iter().enumerate() {
            let d = self.plane.signed_distance(*p);
            if d.abs() > tol {
                return Err(Error::InvalidInput(format!(
                    "sample {i} lies {d:e} off the fitted plane"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn jet(&self, u: f64) -> Jet {
        let n = self.params.len();
        // interval containing u, then the 4-point stencil centred on it
        let i = self.params.partition_point(|&t| t <= u).saturating_sub(1);
        let start = i.saturating_sub(1).min(n - 4);
        let t = &self.params[start..start + 4];
        let mut jet = Jet {
            point: Vector3::ZERO,
            d1: Vector3::ZERO,
            d2: Vector3::ZERO,
        };
        for k in 0..4 {
            let mut denom = 1.0;
            let mut diffs = [0.0; 3];
            let mut m = 0;
            for (l, &tl) in t.iter().enumerate() {
                if l != k {
                    denom *= t[k] - tl;
                    diffs[m] = u - tl;
                    m += 1;
                }
            }
            let [a, b, c] = diffs;
            let w0 = a * b * c / denom;
            let w1 = (b * c + a * c + a * b) / denom;
            let w2 = 2.0 * (a + b + c) / denom;
            let p = self.points[start + k];
            jet.point += p * w0;
            jet.d1 += p * w1;
            jet.d2 += p * w2;
        }
        jet
    }
}

fn validate(params: &[f64], points: &[Vector3]) -> Result<()> {
    if params.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} parameters but {} points",
            params.len(),
            points.len()
        )));
    }
    if params.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: params.len(),
        });
    }
    if params.iter().any(|u| !u.is_finite()) || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("sampled curve"));
    }
    if params.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "sample parameters must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Newell's method: the normal of the closed polygon through the samples.
/// Its orientation makes the sample order counter-clockwise.
fn fit_plane(points: &[Vector3]) -> Result<Plane> {
    let centroid = points.iter().fold(Vector3::ZERO, |a, &p| a + p) / points.len() as f64;
    let mut normal = Vector3::ZERO;
    for (i, &p) in points.iter().enumerate() {
        let q = points[(i + 1) % points.len()];
        let (p, q) = (p - centroid, q - centroid);
        normal += p.cross(q);
    }
    let extent = points
        .iter()
        .map(|p| p.distance(centroid))
        .fold(0.0, f64::max);
    if normal.norm() <= 1e-12 * extent * extent {
        return Err(Error::InvalidInput(
            "samples are collinear; supply the plane explicitly".into(),
        ));
    }
    Plane::from_normal(centroid, normal)
}
