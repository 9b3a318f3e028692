// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::sampled::SampledCurve;
use super::vector::Vector3;
use crate::error::{Error, Result};

/// An oriented plane with a right-handed orthonormal frame.
///
/// `e1 x e2 = normal`; increasing curve parameter runs counter-clockwise
/// when viewed from the side the normal points to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub origin: Vector3,
    pub e1: Vector3,
    pub e2: Vector3,
    pub normal: Vector3,
}

impl Plane {
    pub fn xy() -> Self {
        Plane {
            origin: Vector3::ZERO,
            e1: Vector3::X,
            e2: Vector3::Y,
            normal: Vector3::Z,
        }
    }

    /// Plane through `origin` with the given normal. `reference` fixes the
    /// in-plane `e1` axis (its projection onto the plane is used).
    pub fn new(origin: Vector3, normal: Vector3, reference: Vector3) -> Result<Self> {
        origin.ensure_finite("plane origin")?;
        let normal = normal
            .ensure_finite("plane normal")?
            .normalized()
            .ok_or_else(|| Error::InvalidInput("plane normal is zero".into()))?;
        let projected = reference - normal * reference.dot(normal);
        let e1 = projected
            .normalized()
            .filter(|_| projected.norm() > 1e-8 * reference.norm())
            .ok_or_else(|| Error::InvalidInput("reference axis is parallel to the normal".into()))?;
        let e2 = normal.cross(e1);
        Ok(Plane {
            origin,
            e1,
            e2,
            normal,
        })
    }

    /// Plane through `origin` with the given normal and an automatically chosen `e1`.
    pub fn from_normal(origin: Vector3, normal: Vector3) -> Result<Self> {
        let n = normal.normalized().unwrap_or(Vector3::Z);
        // axis least aligned with the normal
        let reference = if n.x.abs() <= n.y.abs() && n.x.abs() <= n.z.abs() {
            Vector3::X
        } else if n.y.abs() <= n.z.abs() {
            Vector3::Y
        } else {
            Vector3::Z
        };
        Plane::new(origin, normal, reference)
    }

    #[inline]
    pub fn lift(&self, x: f64, y: f64) -> Vector3 {
        self.origin + self.e1 * x + self.e2 * y
    }

    #[inline]
    pub fn lift_direction(&self, x: f64, y: f64) -> Vector3 {
        self.e1 * x + self.e2 * y
    }

    #[inline]
    pub fn signed_distance(&self, p: Vector3) -> f64 {
        (p - self.origin).dot(self.normal)
    }
}

impl Default for Plane {
    fn default() -> Self {
        Plane::xy()
    }
}

/// Closed-form and sampled curve families.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveKind {
    /// Ellipse with a focus at the plane origin, perihelion on `+e1` at u = 0.
    /// The parameter is the eccentric anomaly.
    EllipseFocus { semi_major: f64, eccentricity: f64 },
    /// Ellipse centred on the plane origin, semi-axis `semi_major` along `e1`.
    EllipseCenter { semi_major: f64, semi_minor: f64 },
    Circle { radius: f64 },
    CustomSampled(SampledCurve),
}

/// Position and first two parameter derivatives at one parameter value.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Jet {
    pub point: Vector3,
    pub d1: Vector3,
    pub d2: Vector3,
}

/// A parametric curve `R(u)` lying in a plane, on a closed parameter interval.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarCurve {
    kind: CurveKind,
    domain: (f64, f64),
    plane: Plane,
}

impl PlanarCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        positive(radius, "circle radius")?;
        Ok(Self::analytic(CurveKind::Circle { radius }))
    }

    pub fn ellipse_center(semi_major: f64, semi_minor: f64) -> Result<Self> {
        positive(semi_major, "semi-major axis")?;
        positive(semi_minor, "semi-minor axis")?;
        Ok(Self::analytic(CurveKind::EllipseCenter {
            semi_major,
            semi_minor,
        }))
    }

    pub fn ellipse_focus(semi_major: f64, eccentricity: f64) -> Result<Self> {
        positive(semi_major, "semi-major axis")?;
        if !(0.0..1.0).contains(&eccentricity) {
            return Err(Error::InvalidInput(format!(
                "eccentricity must lie in [0, 1), got {eccentricity}"
            )));
        }
        Ok(Self::analytic(CurveKind::EllipseFocus {
            semi_major,
            eccentricity,
        }))
    }

    pub fn sampled(curve: SampledCurve) -> Self {
        let plane = curve.plane();
        let domain = curve.parameter_range();
        PlanarCurve {
            kind: CurveKind::CustomSampled(curve),
            domain,
            plane,
        }
    }

    fn analytic(kind: CurveKind) -> Self {
        PlanarCurve {
            kind,
            domain: (0.0, TAU),
            plane: Plane::xy(),
        }
    }

    /// Restricts or extends the parameter interval. Closed analytic curves are
    /// periodic, so a domain longer than one turn traverses them repeatedly.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidInput(format!("invalid domain [{lo}, {hi}]")));
        }
        if let CurveKind::CustomSampled(s) = &self.kind {
            let (a, b) = s.parameter_range();
            if lo < a || hi > b {
                return Err(Error::InvalidInput(format!(
                    "domain [{lo}, {hi}] exceeds sampled range [{a}, {b}]"
                )));
            }
        }
        self.domain = (lo, hi);
        Ok(self)
    }

    /// Places an analytic curve in another plane. Sampled curves carry their
    /// own plane and reject this.
    pub fn in_plane(mut self, plane: Plane) -> Result<Self> {
        if matches!(self.kind, CurveKind::CustomSampled(_)) {
            return Err(Error::InvalidInput(
                "sampled curves are positioned by their data".into(),
            ));
        }
        self.plane = plane;
        Ok(self)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn plane_normal(&self) -> Vector3 {
        self.plane.normal
    }

    pub fn plane_point(&self) -> Vector3 {
        self.plane.origin
    }

    /// The natural force centre of the family: the focus for `EllipseFocus`,
    /// the centre otherwise (centroid of the data for sampled curves).
    pub fn natural_center(&self) -> Vector3 {
        match &self.kind {
            CurveKind::CustomSampled(s) => s.centroid(),
            _ => self.plane.origin,
        }
    }

    /// Characteristic length used to scale tolerances.
    pub fn scale(&self) -> f64 {
        match &self.kind {
            CurveKind::EllipseFocus { semi_major, .. } => *semi_major,
            CurveKind::EllipseCenter {
                semi_major,
                semi_minor,
            } => semi_major.max(*semi_minor),
            CurveKind::Circle { radius } => *radius,
            CurveKind::CustomSampled(s) => s.extent(),
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.domain.0 && u <= self.domain.1
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain {
                u,
                lo: self.domain.0,
                hi: self.domain.1,
            })
        }
    }

    /// Evaluates without the domain check. Callers guarantee `u` is in range.
    pub(crate) fn jet(&self, u: f64) -> Jet {
        let (p, d1, d2) = match &self.kind {
            CurveKind::Circle { radius: r } => {
                let (s, c) = u.sin_cos();
                ((r * c, r * s), (-r * s, r * c), (-r * c, -r * s))
            }
            CurveKind::EllipseCenter {
                semi_major: a,
                semi_minor: b,
            } => {
                let (s, c) = u.sin_cos();
                ((a * c, b * s), (-a * s, b * c), (-a * c, -b * s))
            }
            CurveKind::EllipseFocus {
                semi_major: a,
                eccentricity: e,
            } => {
                let b = a * (1.0 - e * e).sqrt();
                let (s, c) = u.sin_cos();
                ((a * (c - e), b * s), (-a * s, b * c), (-a * c, -b * s))
            }
            CurveKind::CustomSampled(sc) => return sc.jet(u),
        };
        Jet {
            point: self.plane.lift(p.0, p.1),
            d1: self.plane.lift_direction(d1.0, d1.1),
            d2: self.plane.lift_direction(d2.0, d2.1),
        }
    }

    pub fn evaluate(&self, u: f64) -> Result<Vector3> {
        self.check_domain(u)?;
        Ok(self.jet(u).point)
    }

    pub fn derivative(&self, u: f64) -> Result<Vector3> {
        self.check_domain(u)?;
        Ok(self.jet(u).d1)
    }

    pub fn second_derivative(&self, u: f64) -> Result<Vector3> {
        self.check_domain(u)?;
        Ok(self.jet(u).d2)
    }

    /// Unit tangent in the direction of increasing `u`.
    pub fn tangent(&self, u: f64) -> Result<Vector3> {
        self.check_domain(u)?;
        let d1 = self.jet(u).d1;
        if d1.norm() <= 1e-14 * self.scale() {
            return Err(Error::DegenerateParameterization { u });
        }
        d1.normalized()
            .ok_or(Error::DegenerateParameterization { u })
    }

    /// Unsigned curvature `|R' x R''| / |R'|^3`.
    pub fn curvature(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        let j = self.jet(u);
        let speed = j.d1.norm();
        if speed <= 1e-14 * self.scale() {
            return Err(Error::DegenerateParameterization { u });
        }
        Ok(j.d1.cross(j.d2).norm() / (speed * speed * speed))
    }

    /// Arc length between two parameters (signed: negative when `u1 < u0`).
    pub fn arc_length(&self, u0: f64, u1: f64) -> Result<f64> {
        self.check_domain(u0)?;
        self.check_domain(u1)?;
        if u1 < u0 {
            return Ok(-self.arc_length(u1, u0)?);
        }
        let mut breaks = vec![u0];
        if let CurveKind::CustomSampled(s) = &self.kind {
            breaks.extend(s.knots_between(u0, u1));
        }
        breaks.push(u1);
        let mut total = 0.0;
        for w in breaks.windows(2) {
            total += gauss_legendre(w[0], w[1], 0.05, |u| self.jet(u).d1.norm());
        }
        Ok(total)
    }

    /// Maximum curvature on `[u0, u1]` and where it occurs, by dense sampling
    /// followed by golden-section refinement around the best sample.
    pub fn max_curvature(&self, u0: f64, u1: f64) -> Result<(f64, f64)> {
        self.check_domain(u0)?;
        self.check_domain(u1)?;
        let (lo, hi) = if u0 <= u1 { (u0, u1) } else { (u1, u0) };
        if hi == lo {
            return Ok((lo, self.curvature(lo)?));
        }
        let samples = 4096;
        let h = (hi - lo) / samples as f64;
        let mut best = (lo, self.curvature(lo)?);
        for i in 1..=samples {
            let u = if i == samples { hi } else { lo + h * i as f64 };
            let k = self.curvature(u)?;
            if k > best.1 {
                best = (u, k);
            }
        }
        let (a, b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
        let refined = golden_max(a, b, |u| self.curvature(u).unwrap_or(0.0));
        let k = self.curvature(refined)?;
        if k > best.1 {
            best = (refined, k);
        }
        Ok(best)
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must be positive and finite, got {v}")))
    }
}

/// The force centre S of a central-force construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceCenter(pub Vector3);

impl ForceCenter {
    pub fn new(position: Vector3) -> Result<Self> {
        Ok(ForceCenter(position.ensure_finite("force center")?))
    }

    pub fn origin() -> Self {
        ForceCenter(Vector3::ZERO)
    }

    pub fn position(&self) -> Vector3 {
        self.0
    }
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre quadrature with panels no wider than `max_panel`.
pub(crate) fn gauss_legendre(a: f64, b: f64, max_panel: f64, f: impl Fn(f64) -> f64) -> f64 {
    if b == a {
        return 0.0;
    }
    let panels = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-13 {
            break;
        }
    }
    0.5 * (a + b)
}
