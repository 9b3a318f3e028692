// SPDX-License-Identifier: Apache-2.0

//! Impulse-driven polygonal orbits: straight-line drift for one time step,
//! then an instantaneous velocity change directed at the force centre.
//!
//! The impulse is evaluated at the vertex just reached, so it is parallel to
//! that vertex's radius and `r x v` about the centre is unchanged by it. The
//! drift leaves `r x v` unchanged as well, which makes the discrete angular
//! momentum (and with it the swept twice-area per step and the orbit plane)
//! exact invariants up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector3;

/// Drift segments passing closer than this to the centre are collisions.
pub const SINGULARITY_RADIUS: f64 = 1e-9;

/// Trajectories longer than this keep every k-th state only.
pub const MAX_STORED_STATES: usize = 1_000_000;

/// Attractive central force per unit mass, `|a| = coefficient * |r - S|^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForceLaw {
    /// Hooke's law, `a = -k (r - S)`.
    Linear { k: f64 },
    /// `a = -GM (r - S) / |r - S|^3`.
    InverseSquare { gm: f64 },
    PowerLaw { coefficient: f64, exponent: f64 },
}

impl ForceLaw {
    pub fn coefficient(&self) -> f64 {
        match *self {
            ForceLaw::Linear { k } => k,
            ForceLaw::InverseSquare { gm } => gm,
            ForceLaw::PowerLaw { coefficient, .. } => coefficient,
        }
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            ForceLaw::Linear { .. } => 1.0,
            ForceLaw::InverseSquare { .. } => -2.0,
            ForceLaw::PowerLaw { exponent, .. } => exponent,
        }
    }

    /// A zero coefficient is accepted and gives force-free motion.
    pub fn validate(&self) -> Result<()> {
        let (c, p) = (self.coefficient(), self.exponent());
        if !(c.is_finite() && p.is_finite()) {
            return Err(Error::NonFinite("force law"));
        }
        if c < 0.0 {
            return Err(Error::InvalidInput(format!(
                "force coefficient must be non-negative (attractive), got {c}"
            )));
        }
        Ok(())
    }

    /// Acceleration at `r`; always a scalar multiple of `S - r`.
    #[inline]
    pub fn acceleration(&self, r: Vector3, center: Vector3) -> Vector3 {
        let d = r - center;
        let dist = d.norm();
        let scale = match *self {
            ForceLaw::Linear { k } => -k,
            ForceLaw::InverseSquare { gm } => -gm / (dist * dist * dist),
            ForceLaw::PowerLaw {
                coefficient,
                exponent,
            } => -coefficient * dist.powf(exponent - 1.0),
        };
        d * scale
    }

    /// Potential energy per unit mass (zero-force laws give zero).
    pub fn potential(&self, r: Vector3, center: Vector3) -> f64 {
        let c = self.coefficient();
        let p = self.exponent();
        let dist = (r - center).norm();
        if c == 0.0 {
            0.0
        } else if p == -1.0 {
            c * dist.ln()
        } else {
            c * dist.powf(p + 1.0) / (p + 1.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub r: Vector3,
    pub v: Vector3,
}

impl State {
    pub fn new(r: Vector3, v: Vector3) -> Self {
        State { r, v }
    }

    /// `(r - S) x v`.
    pub fn angular_momentum(&self, center: Vector3) -> Vector3 {
        (self.r - center).cross(self.v)
    }
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(p: Vector3, a: Vector3, b: Vector3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    };
    p.distance(a + ab * t)
}

/// Drift then kick: `r' = r + v dt`, `v' = v + a(r') dt`.
pub fn step(state: State, law: &ForceLaw, center: Vector3, dt: f64) -> Result<State> {
    step_indexed(state, law, center, dt, 0)
}

fn step_indexed(state: State, law: &ForceLaw, center: Vector3, dt: f64, index: usize) -> Result<State> {
    let r_new = state.r + state.v * dt;
    let miss = segment_distance(center, state.r, r_new);
    if miss <= SINGULARITY_RADIUS {
        return Err(Error::Singularity {
            step: index,
            distance: miss,
        });
    }
    let v_new = state.v + law.acceleration(r_new, center) * dt;
    if !(r_new.is_finite() && v_new.is_finite()) {
        return Err(Error::NonFinite("integrator state"));
    }
    Ok(State { r: r_new, v: v_new })
}

/// Conservation diagnostics accumulated over every step, stored or not.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `max_j |L_j - L_0| / |L_0|` (absolute when `L_0 = 0`).
    pub max_angular_momentum_drift: f64,
    /// `max_j ||L_j| - |L_0|| / |L_0|`.
    pub max_angular_momentum_magnitude_drift: f64,
    /// Largest distance of any position from the plane through the first
    /// position with normal `L_0`.
    pub max_out_of_plane: f64,
    pub min_area2: f64,
    pub max_area2: f64,
    /// Relative energy change; reported only, not conserved by the scheme.
    pub max_energy_drift: f64,
}

impl Diagnostics {
    /// `(max - min) / max` over all per-step twice-areas.
    pub fn area_spread(&self) -> f64 {
        if self.max_area2 > 0.0 {
            (self.max_area2 - self.min_area2) / self.max_area2
        } else {
            0.0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Step index, so `t = j * dt`.
    pub j: usize,
    pub state: State,
    pub angular_momentum: Vector3,
    /// `|(r_j - S) x (r_{j+1} - r_j)|`; `None` for the final state.
    pub area2_step: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpulseTrajectory {
    pub law: ForceLaw,
    pub center: Vector3,
    pub total_time: f64,
    pub steps: usize,
    pub dt: f64,
    /// Every `stride`-th state is stored (1 unless decimated).
    pub stride: usize,
    pub samples: Vec<Sample>,
    pub diagnostics: Diagnostics,
}

impl ImpulseTrajectory {
    pub fn positions(&self) -> impl Iterator<Item = Vector3> + '_ {
        self.samples.iter().map(|s| s.state.r)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(move |s| s.j as f64 * self.dt)
    }

    pub fn angular_momenta(&self) -> impl Iterator<Item = Vector3> + '_ {
        self.samples.iter().map(|s| s.angular_momentum)
    }

    pub fn swept_areas2(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().filter_map(|s| s.area2_step)
    }

    /// `r_{j+1} + r_{j-1} - 2 r_j`, which equals `a(r_j) dt^2` under the
    /// drift-kick rule and is therefore parallel to `S - r_j`.
    pub fn second_difference_deflection(&self, j: usize) -> Result<Vector3> {
        if self.stride != 1 {
            return Err(Error::InvalidInput(
                "second differences need an undecimated trajectory".into(),
            ));
        }
        if j == 0 || j + 1 >= self.samples.len() {
            return Err(Error::Index {
                index: j,
                len: self.samples.len(),
            });
        }
        let r = |k: usize| self.samples[k].state.r;
        Ok(r(j + 1) + r(j - 1) - r(j) * 2.0)
    }
}

/// Integrates `n` drift-kick steps of size `dt = T / n`.
pub fn integrate(
    r0: Vector3,
    v0: Vector3,
    law: &ForceLaw,
    center: Vector3,
    total_time: f64,
    n: usize,
) -> Result<ImpulseTrajectory> {
    law.validate()?;
    r0.ensure_finite("initial position")?;
    v0.ensure_finite("initial velocity")?;
    center.ensure_finite("force center")?;
    if n == 0 {
        return Err(Error::InvalidInput("step count must be at least 1".into()));
    }
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(Error::InvalidInput(format!(
            "total time must be positive, got {total_time}"
        )));
    }
    let start_dist = (r0 - center).norm();
    if start_dist <= SINGULARITY_RADIUS {
        return Err(Error::Singularity {
            step: 0,
            distance: start_dist,
        });
    }

    let dt = total_time / n as f64;
    let stride = n.div_ceil(MAX_STORED_STATES).max(1);
    let mut state = State::new(r0, v0);
    let l0 = state.angular_momentum(center);
    let l0_norm = l0.norm();
    let plane_normal = l0.normalized();
    let energy = |s: &State| 0.5 * s.v.norm_squared() + law.potential(s.r, center);
    let e0 = energy(&state);

    let mut diag = Diagnostics {
        max_angular_momentum_drift: 0.0,
        max_angular_momentum_magnitude_drift: 0.0,
        max_out_of_plane: 0.0,
        min_area2: f64::INFINITY,
        max_area2: 0.0,
        max_energy_drift: 0.0,
    };
    let mut samples = Vec::with_capacity(n / stride + 2);
    for j in 0..n {
        let next = step_indexed(state, law, center, dt, j + 1)?;
        let area2 = (state.r - center).cross(next.r - state.r).norm();
        diag.min_area2 = diag.min_area2.min(area2);
        diag.max_area2 = diag.max_area2.max(area2);
        if j % stride == 0 {
            samples.push(Sample {
                j,
                state,
                angular_momentum: state.angular_momentum(center),
                area2_step: Some(area2),
            });
        }
        state = next;

        let l = state.angular_momentum(center);
        let denom = if l0_norm > 0.0 { l0_norm } else { 1.0 };
        diag.max_angular_momentum_drift = diag.max_angular_momentum_drift.max((l - l0).norm() / denom);
        diag.max_angular_momentum_magnitude_drift = diag
            .max_angular_momentum_magnitude_drift
            .max((l.norm() - l0_norm).abs() / denom);
        if let Some(nrm) = plane_normal {
            diag.max_out_of_plane = diag.max_out_of_plane.max((state.r - r0).dot(nrm).abs());
        }
        let e = energy(&state);
        let e_scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        diag.max_energy_drift = diag.max_energy_drift.max((e - e0).abs() / e_scale);
    }
    samples.push(Sample {
        j: n,
        state,
        angular_momentum: state.angular_momentum(center),
        area2_step: None,
    });
    Ok(ImpulseTrajectory {
        law: *law,
        center,
        total_time,
        steps: n,
        dt,
        stride,
        samples,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn single_kepler_step() {
        let law = ForceLaw::InverseSquare { gm: 1.0 };
        let s = step(State::new(Vector3::X, Vector3::Y), &law, Vector3::ZERO, 0.1).unwrap();
        assert_eq!(s.r, Vector3::new(1.0, 0.1, 0.0));
        // 1.01^(3/2) = 1.01 * sqrt(1.01)
        let k = 0.1 / (1.01 * 1.004_987_562_112_089);
        let expected = Vector3::new(-k, 1.0 - 0.1 * k, 0.0);
        assert!((s.v - expected).norm() < 1e-15);
        let l = s.r.cross(s.v);
        assert!((l - Vector3::Z).norm() < 1e-16);
    }

    #[test]
    fn zero_force_is_inertial() {
        let law = ForceLaw::Linear { k: 0.0 };
        let st = State::new(Vector3::new(1.0, 2.0, 3.0), Vector3::new(-0.5, 0.25, 1.0));
        let s = step(st, &law, Vector3::ZERO, 0.3).unwrap();
        assert_eq!(s.r, st.r + st.v * 0.3);
        assert_eq!(s.v, st.v);
    }

    #[test]
    fn single_step_integration() {
        let law = ForceLaw::Linear { k: 2.0 };
        let (r0, v0) = (Vector3::new(1.0, 0.0, 0.5), Vector3::new(0.0, 0.7, 0.0));
        let traj = integrate(r0, v0, &law, Vector3::ZERO, 0.25, 1).unwrap();
        let s = step(State::new(r0, v0), &law, Vector3::ZERO, 0.25).unwrap();
        assert_eq!(traj.samples.len(), 2);
        assert_eq!(traj.samples[1].state, s);
        assert_eq!(traj.dt, 0.25);
    }

    #[test]
    fn plunge_is_singular() {
        let law = ForceLaw::InverseSquare { gm: 1.0 };
        let err = integrate(Vector3::new(0.001, 0.0, 0.0), Vector3::ZERO, &law, Vector3::ZERO, TAU, 1000)
            .unwrap_err();
        assert!(matches!(err, Error::Singularity { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn second_difference_matches_kick() {
        let law = ForceLaw::Linear { k: 1.0 };
        let traj = integrate(Vector3::X, Vector3::new(0.0, 0.5, 0.0), &law, Vector3::ZERO, TAU, 200).unwrap();
        let dt2 = traj.dt * traj.dt;
        for j in 1..200 {
            let d = traj.second_difference_deflection(j).unwrap();
            let expected = -traj.samples[j].state.r * dt2;
            assert!((d - expected).norm() < 1e-15, "j = {j}");
        }
        assert!(traj.second_difference_deflection(0).is_err());
        assert!(traj.second_difference_deflection(200).is_err());
    }

    #[test]
    fn off_origin_center() {
        let c = Vector3::new(3.0, -2.0, 1.0);
        let law = ForceLaw::PowerLaw { coefficient: 0.8, exponent: -1.5 };
        let traj = integrate(c + Vector3::X, Vector3::new(0.0, 0.9, 0.2), &law, c, 10.0, 5000).unwrap();
        assert!(traj.diagnostics.max_angular_momentum_drift < 1e-12);
        assert!(traj.diagnostics.area_spread() < 1e-11);
    }

    #[test]
    fn rejects_bad_input() {
        let law = ForceLaw::InverseSquare { gm: 1.0 };
        assert!(integrate(Vector3::X, Vector3::Y, &law, Vector3::ZERO, TAU, 0).is_err());
        assert!(integrate(Vector3::X, Vector3::Y, &law, Vector3::ZERO, -1.0, 10).is_err());
        assert!(integrate(Vector3::ZERO, Vector3::Y, &law, Vector3::ZERO, 1.0, 10).is_err());
        let bad = ForceLaw::Linear { k: -1.0 };
        assert!(integrate(Vector3::X, Vector3::Y, &bad, Vector3::ZERO, 1.0, 10).is_err());
    }
}
