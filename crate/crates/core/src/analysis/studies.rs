// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::{distance_to_ellipse, extrapolate_last, validate_n_values, ConvergenceReport};
use crate::error::{Error, Result};
use crate::geometry::{CurveKind, ForceCenter, PlanarCurve, Plane, Vector3};
use crate::integrator::{integrate, ForceLaw};
use crate::parallel::{ordered_map, sweep_threads};
use crate::polygon::{construct, PolygonOrbit, Termination};

/// Slack applied to the chord-difference bound at finite `n`.
pub const BOUND_MARGIN: f64 = 1.5;

fn build_polygons(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u_start: f64,
    length: f64,
    n_values: &[usize],
) -> Result<Vec<PolygonOrbit>> {
    ordered_map(n_values, sweep_threads(), |&n| {
        construct(curve, center, u_start, length / n as f64, n)
    })
    .into_iter()
    .collect()
}

fn note_early_stops(report: &mut ConvergenceReport, orbits: &[PolygonOrbit]) {
    for (n, orbit) in report.n_values.iter().zip(orbits) {
        if orbit.termination() != Termination::MaxSteps {
            report.notes.push(format!(
                "n = {n}: construction ended with {} after {} chords",
                orbit.termination().as_str(),
                orbit.chords().len()
            ));
        }
    }
}

/// Longest chord of the `n`-chord polygon with `s1 = L / n`, for each `n`.
pub fn chord_decay_study(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u_start: f64,
    length: f64,
    n_values: &[usize],
) -> Result<ConvergenceReport> {
    validate_n_values(n_values)?;
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidInput(format!("length must be positive, got {length}")));
    }
    let orbits = build_polygons(curve, center, u_start, length, n_values)?;
    let max_chord: Vec<f64> = orbits
        .iter()
        .map(|o| o.chords().iter().copied().fold(0.0, f64::max))
        .collect();
    let mut report = ConvergenceReport::new("chords", n_values, max_chord).with_fit()?;
    report.series.insert(
        "chord_count".into(),
        orbits.iter().map(|o| o.chords().len() as f64).collect(),
    );
    if let Some(slope) = report.log_log_slope {
        report.extrapolated_limit = extrapolate_last(n_values, &report.metric, -slope);
    }
    note_early_stops(&mut report, &orbits);
    Ok(report)
}

/// Outcome of comparing `sum |e(j)|` with `s1^2 (n - 1) c * margin`, where
/// `c` is the largest curvature over the traversed arc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub chords: usize,
    pub lhs: f64,
    /// Signed sum `e(1) + ... + e(n-1)`, for comparison with `lhs`.
    pub signed_sum: f64,
    pub rhs: f64,
    pub margin: f64,
    pub max_curvature: f64,
    pub satisfied: bool,
    /// Signed and absolute sums differ by more than 10%.
    pub sign_flag: bool,
}

pub fn appendix_a_bound_check(orbit: &PolygonOrbit, curve: &PlanarCurve) -> Result<BoundCheck> {
    appendix_a_bound_check_with_margin(orbit, curve, BOUND_MARGIN)
}

pub fn appendix_a_bound_check_with_margin(
    orbit: &PolygonOrbit,
    curve: &PlanarCurve,
    margin: f64,
) -> Result<BoundCheck> {
    let chords = orbit.chords();
    let Some(&s1) = chords.first() else {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    };
    let e = orbit.chord_differences();
    let lhs: f64 = e.iter().map(|x| x.abs()).sum();
    let signed_sum: f64 = e.iter().sum();
    let vs = orbit.vertices();
    let (_, c) = curve.max_curvature(vs[0].u, vs[vs.len() - 1].u)?;
    let n = chords.len();
    let rhs = s1 * s1 * (n.saturating_sub(1)) as f64 * c * margin;
    Ok(BoundCheck {
        chords: n,
        lhs,
        signed_sum,
        rhs,
        margin,
        max_curvature: c,
        satisfied: lhs <= rhs,
        sign_flag: lhs > 0.0 && (lhs - signed_sum.abs()) > 0.1 * lhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStudy {
    pub n_values: Vec<usize>,
    pub checks: Vec<BoundCheck>,
    /// The largest-`n` polygon checked again with margin 1.
    pub asymptotic: BoundCheck,
}

impl BoundStudy {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied) && self.asymptotic.satisfied
    }

    pub fn to_report(&self) -> Result<ConvergenceReport> {
        let lhs: Vec<f64> = self.checks.iter().map(|c| c.lhs).collect();
        let mut report = ConvergenceReport::new("bound", &self.n_values, lhs);
        if report.metric.iter().filter(|m| **m > 0.0).count() >= 3 {
            report = report.with_fit()?;
        } else {
            report.notes.push("chord differences vanish; no slope fitted".into());
        }
        report
            .series
            .insert("rhs".into(), self.checks.iter().map(|c| c.rhs).collect());
        report.series.insert(
            "signed_sum".into(),
            self.checks.iter().map(|c| c.signed_sum).collect(),
        );
        report.series.insert(
            "satisfied".into(),
            self.checks.iter().map(|c| f64::from(u8::from(c.satisfied))).collect(),
        );
        report.notes.push(format!(
            "margin {} at every n; margin 1.0 at n = {}: lhs {:e} rhs {:e} -> {}",
            self.checks.first().map_or(BOUND_MARGIN, |c| c.margin),
            self.n_values.last().copied().unwrap_or(0),
            self.asymptotic.lhs,
            self.asymptotic.rhs,
            if self.asymptotic.satisfied { "satisfied" } else { "violated" }
        ));
        for (n, c) in self.n_values.iter().zip(&self.checks) {
            if c.sign_flag {
                report
                    .notes
                    .push(format!("n = {n}: signed and absolute difference sums differ by >10%"));
            }
        }
        Ok(report)
    }
}

/// Runs the chord-difference bound over a sweep with `s1 = L / n`.
pub fn bound_study(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u_start: f64,
    length: f64,
    n_values: &[usize],
) -> Result<BoundStudy> {
    validate_n_values(n_values)?;
    let orbits = build_polygons(curve, center, u_start, length, n_values)?;
    let checks = orbits
        .iter()
        .map(|o| appendix_a_bound_check(o, curve))
        .collect::<Result<Vec<_>>>()?;
    let asymptotic = appendix_a_bound_check_with_margin(orbits.last().expect("n >= 3"), curve, 1.0)?;
    Ok(BoundStudy {
        n_values: n_values.to_vec(),
        checks,
        asymptotic,
    })
}

/// Arc length covered by the `n`-chord polygon with `s1 = L / n`, measured
/// against its limit: `L` itself on a circle, otherwise the largest-`n` run.
pub fn coverage_convergence(
    curve: &PlanarCurve,
    center: &ForceCenter,
    u_start: f64,
    length: f64,
    n_values: &[usize],
) -> Result<ConvergenceReport> {
    validate_n_values(n_values)?;
    if !(length >= 0.0 && length.is_finite()) {
        return Err(Error::InvalidInput(format!("length must be non-negative, got {length}")));
    }
    if length == 0.0 {
        let zeros = vec![0.0; n_values.len()];
        let mut report = ConvergenceReport::new("coverage", n_values, zeros.clone());
        report.series.insert("covered_arc".into(), zeros.clone());
        report.series.insert("chord_sum".into(), zeros);
        report.extrapolated_limit = Some(0.0);
        report.notes.push("zero length: every polygon is empty".into());
        return Ok(report);
    }
    let orbits = build_polygons(curve, center, u_start, length, n_values)?;
    let covered = orbits
        .iter()
        .map(|o| {
            let vs = o.vertices();
            curve.arc_length(vs[0].u, vs[vs.len() - 1].u)
        })
        .collect::<Result<Vec<f64>>>()?;
    let chord_sum: Vec<f64> = orbits.iter().map(PolygonOrbit::coverage_length).collect();
    let analytic = matches!(curve.kind(), CurveKind::Circle { .. });
    let reference = if analytic {
        length
    } else {
        *covered.last().expect("n >= 3")
    };
    let metric: Vec<f64> = covered.iter().map(|c| (c - reference).abs()).collect();
    let mut report = ConvergenceReport::new("coverage", n_values, metric).with_fit()?;
    report.series.insert("covered_arc".into(), covered.clone());
    report.series.insert("chord_sum".into(), chord_sum);
    report.extrapolated_limit = if analytic {
        Some(length)
    } else {
        report
            .log_log_slope
            .and_then(|s| extrapolate_last(n_values, &covered, -s))
    };
    report.notes.push(if analytic {
        "reference: requested length (circle)".into()
    } else {
        "reference: largest-n run".into()
    });
    note_early_stops(&mut report, &orbits);
    Ok(report)
}

fn harmonic_solution(r0: Vector3, v0: Vector3, center: Vector3, k: f64, t: f64) -> Vector3 {
    let w = k.sqrt();
    center + (r0 - center) * (w * t).cos() + v0 * ((w * t).sin() / w)
}

/// Global position error of the drift-kick integrator. Linear laws are
/// compared with the exact harmonic solution at every step; other laws with
/// the finest run at the time grid of the coarsest, which requires every `n`
/// to be a multiple of the smallest.
pub fn integrator_order_study(
    r0: Vector3,
    v0: Vector3,
    law: &ForceLaw,
    center: Vector3,
    total_time: f64,
    n_values: &[usize],
) -> Result<ConvergenceReport> {
    validate_n_values(n_values)?;
    let runs = ordered_map(n_values, sweep_threads(), |&n| {
        integrate(r0, v0, law, center, total_time, n)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (metric, note) = match *law {
        ForceLaw::Linear { k } if k > 0.0 => {
            let m = runs
                .iter()
                .map(|tr| {
                    tr.samples
                        .iter()
                        .map(|s| {
                            let exact = harmonic_solution(r0, v0, center, k, s.j as f64 * tr.dt);
                            s.state.r.distance(exact)
                        })
                        .fold(0.0, f64::max)
                })
                .collect();
            (m, "reference: exact harmonic solution")
        }
        _ => {
            let base = n_values[0];
            if n_values.iter().any(|n| n % base != 0) {
                return Err(Error::InvalidInput(
                    "self-convergence needs every n to be a multiple of the smallest".into(),
                ));
            }
            let finest = runs.last().expect("n >= 3");
            let at = |tr: &crate::integrator::ImpulseTrajectory, k: usize, n: usize| {
                let j = k * (n / base);
                tr.samples
                    .iter()
                    .find(|s| s.j == j)
                    .map(|s| s.state.r)
                    .ok_or_else(|| Error::InvalidInput("decimated trajectory in order study".into()))
            };
            let nf = *n_values.last().expect("n >= 3");
            let mut m = Vec::with_capacity(runs.len());
            for (tr, &n) in runs.iter().zip(n_values) {
                let mut worst: f64 = 0.0;
                for k in 0..=base {
                    worst = worst.max(at(tr, k, n)?.distance(at(finest, k, nf)?));
                }
                m.push(worst);
            }
            (m, "reference: finest run (self-convergence)")
        }
    };
    let mut report = ConvergenceReport::new("order", n_values, metric).with_fit()?;
    report.notes.push(note.into());
    Ok(report)
}

/// Largest distance of the trajectory from the ellipse with semi-axes `a`
/// (along `plane.e1`) and `b` (along `plane.e2`) centred on the plane origin.
pub fn ellipse_deviation_study(
    r0: Vector3,
    v0: Vector3,
    law: &ForceLaw,
    total_time: f64,
    n_values: &[usize],
    plane: &Plane,
    semi_axes: (f64, f64),
) -> Result<ConvergenceReport> {
    validate_n_values(n_values)?;
    let (a, b) = semi_axes;
    let metric = ordered_map(n_values, sweep_threads(), |&n| {
        let tr = integrate(r0, v0, law, plane.origin, total_time, n)?;
        Ok(tr
            .positions()
            .map(|p| {
                let d = p - plane.origin;
                let off = d.dot(plane.normal);
                let inplane = distance_to_ellipse(a, b, d.dot(plane.e1), d.dot(plane.e2));
                inplane.hypot(off)
            })
            .fold(0.0, f64::max))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    ConvergenceReport::new("ellipse-deviation", n_values, metric).with_fit()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn circle_long() -> PlanarCurve {
        PlanarCurve::circle(1.0).unwrap().with_domain(0.0, 4.0 * PI).unwrap()
    }

    #[test]
    fn two_n_values_rejected() {
        let r = chord_decay_study(&circle_long(), &ForceCenter::origin(), 0.0, TAU, &[16, 32]);
        assert!(matches!(r, Err(Error::InsufficientData { needed: 3, got: 2 })));
    }

    #[test]
    fn circle_chords_decay_first_order() {
        let r = chord_decay_study(&circle_long(), &ForceCenter::origin(), 0.0, TAU, &[16, 32, 64, 128])
            .unwrap();
        assert!((r.log_log_slope.unwrap() + 1.0).abs() < 0.02);
        assert!(r.notes.is_empty(), "{:?}", r.notes);
    }

    #[test]
    fn circle_bound_is_trivial() {
        let curve = circle_long();
        let orbit = construct(&curve, &ForceCenter::origin(), 0.0, TAU / 64.0, 64).unwrap();
        let b = appendix_a_bound_check(&orbit, &curve).unwrap();
        assert!(b.lhs < 1e-12);
        assert!(b.satisfied);
        assert!((b.max_curvature - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_length_coverage() {
        let r = coverage_convergence(&circle_long(), &ForceCenter::origin(), 0.0, 0.0, &[4, 8, 16])
            .unwrap();
        assert!(r.metric.iter().all(|m| *m == 0.0));
        assert_eq!(r.extrapolated_limit, Some(0.0));
    }

    #[test]
    fn hooke_order_against_exact_solution() {
        let law = ForceLaw::Linear { k: 1.0 };
        let r = integrator_order_study(
            Vector3::X,
            Vector3::new(0.0, 0.5, 0.0),
            &law,
            Vector3::ZERO,
            TAU,
            &[100, 200, 400, 800],
        )
        .unwrap();
        assert!((r.log_log_slope.unwrap() + 1.0).abs() < 0.1);
    }

    #[test]
    fn kepler_self_convergence() {
        let law = ForceLaw::InverseSquare { gm: 1.0 };
        let r = integrator_order_study(
            Vector3::X,
            Vector3::new(0.0, 1.1, 0.0),
            &law,
            Vector3::ZERO,
            3.0,
            &[500, 1000, 2000, 16000],
        )
        .unwrap();
        let s = r.log_log_slope.unwrap();
        assert!(s < -0.8 && s > -1.3, "{s}");
        assert!(integrator_order_study(
            Vector3::X,
            Vector3::new(0.0, 1.1, 0.0),
            &law,
            Vector3::ZERO,
            3.0,
            &[500, 700, 1000],
        )
        .is_err());
    }
}
