// SPDX-License-Identifier: Apache-2.0

//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use polyorb::analysis::{
    bound_study, chord_decay_study, coverage_convergence, ellipse_deviation_study,
};
use polyorb::force_measures::{prop6_limit, ratio_convergence};
use polyorb::geometry::{ForceCenter, PlanarCurve, Plane, Vector3};
use polyorb::integrator::{integrate, ForceLaw, ImpulseTrajectory};
use polyorb::polygon::construct;
use polyorb::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    match result {
        Ok(mut o) => {
            if let Some(limit) = limit {
                o.detail += &format!("; {:.3} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs_f64());
                o.pass &= elapsed < limit;
            } else {
                o.detail += &format!("; {:.3} s", elapsed.as_secs_f64());
            }
            o
        }
        Err(e) => Outcome {
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn kepler_initial(a: f64, e: f64, gm: f64) -> (Vector3, Vector3) {
    let rp = a * (1.0 - e);
    let vp = (gm * (1.0 + e) / rp).sqrt();
    (Vector3::new(rp, 0.0, 0.0), Vector3::new(0.0, vp, 0.0))
}

fn angular_momentum_conservation() -> Result<Outcome> {
    let (r0, v0) = kepler_initial(1.0, 0.5, 1.0);
    let law = ForceLaw::InverseSquare { gm: 1.0 };
    let tr = integrate(r0, v0, &law, Vector3::ZERO, TAU, 100_000)?;
    let l0 = r0.cross(v0).norm();
    // recomputed from stored states as well as from the running diagnostic
    let stored = tr
        .angular_momenta()
        .map(|l| (l.norm() - l0).abs() / l0)
        .fold(0.0, f64::max);
    let drift = stored.max(tr.diagnostics.max_angular_momentum_magnitude_drift);
    outcome(drift <= 1e-11, format!("max relative |L| drift {drift:.3e} (bound 1e-11)"))
}

fn random_runs() -> Result<Vec<ImpulseTrajectory>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0b17);
    let law = ForceLaw::InverseSquare { gm: 1.0 };
    let mut runs = Vec::new();
    for _ in 0..20 {
        let dir = |rng: &mut ChaCha8Rng| loop {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n <= 1.0 {
                break v / n;
            }
        };
        let r_hat = dir(&mut rng);
        let mut t_hat = dir(&mut rng);
        t_hat = (t_hat - r_hat * t_hat.dot(r_hat)).normalized().expect("independent directions");
        let r: f64 = rng.gen_range(0.5..1.5);
        let speed = rng.gen_range(0.6..1.2) * r.recip().sqrt();
        let radial_share: f64 = rng.gen_range(-0.3..0.3);
        let v_dir = (t_hat + r_hat * radial_share).normalized().expect("non-zero");
        runs.push(integrate(r_hat * r, v_dir * speed, &law, Vector3::ZERO, TAU, 10_000)?);
    }
    Ok(runs)
}

fn orbit_scale(tr: &ImpulseTrajectory) -> f64 {
    tr.positions().map(|p| (p - tr.center).norm()).fold(0.0, f64::max)
}

fn planarity(runs: &[ImpulseTrajectory]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for tr in runs {
        let first = &tr.samples[0];
        let normal = first.angular_momentum.normalized().expect("non-radial start");
        let residual = tr
            .positions()
            .map(|p| (p - first.state.r).dot(normal).abs())
            .fold(tr.diagnostics.max_out_of_plane, f64::max);
        worst = worst.max(residual / orbit_scale(tr));
    }
    outcome(
        worst <= 1e-9,
        format!("max out-of-plane residual {worst:.3e} x orbit scale (bound 1e-9), 20 runs"),
    )
}

fn equal_areas(runs: &[ImpulseTrajectory]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for tr in runs {
        let areas: Vec<f64> = tr.swept_areas2().collect();
        let max = areas.iter().copied().fold(0.0, f64::max);
        let min = areas.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max((max - min) / max).max(tr.diagnostics.area_spread());
    }
    outcome(worst <= 1e-11, format!("max relative twice-area spread {worst:.3e} (bound 1e-11)"))
}

fn two_turns(curve: PlanarCurve) -> Result<PlanarCurve> {
    curve.with_domain(0.0, 2.0 * TAU)
}

fn force_ratio() -> Result<Outcome> {
    let cases = [
        ("circle", PlanarCurve::circle(1.0)?),
        ("ellipse-focus e=0.3", PlanarCurve::ellipse_focus(1.0, 0.3)?),
        ("ellipse-focus e=0.6", PlanarCurve::ellipse_focus(1.0, 0.6)?),
    ];
    let points = [0.4, 1.9, 3.5, 5.2];
    let n = [32, 64, 128, 256];
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (name, curve) in cases {
        let curve = two_turns(curve)?;
        for &u in &points {
            let r = ratio_convergence(&curve, &ForceCenter::origin(), u, &n)?;
            let dev = (r.extrapolated_limit.expect("set by the study") - 2.0).abs();
            if dev >= worst {
                worst = dev;
                at = format!("{name}, u = {u}");
            }
        }
    }
    outcome(
        worst <= 1e-3,
        format!("max |extrapolated ratio - 2| = {worst:.3e} at {at} (bound 1e-3), 12 points"),
    )
}

fn chord_decay() -> Result<Outcome> {
    let n = [16, 32, 64, 128, 256];
    let cases = [
        ("circle", PlanarCurve::circle(1.0)?),
        ("ellipse-focus a=1 e=0.5", PlanarCurve::ellipse_focus(1.0, 0.5)?),
        ("ellipse-center a=1 b=0.5", PlanarCurve::ellipse_center(1.0, 0.5)?),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, curve) in cases {
        let curve = two_turns(curve)?;
        let s = ForceCenter::origin();
        let length = curve.arc_length(0.0, TAU)?;
        let report = chord_decay_study(&curve, &s, 0.0, length, &n)?;
        let slope = report.log_log_slope.unwrap_or(f64::NAN);
        let bounds = bound_study(&curve, &s, 0.0, length, &n)?;
        let ok = (slope + 1.0).abs() <= 0.05 && bounds.all_satisfied();
        pass &= ok;
        let worst_ratio = bounds
            .checks
            .iter()
            .map(|c| if c.rhs > 0.0 { c.lhs / c.rhs } else { 0.0 })
            .fold(0.0, f64::max);
        parts.push(format!(
            "{name}: slope {slope:.4}, max lhs/rhs {worst_ratio:.3} (margin 1.5), n=256 lhs/rhs {:.3} (margin 1)",
            if bounds.asymptotic.rhs > 0.0 { bounds.asymptotic.lhs / bounds.asymptotic.rhs } else { 0.0 }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn coverage() -> Result<Outcome> {
    let n = [16, 32, 64, 128, 256];
    let s = ForceCenter::origin();
    let circle = two_turns(PlanarCurve::circle(1.0)?)?;
    let report = coverage_convergence(&circle, &s, 0.0, TAU, &n)?;
    let order = -report.log_log_slope.unwrap_or(f64::NAN);
    let mut pass = order >= 2.0;
    let mut parts = vec![format!("circle: fitted order {order:.4} (need >= 2)")];
    for (name, curve) in [
        ("ellipse-focus", PlanarCurve::ellipse_focus(1.0, 0.5)?),
        ("ellipse-center", PlanarCurve::ellipse_center(1.0, 0.5)?),
    ] {
        let curve = two_turns(curve)?;
        let length = curve.arc_length(0.0, TAU)?;
        let r = coverage_convergence(&curve, &s, 0.0, length, &n)?;
        let covered = r.series("covered_arc").expect("coverage series");
        // a limit exists when successive changes contract geometrically;
        // limits extrapolated from the last two refinements must then agree
        let steps: Vec<f64> = covered.windows(2).map(|w| w[1] - w[0]).collect();
        let contraction = steps
            .windows(2)
            .map(|w| (w[1] / w[0]).abs())
            .fold(0.0, f64::max);
        let k = covered.len();
        let tail = |j: usize| {
            let q = steps[j] / steps[j - 1];
            covered[j + 1] + steps[j] * q / (1.0 - q)
        };
        let (limit_a, limit_b) = (tail(k - 3), tail(k - 2));
        let agree = (limit_a - limit_b).abs();
        let stable = contraction < 0.75 && agree <= 1e-3 * length;
        pass &= stable;
        parts.push(format!(
            "{name}: change contraction <= {contraction:.3}, limit {limit_b:.6} (length {length:.6}), extrapolations agree to {agree:.2e}"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn hooke_ellipse() -> Result<Outcome> {
    let r = ellipse_deviation_study(
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.0, 0.5, 0.0),
        &ForceLaw::Linear { k: 1.0 },
        TAU,
        &[200, 400, 800, 1600],
        &Plane::xy(),
        (1.0, 0.5),
    )?;
    let order = -r.log_log_slope.unwrap_or(f64::NAN);
    let decreasing = r.metric.windows(2).all(|w| w[1] < w[0]);
    outcome(
        decreasing && (order - 1.0).abs() <= 0.1,
        format!(
            "max distance from ellipse {:.3e} .. {:.3e}, fitted order {order:.4} (need 1.0 +/- 0.1)",
            r.metric[0],
            r.metric[r.metric.len() - 1]
        ),
    )
}

fn relative_spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean.abs()
}

fn inverse_square_recovery() -> Result<Outcome> {
    let s = ForceCenter::origin();
    let us: Vec<f64> = (0..24).map(|k| 0.1 + TAU * k as f64 / 24.0).collect();
    let focus = two_turns(PlanarCurve::ellipse_focus(1.0, 0.5)?)?;
    let kepler = us
        .iter()
        .map(|&u| {
            let sp = focus.evaluate(u)?.norm();
            Ok(prop6_limit(&focus, &s, u)? * sp * sp)
        })
        .collect::<Result<Vec<_>>>()?;
    let center = two_turns(PlanarCurve::ellipse_center(1.0, 0.5)?)?;
    let hooke = us
        .iter()
        .map(|&u| {
            let sp = center.evaluate(u)?.norm();
            Ok(prop6_limit(&center, &s, u)? / sp)
        })
        .collect::<Result<Vec<_>>>()?;
    let (k, h) = (relative_spread(&kepler), relative_spread(&hooke));
    outcome(
        k <= 1e-4 && h <= 1e-4,
        format!("relative spread of measure*SP^2 at focus {k:.3e}, of measure/SP at centre {h:.3e} (bound 1e-4), 24 points"),
    )
}

fn regular_polygons() -> Result<Outcome> {
    let curve = PlanarCurve::circle(1.0)?;
    let mut worst: f64 = 0.0;
    for n in [6usize, 12, 24] {
        let s1 = 2.0 * (PI / n as f64).sin();
        let orbit = construct(&curve, &ForceCenter::origin(), 0.0, s1, n)?;
        if orbit.len() != n + 1 {
            return outcome(false, format!("n = {n}: {} vertices", orbit.len()));
        }
        for (k, v) in orbit.vertices().iter().enumerate() {
            let a = TAU * k as f64 / n as f64;
            worst = worst.max((v.point - Vector3::new(a.cos(), a.sin(), 0.0)).norm());
        }
    }
    outcome(worst <= 1e-12, format!("max vertex error {worst:.3e} over n = 6, 12, 24 (bound 1e-12)"))
}

fn main() {
    let mut results = Vec::new();
    results.push((1, "angular momentum conservation", timed(Some(Duration::from_secs(1)), angular_momentum_conservation)));

    // criteria 2 and 3 share the same 20 runs; the time limit covers both
    let start = Instant::now();
    let runs = random_runs();
    let runs_time = start.elapsed();
    match runs {
        Ok(runs) => {
            let limit = Duration::from_secs(5);
            let mut p = timed(None, || planarity(&runs));
            p.detail += &format!("; integration {:.3} s (limit 5 s)", runs_time.as_secs_f64());
            p.pass &= runs_time < limit;
            results.push((2, "emergent planarity", p));
            results.push((3, "equal areas in equal times", timed(None, || equal_areas(&runs))));
        }
        Err(e) => {
            for (k, name) in [(2, "emergent planarity"), (3, "equal areas in equal times")] {
                results.push((k, name, Outcome { pass: false, detail: format!("error: {e}") }));
            }
        }
    }
    results.push((4, "factor-of-2 force-measure ratio", timed(Some(Duration::from_secs(10)), force_ratio)));
    results.push((5, "chord decay and difference bound", timed(None, chord_decay)));
    results.push((6, "coverage convergence", timed(None, coverage)));
    results.push((7, "Hooke ellipse reproduction", timed(None, hooke_ellipse)));
    results.push((8, "inverse-square and linear recovery", timed(None, inverse_square_recovery)));
    results.push((9, "regular polygon oracle", timed(None, regular_polygons)));

    let mut failed = 0;
    for (k, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("acceptance {k} [{tag}] {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
