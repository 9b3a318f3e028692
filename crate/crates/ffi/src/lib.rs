// SPDX-License-Identifier: Apache-2.0

//! C ABI for polyorb.
//!
//! Curves, polygons and trajectories are opaque handles created by
//! `polyorb_*` constructors and released with the matching `*_free`. Every
//! fallible call returns a [`PolyorbStatus`]; on failure
//! [`polyorb_last_error_message`] describes the error for the calling thread.
//! Vectors cross the boundary as pointers to three consecutive doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polyorb::force_measures::{prop1_measure, prop6_limit, prop6_measure};
use polyorb::geometry::{ForceCenter, PlanarCurve, SampledCurve, Vector3};
use polyorb::integrator::{integrate, ForceLaw, ImpulseTrajectory};
use polyorb::polygon::{construct, PolygonOrbit, Termination};
use polyorb::Error;

/// Result of every fallible call. Values 1 to 4 match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyorbStatus {
    Ok = 0,
    InvalidArgument = 1,
    RadialTangency = 2,
    Singularity = 3,
    Numerical = 4,
    NullPointer = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyorbTermination {
    ReachedEndpoint = 0,
    NoIntersection = 1,
    RadialTangency = 2,
    MaxSteps = 3,
}

pub const POLYORB_LAW_LINEAR: u32 = 0;
pub const POLYORB_LAW_INVERSE_SQUARE: u32 = 1;
pub const POLYORB_LAW_POWER: u32 = 2;

/// Attractive force law. `exponent` is read only for `POLYORB_LAW_POWER`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct PolyorbForceLaw {
    pub kind: u32,
    pub coefficient: f64,
    pub exponent: f64,
}

/// Conservation diagnostics of a trajectory, accumulated over all steps.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct PolyorbDiagnostics {
    pub max_angular_momentum_drift: f64,
    pub max_angular_momentum_magnitude_drift: f64,
    pub max_out_of_plane: f64,
    pub min_area2: f64,
    pub max_area2: f64,
    pub max_energy_drift: f64,
}

pub struct PolyorbCurve(PlanarCurve);
pub struct PolyorbPolygon(PolygonOrbit);
pub struct PolyorbTrajectory(ImpulseTrajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(PolyorbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::RadialTangency { .. } => PolyorbStatus::RadialTangency,
            Error::Singularity { .. } | Error::CenterOnCurve { .. } => PolyorbStatus::Singularity,
            Error::Numerical(_) | Error::DegenerateParameterization { .. } => PolyorbStatus::Numerical,
            Error::Index { .. } => PolyorbStatus::OutOfRange,
            _ => PolyorbStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

fn null(what: &str) -> Failure {
    Failure(PolyorbStatus::NullPointer, format!("{what} is null"))
}

fn out_of_range(index: usize, len: usize) -> Failure {
    Failure(
        PolyorbStatus::OutOfRange,
        format!("index {index} out of range ({len} available)"),
    )
}

/// Runs `f`, records any failure for [`polyorb_last_error_message`], and
/// turns panics into [`PolyorbStatus::Panic`].
fn guard(f: impl FnOnce() -> FfiResult) -> PolyorbStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PolyorbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PolyorbStatus::Panic
        }
    }
}

unsafe fn read_vec(p: *const f64, what: &str) -> Result<Vector3, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let v = Vector3::new(*p, *p.add(1), *p.add(2));
    Ok(v.ensure_finite("vector argument")?)
}

unsafe fn write_vec(p: *mut f64, v: Vector3) {
    if !p.is_null() {
        *p = v.x;
        *p.add(1) = v.y;
        *p.add(2) = v.z;
    }
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> FfiResult {
    if p.is_null() {
        return Err(null(what));
    }
    *p = value;
    Ok(())
}

unsafe fn center_arg(p: *const f64) -> Result<ForceCenter, Failure> {
    if p.is_null() {
        Ok(ForceCenter::origin())
    } else {
        Ok(ForceCenter::new(read_vec(p, "center")?)?)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit_curve(curve: polyorb::Result<PlanarCurve>, out: *mut *mut PolyorbCurve) -> FfiResult {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = ptr::null_mut();
    *out = Box::into_raw(Box::new(PolyorbCurve(curve?)));
    Ok(())
}

/// Message describing the last failed call on this thread, or null. The
/// string stays valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn polyorb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn polyorb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_circle(radius: f64, out: *mut *mut PolyorbCurve) -> PolyorbStatus {
    guard(|| emit_curve(PlanarCurve::circle(radius), out))
}

/// Ellipse with the focus at the origin and perihelion on +x at u = 0.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_ellipse_focus(
    semi_major: f64,
    eccentricity: f64,
    out: *mut *mut PolyorbCurve,
) -> PolyorbStatus {
    guard(|| emit_curve(PlanarCurve::ellipse_focus(semi_major, eccentricity), out))
}

/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_ellipse_center(
    semi_major: f64,
    semi_minor: f64,
    out: *mut *mut PolyorbCurve,
) -> PolyorbStatus {
    guard(|| emit_curve(PlanarCurve::ellipse_center(semi_major, semi_minor), out))
}

/// Curve through `count` samples: parameters `u[k]` and points
/// `xyz[3k..3k+3]`, with `u` strictly increasing and `count >= 4`.
///
/// # Safety
/// `u` must hold `count` doubles, `xyz` `3 * count`, and `out` must be valid
/// for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_sampled(
    u: *const f64,
    xyz: *const f64,
    count: usize,
    out: *mut *mut PolyorbCurve,
) -> PolyorbStatus {
    guard(|| {
        if u.is_null() || xyz.is_null() {
            return Err(null("sample array"));
        }
        let params = std::slice::from_raw_parts(u, count).to_vec();
        let coords = std::slice::from_raw_parts(xyz, 3 * count);
        let points = coords.chunks_exact(3).map(|c| Vector3::new(c[0], c[1], c[2])).collect();
        let curve = SampledCurve::new(params, points).map(PlanarCurve::sampled);
        emit_curve(curve, out)
    })
}

/// # Safety
/// `curve` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_set_domain(curve: *mut PolyorbCurve, lo: f64, hi: f64) -> PolyorbStatus {
    guard(|| {
        let c = curve.as_mut().ok_or_else(|| null("curve"))?;
        c.0 = c.0.clone().with_domain(lo, hi)?;
        Ok(())
    })
}

/// # Safety
/// `curve` must be a live handle; `lo` and `hi` valid for writes or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_domain(
    curve: *const PolyorbCurve,
    lo: *mut f64,
    hi: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let (a, b) = handle(curve, "curve")?.0.domain();
        write(lo, a, "lo")?;
        write(hi, b, "hi")
    })
}

/// # Safety
/// `curve` must be a live handle and `out` valid for three doubles.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_evaluate(curve: *const PolyorbCurve, u: f64, out: *mut f64) -> PolyorbStatus {
    guard(|| {
        let p = handle(curve, "curve")?.0.evaluate(u)?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_vec(out, p);
        Ok(())
    })
}

/// # Safety
/// `curve` must come from a `polyorb_curve_*` constructor and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn polyorb_curve_free(curve: *mut PolyorbCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Builds the chord polygon from `u0` with first chord `s1`. A null `center`
/// means the origin. A polygon ending in radial tangency is returned with
/// status `POLYORB_STATUS_OK`; query its termination.
///
/// # Safety
/// `curve` must be a live handle, `center` null or three doubles, and `out`
/// valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_construct(
    curve: *const PolyorbCurve,
    center: *const f64,
    u0: f64,
    s1: f64,
    max_steps: usize,
    out: *mut *mut PolyorbPolygon,
) -> PolyorbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let c = handle(curve, "curve")?;
        let orbit = construct(&c.0, &center_arg(center)?, u0, s1, max_steps)?;
        *out = Box::into_raw(Box::new(PolyorbPolygon(orbit)));
        Ok(())
    })
}

/// Number of vertices; 0 for a null handle.
///
/// # Safety
/// `polygon` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_vertex_count(polygon: *const PolyorbPolygon) -> usize {
    polygon.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `polygon` must be a live handle; `u` one double or null, `xyz` three
/// doubles or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_vertex(
    polygon: *const PolyorbPolygon,
    j: usize,
    u: *mut f64,
    xyz: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        let v = p.vertices().get(j).ok_or_else(|| out_of_range(j, p.len()))?;
        if !u.is_null() {
            *u = v.u;
        }
        write_vec(xyz, v.point);
        Ok(())
    })
}

/// Length of chord `j`, joining vertices `j` and `j + 1`.
///
/// # Safety
/// `polygon` must be a live handle and `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_chord(polygon: *const PolyorbPolygon, j: usize, out: *mut f64) -> PolyorbStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        let s = *p.chords().get(j).ok_or_else(|| out_of_range(j, p.chords().len()))?;
        write(out, s, "out")
    })
}

/// Twice the area of the triangle from the center over chord `j`.
///
/// # Safety
/// `polygon` must be a live handle and `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_area2(polygon: *const PolyorbPolygon, j: usize, out: *mut f64) -> PolyorbStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        let a = *p.areas2().get(j).ok_or_else(|| out_of_range(j, p.areas2().len()))?;
        write(out, a, "out")
    })
}

/// Deflection vector at interior vertex `j` and its angle to the secant
/// from vertex `j - 1` to `j + 1`.
///
/// # Safety
/// `polygon` must be a live handle; `xyz` three doubles or null, `angle` one
/// double or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_deflection(
    polygon: *const PolyorbPolygon,
    j: usize,
    xyz: *mut f64,
    angle: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        if j == 0 || j > p.deflections().len() {
            return Err(out_of_range(j, p.len()));
        }
        write_vec(xyz, p.deflections()[j - 1]);
        if !angle.is_null() {
            *angle = p.deflection_angles()[j - 1];
        }
        Ok(())
    })
}

/// # Safety
/// `polygon` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_termination(
    polygon: *const PolyorbPolygon,
    out: *mut PolyorbTermination,
) -> PolyorbStatus {
    guard(|| {
        let t = match handle(polygon, "polygon")?.0.termination() {
            Termination::ReachedEndpoint => PolyorbTermination::ReachedEndpoint,
            Termination::NoIntersection => PolyorbTermination::NoIntersection,
            Termination::RadialTangency => PolyorbTermination::RadialTangency,
            Termination::MaxSteps => PolyorbTermination::MaxSteps,
        };
        write(out, t, "out")
    })
}

/// Polygon force measure at interior vertex `j`.
///
/// # Safety
/// `polygon` must be a live handle and `out` valid for one double.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_force_measure(
    polygon: *const PolyorbPolygon,
    j: usize,
    out: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let m = prop1_measure(&handle(polygon, "polygon")?.0, j)?;
        write(out, m, "out")
    })
}

/// # Safety
/// `polygon` must come from `polyorb_construct` and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn polyorb_polygon_free(polygon: *mut PolyorbPolygon) {
    if !polygon.is_null() {
        drop(Box::from_raw(polygon));
    }
}

/// Tangent force measure at `u` with arc offset `h`.
///
/// # Safety
/// `curve` must be a live handle, `center` null or three doubles, and `out`
/// valid for one double.
#[no_mangle]
pub unsafe extern "C" fn polyorb_tangent_measure(
    curve: *const PolyorbCurve,
    center: *const f64,
    u: f64,
    h: f64,
    out: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let m = prop6_measure(&handle(curve, "curve")?.0, &center_arg(center)?, u, h)?;
        write(out, m, "out")
    })
}

/// Tangent force measure at `u`, extrapolated to zero arc offset.
///
/// # Safety
/// As for [`polyorb_tangent_measure`].
#[no_mangle]
pub unsafe extern "C" fn polyorb_tangent_measure_limit(
    curve: *const PolyorbCurve,
    center: *const f64,
    u: f64,
    out: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let m = prop6_limit(&handle(curve, "curve")?.0, &center_arg(center)?, u)?;
        write(out, m, "out")
    })
}

/// Runs `n` impulse steps over `total_time`. A null `center` means the origin.
///
/// # Safety
/// `law` must point to one law, `r0` and `v0` to three doubles each, `center`
/// to three doubles or null, and `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_integrate(
    law: *const PolyorbForceLaw,
    r0: *const f64,
    v0: *const f64,
    center: *const f64,
    total_time: f64,
    n: usize,
    out: *mut *mut PolyorbTrajectory,
) -> PolyorbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let l = handle(law, "law")?;
        let law = match l.kind {
            POLYORB_LAW_LINEAR => ForceLaw::Linear { k: l.coefficient },
            POLYORB_LAW_INVERSE_SQUARE => ForceLaw::InverseSquare { gm: l.coefficient },
            POLYORB_LAW_POWER => ForceLaw::PowerLaw {
                coefficient: l.coefficient,
                exponent: l.exponent,
            },
            other => {
                return Err(Failure(
                    PolyorbStatus::InvalidArgument,
                    format!("unknown force law kind {other}"),
                ))
            }
        };
        let tr = integrate(
            read_vec(r0, "r0")?,
            read_vec(v0, "v0")?,
            &law,
            center_arg(center)?.position(),
            total_time,
            n,
        )?;
        *out = Box::into_raw(Box::new(PolyorbTrajectory(tr)));
        Ok(())
    })
}

/// Number of stored states; 0 for a null handle. Runs longer than one
/// million steps store every k-th state.
///
/// # Safety
/// `trajectory` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_trajectory_sample_count(trajectory: *const PolyorbTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.0.samples.len())
}

/// Stored state `k`: its step index, position and velocity.
///
/// # Safety
/// `trajectory` must be a live handle; `step` one value or null, `r` and `v`
/// three doubles or null.
#[no_mangle]
pub unsafe extern "C" fn polyorb_trajectory_sample(
    trajectory: *const PolyorbTrajectory,
    k: usize,
    step: *mut usize,
    r: *mut f64,
    v: *mut f64,
) -> PolyorbStatus {
    guard(|| {
        let t = &handle(trajectory, "trajectory")?.0;
        let s = t.samples.get(k).ok_or_else(|| out_of_range(k, t.samples.len()))?;
        if !step.is_null() {
            *step = s.j;
        }
        write_vec(r, s.state.r);
        write_vec(v, s.state.v);
        Ok(())
    })
}

/// # Safety
/// `trajectory` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn polyorb_trajectory_diagnostics(
    trajectory: *const PolyorbTrajectory,
    out: *mut PolyorbDiagnostics,
) -> PolyorbStatus {
    guard(|| {
        let d = handle(trajectory, "trajectory")?.0.diagnostics;
        write(
            out,
            PolyorbDiagnostics {
                max_angular_momentum_drift: d.max_angular_momentum_drift,
                max_angular_momentum_magnitude_drift: d.max_angular_momentum_magnitude_drift,
                max_out_of_plane: d.max_out_of_plane,
                min_area2: d.min_area2,
                max_area2: d.max_area2,
                max_energy_drift: d.max_energy_drift,
            },
            "out",
        )
    })
}

/// # Safety
/// `trajectory` must come from `polyorb_integrate` and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn polyorb_trajectory_free(trajectory: *mut PolyorbTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
