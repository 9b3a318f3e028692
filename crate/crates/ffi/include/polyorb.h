#ifndef POLYORB_H
#define POLYORB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define POLYORB_LAW_LINEAR 0

#define POLYORB_LAW_INVERSE_SQUARE 1

#define POLYORB_LAW_POWER 2

/**
 * Result of every fallible call. Values 1 to 4 match the CLI exit codes.
 */
typedef enum PolyorbStatus {
  POLYORB_STATUS_OK = 0,
  POLYORB_STATUS_INVALID_ARGUMENT = 1,
  POLYORB_STATUS_RADIAL_TANGENCY = 2,
  POLYORB_STATUS_SINGULARITY = 3,
  POLYORB_STATUS_NUMERICAL = 4,
  POLYORB_STATUS_NULL_POINTER = 5,
  POLYORB_STATUS_OUT_OF_RANGE = 6,
  POLYORB_STATUS_PANIC = 7,
} PolyorbStatus;

typedef enum PolyorbTermination {
  POLYORB_TERMINATION_REACHED_ENDPOINT = 0,
  POLYORB_TERMINATION_NO_INTERSECTION = 1,
  POLYORB_TERMINATION_RADIAL_TANGENCY = 2,
  POLYORB_TERMINATION_MAX_STEPS = 3,
} PolyorbTermination;

typedef struct PolyorbCurve PolyorbCurve;

typedef struct PolyorbPolygon PolyorbPolygon;

typedef struct PolyorbTrajectory PolyorbTrajectory;

/**
 * Attractive force law. `exponent` is read only for `POLYORB_LAW_POWER`.
 */
typedef struct PolyorbForceLaw {
  uint32_t kind;
  double coefficient;
  double exponent;
} PolyorbForceLaw;

/**
 * Conservation diagnostics of a trajectory, accumulated over all steps.
 */
typedef struct PolyorbDiagnostics {
  double max_angular_momentum_drift;
  double max_angular_momentum_magnitude_drift;
  double max_out_of_plane;
  double min_area2;
  double max_area2;
  double max_energy_drift;
} PolyorbDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failed call on this thread, or null. The
 * string stays valid until the next call into the library from this thread.
 */
const char *polyorb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *polyorb_version(void);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum PolyorbStatus polyorb_curve_circle(double radius, struct PolyorbCurve **out);

/**
 * Ellipse with the focus at the origin and perihelion on +x at u = 0.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum PolyorbStatus polyorb_curve_ellipse_focus(double semi_major,
                                               double eccentricity,
                                               struct PolyorbCurve **out);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum PolyorbStatus polyorb_curve_ellipse_center(double semi_major,
                                                double semi_minor,
                                                struct PolyorbCurve **out);

/**
 * Curve through `count` samples: parameters `u[k]` and points
 * `xyz[3k..3k+3]`, with `u` strictly increasing and `count >= 4`.
 *
 * # Safety
 * `u` must hold `count` doubles, `xyz` `3 * count`, and `out` must be valid
 * for one pointer write.
 */
enum PolyorbStatus polyorb_curve_sampled(const double *u,
                                         const double *xyz,
                                         size_t count,
                                         struct PolyorbCurve **out);

/**
 * # Safety
 * `curve` must be a live handle or null.
 */
enum PolyorbStatus polyorb_curve_set_domain(struct PolyorbCurve *curve, double lo, double hi);

/**
 * # Safety
 * `curve` must be a live handle; `lo` and `hi` valid for writes or null.
 */
enum PolyorbStatus polyorb_curve_domain(const struct PolyorbCurve *curve, double *lo, double *hi);

/**
 * # Safety
 * `curve` must be a live handle and `out` valid for three doubles.
 */
enum PolyorbStatus polyorb_curve_evaluate(const struct PolyorbCurve *curve, double u, double *out);

/**
 * # Safety
 * `curve` must come from a `polyorb_curve_*` constructor and not be used
 * afterwards. Null is ignored.
 */
void polyorb_curve_free(struct PolyorbCurve *curve);

/**
 * Builds the chord polygon from `u0` with first chord `s1`. A null `center`
 * means the origin. A polygon ending in radial tangency is returned with
 * status `POLYORB_STATUS_OK`; query its termination.
 *
 * # Safety
 * `curve` must be a live handle, `center` null or three doubles, and `out`
 * valid for one pointer write.
 */
enum PolyorbStatus polyorb_construct(const struct PolyorbCurve *curve,
                                     const double *center,
                                     double u0,
                                     double s1,
                                     size_t max_steps,
                                     struct PolyorbPolygon **out);

/**
 * Number of vertices; 0 for a null handle.
 *
 * # Safety
 * `polygon` must be a live handle or null.
 */
size_t polyorb_polygon_vertex_count(const struct PolyorbPolygon *polygon);

/**
 * # Safety
 * `polygon` must be a live handle; `u` one double or null, `xyz` three
 * doubles or null.
 */
enum PolyorbStatus polyorb_polygon_vertex(const struct PolyorbPolygon *polygon,
                                          size_t j,
                                          double *u,
                                          double *xyz);

/**
 * Length of chord `j`, joining vertices `j` and `j + 1`.
 *
 * # Safety
 * `polygon` must be a live handle and `out` valid for one double.
 */
enum PolyorbStatus polyorb_polygon_chord(const struct PolyorbPolygon *polygon,
                                         size_t j,
                                         double *out);

/**
 * Twice the area of the triangle from the center over chord `j`.
 *
 * # Safety
 * `polygon` must be a live handle and `out` valid for one double.
 */
enum PolyorbStatus polyorb_polygon_area2(const struct PolyorbPolygon *polygon,
                                         size_t j,
                                         double *out);

/**
 * Deflection vector at interior vertex `j` and its angle to the secant
 * from vertex `j - 1` to `j + 1`.
 *
 * # Safety
 * `polygon` must be a live handle; `xyz` three doubles or null, `angle` one
 * double or null.
 */
enum PolyorbStatus polyorb_polygon_deflection(const struct PolyorbPolygon *polygon,
                                              size_t j,
                                              double *xyz,
                                              double *angle);

/**
 * # Safety
 * `polygon` must be a live handle and `out` valid for one write.
 */
enum PolyorbStatus polyorb_polygon_termination(const struct PolyorbPolygon *polygon,
                                               enum PolyorbTermination *out);

/**
 * Polygon force measure at interior vertex `j`.
 *
 * # Safety
 * `polygon` must be a live handle and `out` valid for one double.
 */
enum PolyorbStatus polyorb_polygon_force_measure(const struct PolyorbPolygon *polygon,
                                                 size_t j,
                                                 double *out);

/**
 * # Safety
 * `polygon` must come from `polyorb_construct` and not be used afterwards.
 * Null is ignored.
 */
void polyorb_polygon_free(struct PolyorbPolygon *polygon);

/**
 * Tangent force measure at `u` with arc offset `h`.
 *
 * # Safety
 * `curve` must be a live handle, `center` null or three doubles, and `out`
 * valid for one double.
 */
enum PolyorbStatus polyorb_tangent_measure(const struct PolyorbCurve *curve,
                                           const double *center,
                                           double u,
                                           double h,
                                           double *out);

/**
 * Tangent force measure at `u`, extrapolated to zero arc offset.
 *
 * # Safety
 * As for [`polyorb_tangent_measure`].
 */
enum PolyorbStatus polyorb_tangent_measure_limit(const struct PolyorbCurve *curve,
                                                 const double *center,
                                                 double u,
                                                 double *out);

/**
 * Runs `n` impulse steps over `total_time`. A null `center` means the origin.
 *
 * # Safety
 * `law` must point to one law, `r0` and `v0` to three doubles each, `center`
 * to three doubles or null, and `out` must be valid for one pointer write.
 */
enum PolyorbStatus polyorb_integrate(const struct PolyorbForceLaw *law,
                                     const double *r0,
                                     const double *v0,
                                     const double *center,
                                     double total_time,
                                     size_t n,
                                     struct PolyorbTrajectory **out);

/**
 * Number of stored states; 0 for a null handle. Runs longer than one
 * million steps store every k-th state.
 *
 * # Safety
 * `trajectory` must be a live handle or null.
 */
size_t polyorb_trajectory_sample_count(const struct PolyorbTrajectory *trajectory);

/**
 * Stored state `k`: its step index, position and velocity.
 *
 * # Safety
 * `trajectory` must be a live handle; `step` one value or null, `r` and `v`
 * three doubles or null.
 */
enum PolyorbStatus polyorb_trajectory_sample(const struct PolyorbTrajectory *trajectory,
                                             size_t k,
                                             size_t *step,
                                             double *r,
                                             double *v);

/**
 * # Safety
 * `trajectory` must be a live handle and `out` valid for one write.
 */
enum PolyorbStatus polyorb_trajectory_diagnostics(const struct PolyorbTrajectory *trajectory,
                                                  struct PolyorbDiagnostics *out);

/**
 * # Safety
 * `trajectory` must come from `polyorb_integrate` and not be used
 * afterwards. Null is ignored.
 */
void polyorb_trajectory_free(struct PolyorbTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYORB_H */
