// SPDX-License-Identifier: Apache-2.0

//! Vector algebra and planar parametric curves.

mod curve;
mod sampled;
mod vector;

pub use curve::{CurveKind, ForceCenter, PlanarCurve, Plane};
pub use sampled::SampledCurve;
pub use vector::{triangle_area2, Vector3};
