// SPDX-License-Identifier: Apache-2.0

//! Discrete polygonal constructions of central-force orbits.
//!
//! Two routes lead to the same continuum orbit. [`polygon::construct`] starts
//! from a known curve and inscribes a polygon whose deflections all point at
//! the force center. [`integrator::integrate`] starts from a force law and
//! applies one radial velocity impulse per time step. Both sweep equal areas
//! in equal times exactly, step for step.
//!
//! [`force_measures`] compares the discrete force read off a polygon with the
//! tangent-offset measure of the smooth curve, and [`analysis`] runs the
//! convergence studies that tie the discrete and continuous pictures together.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod force_measures;
pub mod geometry;
pub mod integrator;
pub mod io;
pub mod parallel;
pub mod polygon;
mod roots;

pub use error::{Error, Result};
pub use geometry::{ForceCenter, PlanarCurve, Vector3};
