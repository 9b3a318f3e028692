// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter u = {u} outside curve domain [{lo}, {hi}]")]
    Domain { u: f64, lo: f64, hi: f64 },

    #[error("degenerate parameterization at u = {u}: dR/du vanishes")]
    DegenerateParameterization { u: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The radius from the force center runs along the curve tangent, where
    /// the chord-extension construction is ill-conditioned.
    #[error("radial tangency at vertex {vertex} (u = {u}): radius/tangent angle {angle:e} rad")]
    RadialTangency { vertex: usize, u: f64, angle: f64 },

    #[error("force center lies on the curve at u = {u}")]
    CenterOnCurve { u: f64 },

    #[error("singularity at step {step}: trajectory reaches the force center (distance {distance:e})")]
    Singularity { step: usize, distance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("index {index} out of range ({len} available)")]
    Index { index: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RadialTangency { .. } => 2,
            Error::Singularity { .. } | Error::CenterOnCurve { .. } => 3,
            Error::Numerical(_) | Error::DegenerateParameterization { .. } => 4,
            _ => 1,
        }
    }
}
