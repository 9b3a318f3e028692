// SPDX-License-Identifier: Apache-2.0

//! Convergence studies over the number of polygon chords or time steps, and
//! the fitting machinery they share.

mod ellipse;
mod fit;
mod studies;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ellipse::distance_to_ellipse;
pub use fit::{fit_order, observed_order, richardson, OrderFit};
pub use studies::{
    appendix_a_bound_check, appendix_a_bound_check_with_margin, bound_study, chord_decay_study,
    coverage_convergence, ellipse_deviation_study, integrator_order_study, BoundCheck, BoundStudy,
    BOUND_MARGIN,
};

/// A metric measured at increasing resolutions, with its fitted log-log order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub study: String,
    #[serde(rename = "n")]
    pub n_values: Vec<usize>,
    /// The quantity whose decay is fitted against `n`.
    pub metric: Vec<f64>,
    /// Other per-`n` columns, keyed by name.
    #[serde(flatten)]
    pub series: BTreeMap<String, Vec<f64>>,
    #[serde(rename = "fit_order")]
    pub log_log_slope: Option<f64>,
    pub slope_ci: Option<f64>,
    pub intercept: Option<f64>,
    pub residual: Option<f64>,
    #[serde(rename = "extrapolated")]
    pub extrapolated_limit: Option<f64>,
    #[serde(default)]
    pub dropped_zeros: usize,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ConvergenceReport {
    pub(crate) fn new(study: &str, n_values: &[usize], metric: Vec<f64>) -> Self {
        ConvergenceReport {
            study: study.to_string(),
            n_values: n_values.to_vec(),
            metric,
            series: BTreeMap::new(),
            log_log_slope: None,
            slope_ci: None,
            intercept: None,
            residual: None,
            extrapolated_limit: None,
            dropped_zeros: 0,
            notes: Vec::new(),
        }
    }

    /// Fits the metric and stores the slope statistics.
    pub(crate) fn with_fit(mut self) -> Result<Self> {
        let n: Vec<f64> = self.n_values.iter().map(|&n| n as f64).collect();
        let fit = fit_order(&n, &self.metric)?;
        self.log_log_slope = Some(fit.slope);
        self.slope_ci = Some(fit.slope_ci);
        self.intercept = Some(fit.intercept);
        self.residual = Some(fit.residual);
        self.dropped_zeros = fit.dropped_zeros;
        if fit.dropped_zeros > 0 {
            self.notes
                .push(format!("{} zero metric value(s) dropped from the fit", fit.dropped_zeros));
        }
        Ok(self)
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.get(name).map(Vec::as_slice)
    }
}

/// Checks that a sweep has at least three strictly increasing positive counts.
pub fn validate_n_values(n_values: &[usize]) -> Result<()> {
    if n_values.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: n_values.len(),
        });
    }
    if n_values[0] == 0 || n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "n values must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Extrapolates the last two entries of `values` to `n -> infinity`,
/// assuming the error decays as `n^-order`.
pub fn extrapolate_last(n_values: &[usize], values: &[f64], order: f64) -> Option<f64> {
    let k = values.len();
    if k < 2 || n_values.len() != k || order.is_nan() || order <= 0.0 {
        return None;
    }
    let ratio = n_values[k - 1] as f64 / n_values[k - 2] as f64;
    let factor = ratio.powf(order) - 1.0;
    Some(values[k - 1] + (values[k - 1] - values[k - 2]) / factor)
}
