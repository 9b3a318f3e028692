// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares power-law fit `metric ~ exp(intercept) * n^slope`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub slope_ci: f64,
    /// Zero metric entries left out of the fit.
    pub dropped_zeros: usize,
}

/// Fits `log(metric)` against `log(n)`. Zero metrics are dropped (and
/// counted); negative or non-finite metrics are errors. At least three
/// points must remain.
pub fn fit_order(n_values: &[f64], metric: &[f64]) -> Result<OrderFit> {
    if n_values.len() != metric.len() {
        return Err(Error::InvalidInput(format!(
            "{} n values but {} metric values",
            n_values.len(),
            metric.len()
        )));
    }
    if let Some(n) = n_values.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
        return Err(Error::InvalidInput(format!("n values must be positive, got {n}")));
    }
    if let Some(m) = metric.iter().find(|m| !(m.is_finite() && **m >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "metric values must be non-negative and finite for a log fit, got {m}"
        )));
    }
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(metric)
        .filter(|(_, m)| **m > 0.0)
        .map(|(n, m)| (n.ln(), m.ln()))
        .collect();
    let dropped_zeros = metric.len() - pts.len();
    if pts.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: pts.len(),
        });
    }
    let m = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("n values must not all be equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = m - 2.0;
    let se = (ssr / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map(|d| d.inverse_cdf(0.975))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(OrderFit {
        slope,
        intercept,
        residual: (ssr / m).sqrt(),
        slope_ci: t * se,
        dropped_zeros,
    })
}

/// Richardson extrapolation on a sequence computed with step sizes shrinking
/// by `ratio` each time (coarse first). Level `k` removes an error term of
/// order `orders[k]`; as many levels are applied as the data allows.
pub fn richardson(values: &[f64], ratio: f64, orders: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(Error::InvalidInput(format!("refinement ratio must exceed 1, got {ratio}")));
    }
    let mut row: Vec<f64> = values.to_vec();
    for &p in orders.iter().take(values.len() - 1) {
        let factor = ratio.powf(p) - 1.0;
        row = row
            .windows(2)
            .map(|w| w[1] + (w[1] - w[0]) / factor)
            .collect();
    }
    Ok(*row.last().expect("non-empty"))
}

/// Observed order from three successive values at refinement `ratio`.
pub fn observed_order(coarse: f64, medium: f64, fine: f64, ratio: f64) -> Option<f64> {
    let a = (coarse - medium).abs();
    let b = (medium - fine).abs();
    if a > 0.0 && b > 0.0 {
        Some((a / b).ln() / ratio.ln())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_laws_are_exact() {
        let n = [10.0, 20.0, 40.0, 80.0, 160.0];
        let inv: Vec<f64> = n.iter().map(|n| 1.0 / n).collect();
        let f = fit_order(&n, &inv).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-13);
        assert!(f.residual < 1e-13);
        assert!(f.slope_ci < 1e-12);
        let inv2: Vec<f64> = n.iter().map(|n| 5.0 / (n * n)).collect();
        let f = fit_order(&n, &inv2).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-13);
        assert!((f.intercept - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zeros_dropped_negative_rejected() {
        let n = [1.0, 2.0, 4.0, 8.0];
        let f = fit_order(&n, &[1.0, 0.0, 0.25, 0.125]).unwrap();
        assert_eq!(f.dropped_zeros, 1);
        assert!((f.slope + 1.0).abs() < 1e-13);
        assert!(fit_order(&n, &[1.0, -0.5, 0.25, 0.125]).is_err());
        assert!(matches!(
            fit_order(&n, &[1.0, 0.0, 0.0, 0.125]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(fit_order(&[1.0, 2.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn richardson_removes_listed_orders() {
        let f = |h: f64| 3.0 + 0.7 * h - 1.1 * h * h + 0.2 * h * h * h;
        let vals = [f(0.1), f(0.05), f(0.025)];
        let x = richardson(&vals, 2.0, &[1.0, 2.0]).unwrap();
        // remaining error is 0.2 h^3 times the level-3 factor
        assert!((x - 3.0).abs() < 3e-5, "{x}");
        let vals4 = [f(0.1), f(0.05), f(0.025), f(0.0125)];
        let x = richardson(&vals4, 2.0, &[1.0, 2.0, 3.0]).unwrap();
        assert!((x - 3.0).abs() < 1e-13);
    }

    #[test]
    fn observed_order_of_quadratic() {
        let p = observed_order(1.0 + 0.04, 1.0 + 0.01, 1.0 + 0.0025, 2.0).unwrap();
        assert!((p - 2.0).abs() < 1e-10);
    }
}
