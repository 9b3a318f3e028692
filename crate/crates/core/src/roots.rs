// SPDX-License-Identifier: Apache-2.0

//! Scalar root finding along a curve parameter: forward marching to bracket
//! a sign change, bisection, and a final Newton or secant polish.

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this, relative to `max(1, |u|)`.
pub const PARAM_TOLERANCE: f64 = 1e-14;
/// Iteration cap for the bisection phase.
pub const MAX_ITERATIONS: usize = 100;
/// Cap on marching steps; the step is widened if the range would need more.
const MAX_MARCH: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bracket {
    /// `f(lo)` and `f(hi)` differ in sign (or `f(hi) == 0`).
    Found { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// The march reached `limit` without a sign change.
    Exhausted { f_limit: f64 },
}

/// Marches from `start` towards `limit` in increments of `step` and returns
/// the first interval over which `f` changes sign.
pub fn bracket_forward(
    f: impl Fn(f64) -> f64,
    start: f64,
    step: f64,
    limit: f64,
) -> Result<Bracket> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Numerical(format!("invalid march step {step}")));
    }
    if limit <= start {
        return Ok(Bracket::Exhausted { f_limit: f(limit) });
    }
    let step = step.max((limit - start) / MAX_MARCH);
    let mut lo = start;
    let mut f_lo = f(lo);
    let mut k = 1.0;
    loop {
        let hi = (start + k * step).min(limit);
        let f_hi = f(hi);
        if !f_hi.is_finite() {
            return Err(Error::Numerical(format!("non-finite residual at u = {hi}")));
        }
        if f_hi == 0.0 || (f_lo != 0.0 && f_lo.signum() != f_hi.signum()) {
            return Ok(Bracket::Found { lo, hi, f_lo, f_hi });
        }
        if hi >= limit {
            return Ok(Bracket::Exhausted { f_limit: f_hi });
        }
        lo = hi;
        f_lo = f_hi;
        k += 1.0;
    }
}

/// Refines a bracketed root. `df`, when supplied, is used for Newton polishing
/// after bisection; otherwise a secant step on the final bracket is tried.
pub fn solve_bracketed(
    f: impl Fn(f64) -> f64,
    df: Option<&dyn Fn(f64) -> f64>,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    f_hi: f64,
) -> Result<f64> {
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut iterations = 0;
    while hi - lo > PARAM_TOLERANCE * lo.abs().max(hi.abs()).max(1.0) {
        if iterations == MAX_ITERATIONS {
            return Err(Error::Numerical(format!(
                "bisection did not converge after {MAX_ITERATIONS} iterations; bracket [{lo}, {hi}], f = {f_lo:e}"
            )));
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let candidate = match df {
        Some(df) => {
            let mut x = mid;
            for _ in 0..3 {
                let d = df(x);
                if d == 0.0 || !d.is_finite() {
                    break;
                }
                x -= f(x) / d;
            }
            x
        }
        None => {
            let f_hi = f(hi);
            if f_hi != f_lo {
                hi - f_hi * (hi - lo) / (f_hi - f_lo)
            } else {
                mid
            }
        }
    };
    let slack = PARAM_TOLERANCE * mid.abs().max(1.0);
    let in_bracket = candidate >= lo - slack && candidate <= hi + slack;
    if candidate.is_finite() && in_bracket && f(candidate).abs() < f(mid).abs() {
        Ok(candidate)
    } else {
        Ok(mid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_first_forward_root() {
        // roots at 1, 2, 3
        let f = |x: f64| (x - 1.0) * (x - 2.0) * (x - 3.0);
        let b = bracket_forward(f, 0.0, 0.3, 10.0).unwrap();
        let Bracket::Found { lo, hi, f_lo, f_hi } = b else {
            panic!("no bracket")
        };
        let r = solve_bracketed(f, None, lo, hi, f_lo, f_hi).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn newton_polish() {
        let f = |x: f64| x.cos() - x;
        let df = |x: f64| -x.sin() - 1.0;
        let Bracket::Found { lo, hi, f_lo, f_hi } = bracket_forward(f, 0.0, 0.25, 2.0).unwrap()
        else {
            panic!()
        };
        let r = solve_bracketed(f, Some(&df), lo, hi, f_lo, f_hi).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-15);
    }

    #[test]
    fn exhausted_when_no_root() {
        let b = bracket_forward(|x| x * x + 1.0, 0.0, 0.1, 1.0).unwrap();
        assert!(matches!(b, Bracket::Exhausted { f_limit } if (f_limit - 2.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_step() {
        assert!(bracket_forward(|x| x, 0.0, 0.0, 1.0).is_err());
        assert!(bracket_forward(|x| x, 0.0, f64::NAN, 1.0).is_err());
    }
}
