use crate::error::{Error, Result};

use super::gamma::ln_gamma_pos;
use super::series::{sum_recurrence, sum_terms, SeriesPolicy};

pub const MAX_STRUVE_ARG: f64 = 60.0;
pub const MAX_STRUVE_ORDER: f64 = 100.0;
pub const MAX_MITTAG_LEFFLER_ARG: f64 = 50.0;

const MITTAG_LEFFLER_REL_TOL: f64 = 1e-11;

pub fn struve_l(order: f64, x: f64) -> Result<f64> {
    struve_l_with(order, x, &SeriesPolicy::default())
}

/// Modified Struve function `L_μ(x) = Σ (x/2)^(2k+μ+1) / (Γ(k+3/2) Γ(k+μ+3/2))`.
pub fn struve_l_with(order: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if !(0.0..=MAX_STRUVE_ORDER).contains(&order) || !(0.0..=MAX_STRUVE_ARG).contains(&x) {
        return Err(Error::domain(format!(
            "struve_l({order}, {x}) outside order in [0, {MAX_STRUVE_ORDER}], x in [0, {MAX_STRUVE_ARG}]"
        )));
    }
    policy.validate()?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * x;
    let first = ((order + 1.0) * half.ln() - ln_gamma_pos(1.5) - ln_gamma_pos(order + 1.5)).exp();
    let q = half * half;
    let s = sum_recurrence(policy, first, |k, prev| {
        let k = k as f64;
        prev * q / ((k + 0.5) * (k + order + 0.5))
    })?;
    Ok(s.value)
}

pub fn mittag_leffler(a: f64, b: f64, x: f64) -> Result<f64> {
    mittag_leffler_with(a, b, x, &SeriesPolicy::default())
}

/// Two-parameter Mittag-Leffler function `E_{a,b}(x) = Σ x^k / Γ(ak+b)`.
///
/// For negative `x` the series alternates; when the resulting cancellation
/// would exceed the 1e-11 relative budget a domain error is returned.
pub fn mittag_leffler_with(a: f64, b: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("mittag_leffler needs a, b > 0, got ({a}, {b})")));
    }
    if !(x.abs() <= MAX_MITTAG_LEFFLER_ARG) {
        return Err(Error::domain(format!("mittag_leffler argument {x} outside |x| <= {MAX_MITTAG_LEFFLER_ARG}")));
    }
    policy.validate()?;
    if x == 0.0 {
        return Ok((-ln_gamma_pos(b)).exp());
    }
    let log_abs = x.abs().ln();
    let sign = x.signum();
    let s = sum_terms(policy, |k| {
        let kf = k as f64;
        let mag = (kf * log_abs - ln_gamma_pos(a * kf + b)).exp();
        if k % 2 == 1 {
            sign * mag
        } else {
            mag
        }
    })?;
    if s.abs_sum * 4.0 * f64::EPSILON > MITTAG_LEFFLER_REL_TOL * s.value.abs() {
        return Err(Error::domain(format!(
            "mittag_leffler({a}, {b}, {x}): cancellation exceeds the series accuracy budget"
        )));
    }
    Ok(s.value)
}
