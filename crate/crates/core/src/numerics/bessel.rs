//! Bessel functions `J_ν`, `I_ν`, `K_μ` of real order and argument.

use crate::error::{Error, Result};

use super::gamma::ln_gamma_pos;
use super::series::{sum_recurrence, SeriesPolicy};

pub const MAX_SERIES_ARG: f64 = 60.0;
pub const MAX_JI_ORDER: f64 = 200.0;
pub const MAX_K_ARG: f64 = 200.0;
pub const MAX_K_ORDER: f64 = 100.0;

// The alternating J series is trusted while its magnitude sum, scaled to the
// final value, keeps the rounding error below about 1e-14.
const J_SERIES_ABS_BUDGET: f64 = 50.0;

fn check_ji(name: &str, order: f64, x: f64) -> Result<()> {
    if !(0.0..=MAX_JI_ORDER).contains(&order) || !(0.0..=MAX_SERIES_ARG).contains(&x) {
        return Err(Error::domain(format!(
            "{name}({order}, {x}) outside order in [0, {MAX_JI_ORDER}], x in [0, {MAX_SERIES_ARG}]"
        )));
    }
    Ok(())
}

/// `(x/2)^ν / Γ(ν+1)`, with the `x = 0` limit.
fn leading_power(order: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0.0 { 1.0 } else { 0.0 };
    }
    (order * (0.5 * x).ln() - ln_gamma_pos(order + 1.0)).exp()
}

/// `Σ (∓x²/4)^k / (k! (ν+1)_k)`.
fn hypergeometric_0f1(order: f64, x: f64, sign: f64, policy: &SeriesPolicy) -> Result<super::series::SeriesValue> {
    let q = sign * 0.25 * x * x;
    sum_recurrence(policy, 1.0, |k, prev| {
        let k = k as f64;
        prev * q / (k * (order + k))
    })
}

pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    bessel_j_with(order, x, &SeriesPolicy::default())
}

/// `J_ν(x)` from the power series; when cancellation in the alternating
/// series would cost too many digits, from Miller's backward recurrence.
pub fn bessel_j_with(order: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    check_ji("bessel_j", order, x)?;
    policy.validate()?;
    let lead = leading_power(order, x);
    if lead == 0.0 && x == 0.0 {
        return Ok(0.0);
    }
    let s = hypergeometric_0f1(order, x, -1.0, policy)?;
    if s.abs_sum * lead <= J_SERIES_ABS_BUDGET {
        return Ok(s.value * lead);
    }
    Ok(j_miller(order, x))
}

/// `Γ(ν+1) (2/x)^ν J_ν(x)`, equal to 1 at the origin.
pub fn bessel_j_scaled(order: f64, x: f64) -> Result<f64> {
    check_ji("bessel_j_scaled", order, x)?;
    let policy = SeriesPolicy::default();
    let s = hypergeometric_0f1(order, x, -1.0, &policy)?;
    if s.abs_sum <= J_SERIES_ABS_BUDGET {
        return Ok(s.value);
    }
    Ok(j_miller(order, x) / leading_power(order, x))
}

pub fn bessel_i(order: f64, x: f64) -> Result<f64> {
    bessel_i_with(order, x, &SeriesPolicy::default())
}

/// `I_ν(x)` from its positive power series; accurate to ~1e-15 relative.
pub fn bessel_i_with(order: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    check_ji("bessel_i", order, x)?;
    policy.validate()?;
    let lead = leading_power(order, x);
    if lead == 0.0 {
        return Ok(0.0);
    }
    Ok(hypergeometric_0f1(order, x, 1.0, policy)?.value * lead)
}

/// `Γ(ν+1) (2/x)^ν I_ν(x)`, equal to 1 at the origin.
pub fn bessel_i_scaled(order: f64, x: f64) -> Result<f64> {
    check_ji("bessel_i_scaled", order, x)?;
    Ok(hypergeometric_0f1(order, x, 1.0, &SeriesPolicy::default())?.value)
}

/// Miller's algorithm for `J_ν(x)`, `x > 0`, normalized by
/// `(x/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x)` with `μ = frac(ν)`
/// (the `k = 0` coefficient read as `Γ(μ+1)`).
fn j_miller(order: f64, x: f64) -> f64 {
    let target = order.floor() as usize;
    let mu = order - target as f64;
    let top = (target as f64).max(x);
    let start = (top + 20.0 + 2.0 * (40.0 * top).sqrt()).ceil() as usize + 2;

    let norm_coef = |k: usize| -> f64 {
        if k == 0 {
            ln_gamma_pos(mu + 1.0).exp()
        } else if mu == 0.0 {
            2.0
        } else {
            let kf = k as f64;
            (mu + 2.0 * kf) * (ln_gamma_pos(mu + kf) - ln_gamma_pos(kf + 1.0)).exp()
        }
    };

    let mut above = 0.0; // f_{j+1}
    let mut cur = 1e-30; // f_j
    let mut norm = 0.0;
    let mut result = 0.0;
    for j in (1..=start).rev() {
        if j == target {
            result = cur;
        }
        if j % 2 == 0 {
            norm += norm_coef(j / 2) * cur;
        }
        let below = 2.0 * (mu + j as f64) / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > 1e250 {
            above *= 1e-250;
            cur *= 1e-250;
            norm *= 1e-250;
            result *= 1e-250;
        }
    }
    if target == 0 {
        result = cur;
    }
    norm += norm_coef(0) * cur;
    result * (mu * (0.5 * x).ln()).exp() / norm
}

/// `e^w - 1 - w` without cancellation near zero.
fn expm1_minus_id(w: f64) -> f64 {
    if w.abs() < 1e-2 {
        w * w * (0.5 + w * (1.0 / 6.0 + w * (1.0 / 24.0 + w * (1.0 / 120.0 + w / 720.0))))
    } else {
        w.exp_m1() - w
    }
}

/// `ln((a/2)^ν K_ν(a))` for signed `ν` and `a > 0`, from
/// `(a/2)^ν K_ν(a) = ½ ∫_0^∞ exp(-z - a²/(4z)) z^(ν-1) dz`.
///
/// With `z = e^u` the integrand `exp(φ(u))`, `φ(u) = -e^u - (a²/4) e^(-u) + νu`,
/// is concave in the exponent and decays double-exponentially on both sides,
/// so the trapezoidal rule converges geometrically in the step. Nodes are
/// laid out from the peak outwards until `φ` has dropped by `TAIL_DROP`, and
/// the step is halved until two sums agree.
fn ln_k_integral(nu: f64, a: f64) -> Result<f64> {
    const TAIL_DROP: f64 = 50.0;
    // the trapezoid error squares with each halving, so agreement to 1e-13
    // leaves the finer sum accurate to rounding
    const REL_TOL: f64 = 1e-13;
    let ln_q = 2.0 * (0.5 * a).ln();
    // e^u at the peak solves y² - νy - a²/4 = 0; pick the cancellation-free root
    let root = nu.hypot(a);
    let peak = if nu > 0.0 { (0.5 * (nu + root)).ln() } else { 2f64.ln() + ln_q - (root - nu).ln() };
    let (left, right) = (peak.exp(), (ln_q - peak).exp());
    let top = -left - right + nu * peak;
    // φ(peak + w) - φ(peak); the linear part ν - left + right vanishes at the
    // peak and is dropped, since evaluating it only adds rounding of size left
    let drop = |w: f64| -left * expm1_minus_id(w) - right * expm1_minus_id(-w);
    let curvature = left + right;
    let mut step = 0.5f64.min(1.0 / curvature.sqrt());
    let mut reach = [0usize; 2];
    for (side, dir) in [(0, -1.0), (1, 1.0)] {
        while drop(dir * step * (reach[side] + 1) as f64) > -TAIL_DROP {
            reach[side] += 1;
        }
        reach[side] += 1;
    }
    let (lo, hi) = (-step * reach[0] as f64, step * reach[1] as f64);
    let node = |w: f64| drop(w).exp();
    let mut sum: f64 = (0..=reach[0] + reach[1]).map(|k| node(lo + step * k as f64)).sum();
    let mut estimate = sum * step;
    for _ in 0..12 {
        let half = 0.5 * step;
        let count = ((hi - lo) / step).round() as usize;
        sum += (0..count).map(|k| node(lo + half + step * k as f64)).sum::<f64>();
        step = half;
        let refined = sum * step;
        if (refined - estimate).abs() <= REL_TOL * refined {
            return Ok(top + (0.5 * refined).ln());
        }
        estimate = refined;
    }
    Err(Error::Convergence { last: top + (0.5 * estimate).ln(), previous: f64::NAN })
}

/// `K_μ(x)` by quadrature of its integral representation; even in `μ`.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x <= MAX_K_ARG) || !(order.abs() <= MAX_K_ORDER) {
        return Err(Error::domain(format!(
            "bessel_k({order}, {x}) outside |order| <= {MAX_K_ORDER}, x in (0, {MAX_K_ARG}]"
        )));
    }
    let mu = order.abs();
    Ok((ln_k_integral(mu, x)? - mu * (0.5 * x).ln()).exp())
}

/// `ln((a/2)^μ K_μ(a))` for signed `μ`; `+inf` at `a = 0` when `μ <= 0`.
pub fn ln_bessel_k_scaled(order: f64, a: f64) -> Result<f64> {
    if !(a >= 0.0) || !(order.abs() <= MAX_K_ORDER) {
        return Err(Error::domain(format!("bessel_k_scaled({order}, {a}) outside the supported domain")));
    }
    if a == f64::INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if a == 0.0 {
        return Ok(if order > 0.0 { ln_gamma_pos(order) - 2f64.ln() } else { f64::INFINITY });
    }
    ln_k_integral(order, a)
}

/// `(a/2)^μ K_μ(a)` for signed `μ`. For `μ > 0` it is continuous at `a = 0`
/// with value `Γ(μ)/2`; for `μ <= 0` it diverges there and `+inf` is
/// returned.
pub fn bessel_k_scaled(order: f64, a: f64) -> Result<f64> {
    Ok(ln_bessel_k_scaled(order, a)?.exp())
}
