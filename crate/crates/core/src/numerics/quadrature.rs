//! Double-exponential quadrature: tanh-sinh on finite intervals, exp-sinh
//! on `[lo, +inf)`.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Finest step is `2^-max_levels`.
    pub max_levels: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_levels: 12 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_levels < 1 {
            return Err(Error::usage("quadrature tolerances must be positive and max_levels >= 1"));
        }
        Ok(())
    }
}

// Beyond these the finite-map weights underflow and the infinite-map
// abscissae leave the f64 range.
const FINITE_T_MAX: f64 = 6.1;
const INFINITE_T_MAX: f64 = 6.7;
const FIRST_CHECKED_LEVEL: u32 = 3;

/// `∫_lo^hi f(x) dx`; `hi` may be `+inf`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f = f;
    integrate_with_gaps(|x, _, _| f(x), lo, hi, spec)
}

/// Like [`integrate`], but the integrand also receives `x - lo` and
/// `hi - x` computed without cancellation, so factors such as
/// `(hi - x)^(-1/2)` stay accurate next to the endpoint. On a semi-infinite
/// interval the third argument is `+inf`.
pub fn integrate_with_gaps<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || lo == f64::NEG_INFINITY {
        return Err(Error::domain(format!("invalid integration interval ({lo}, {hi})")));
    }
    if hi == f64::NEG_INFINITY {
        return Err(Error::domain("upper limit cannot be -inf"));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if hi.is_infinite() {
        return refine(spec, INFINITE_T_MAX, |t| {
            let u = FRAC_PI_2 * t.sinh();
            let gap = u.exp();
            let w = gap * FRAC_PI_2 * t.cosh();
            (w, f(lo + gap, gap, f64::INFINITY))
        });
    }
    if lo > hi {
        return finite(&mut |x, a, b| f(x, b, a), hi, lo, spec).map(|v| -v);
    }
    finite(&mut f, lo, hi, spec)
}

fn finite<F>(f: &mut F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64, f64, f64) -> f64,
{
    let width = hi - lo;
    refine(spec, FINITE_T_MAX, |t| {
        let u = FRAC_PI_2 * t.abs().sinh();
        let e = (-2.0 * u).exp();
        let q = e / (1.0 + e);
        let w = width * PI * t.cosh() * q * (1.0 - q);
        let near = width * q;
        let far = width * (1.0 - q);
        let val = if t >= 0.0 { f(hi - near, far, near) } else { f(lo + near, near, far) };
        (w, val)
    })
}

/// Trapezoidal refinement in `t`; `node(t)` returns (weight, integrand).
fn refine<N>(spec: &QuadratureSpec, t_max: f64, mut node: N) -> Result<f64>
where
    N: FnMut(f64) -> (f64, f64),
{
    let mut add = |t: f64, acc: &mut f64| {
        let (w, v) = node(t);
        let c = w * v;
        if w > 0.0 && c.is_finite() {
            *acc += c;
        }
    };

    // Level 0: integer t.
    let mut sum = 0.0;
    add(0.0, &mut sum);
    let mut k = 1.0;
    while k <= t_max {
        add(k, &mut sum);
        add(-k, &mut sum);
        k += 1.0;
    }
    let mut h = 1.0;
    let mut estimate = sum * h;
    let first_checked = FIRST_CHECKED_LEVEL.min(spec.max_levels);

    for level in 1..=spec.max_levels {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            add(t, &mut sum);
            add(-t, &mut sum);
            t += 2.0 * h;
        }
        let previous = estimate;
        estimate = sum * h;
        if level >= first_checked {
            let tol = spec.abs_tol.max(spec.rel_tol * estimate.abs());
            if (estimate - previous).abs() <= tol {
                return Ok(estimate);
            }
        }
        if level == spec.max_levels {
            return Err(Error::Convergence { last: estimate, previous });
        }
    }
    unreachable!("max_levels >= 1 checked by validate")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadratureSpec {
        QuadratureSpec::with_tol(1e-14, 1e-14)
    }

    #[test]
    fn arcsine_mass() {
        let v =
            integrate_with_gaps(|_, a, b| 1.0 / (a.sqrt() * b.sqrt()), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn half_gamma_on_half_line() {
        let v = integrate(|z| (-z).exp() * z.sqrt(), 0.0, f64::INFINITY, &tight()).unwrap();
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn polynomial_and_reversed_limits() {
        let v = integrate(|x| x * x, 0.0, 3.0, &tight()).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let r = integrate(|x| x * x, 3.0, 0.0, &tight()).unwrap();
        assert!((r + 9.0).abs() < 1e-12);
        assert_eq!(integrate(|x| x, 1.0, 1.0, &tight()).unwrap(), 0.0);
    }

    #[test]
    fn gaps_are_exact_near_endpoints() {
        let mut worst: f64 = 0.0;
        let _ = integrate_with_gaps(
            |x, a, b| {
                worst = worst.max((x - 2.0 - a).abs()).max((5.0 - x - b).abs());
                0.0
            },
            2.0,
            5.0,
            &tight(),
        );
        assert!(worst < 1e-14);
    }

    #[test]
    fn exponential_decay_from_offset() {
        let v = integrate(|x| (-(x - 3.0)).exp(), 3.0, f64::INFINITY, &tight()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec { abs_tol: 1e-15, rel_tol: 1e-15, max_levels: 4 };
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = QuadratureSpec { abs_tol: 0.0, ..QuadratureSpec::default() };
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
    }
}
