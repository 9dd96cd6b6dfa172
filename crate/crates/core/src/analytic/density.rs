use std::f64::consts::PI;

use super::law::{Horizon, LawSelector};
use crate::error::{Error, Result};
use crate::numerics::{bessel_i, integrate_with_gaps, ln_gamma_pos, mittag_leffler, struve_l, QuadratureSpec};

/// `ln(Γ(v+1) / (√π Γ(v+1/2)))`, the normalizer of the shape-`v` law on (-1, 1).
pub(crate) fn shape_log_norm(v: f64) -> f64 {
    ln_gamma_pos(v + 1.0) - 0.5 * PI.ln() - ln_gamma_pos(v + 0.5)
}

/// Density of `reach * U`, `U` with density ∝ (1 - u²)^(v - 1/2), at `|x| = ax`
/// with `gap = reach - ax` supplied exactly. Continuous in `v` down to the
/// arcsine law at `v = 0`.
pub(crate) fn shaped_density(v: f64, reach: f64, ax: f64, gap: f64) -> f64 {
    if gap <= 0.0 {
        return 0.0;
    }
    let one_minus_u2 = (gap / reach) * ((reach + ax) / reach);
    (shape_log_norm(v) + (v - 0.5) * one_minus_u2.ln()).exp() / reach
}

fn uncond_density_gap(m: u8, h: &Horizon, ax: f64, gap: f64) -> Result<f64> {
    if gap <= 0.0 {
        return Ok(0.0);
    }
    let lambda = h.rate()?;
    let (c, t) = (h.c, h.t);
    let reach = h.reach();
    let radicand = gap * (reach + ax);
    let damp = (-lambda * t).exp();
    if m == 0 {
        let root = radicand.sqrt();
        let z = lambda / c * root;
        let smooth = lambda * damp / (2.0 * c) * (bessel_i(0.0, z)? + struve_l(0.0, z)?);
        Ok(smooth + damp / (PI * root))
    } else {
        let y = lambda * radicand / (c * c * t);
        let e = mittag_leffler(1.0, 0.5, y)? + 0.5 * mittag_leffler(1.0, 1.5, y)?;
        Ok(damp * radicand.sqrt() / (reach * reach * PI.sqrt()) * e)
    }
}

/// Density at `|x| = ax` given the exact distance `gap = ct - ax` to the edge
/// of the support.
pub(crate) fn density_gap(law: &LawSelector, h: &Horizon, ax: f64, gap: f64) -> Result<f64> {
    match law {
        LawSelector::Uncond { m } => uncond_density_gap(*m, h, ax, gap),
        _ => match law.conditional_shape() {
            Some(v) => Ok(shaped_density(v, h.reach(), ax, gap)),
            None => Err(Error::capability(format!(
                "no closed density for friction {} with n >= 1 events; only n = 0 or nu in {{0, 1}}",
                law.friction()
            ))),
        },
    }
}

/// Density of the position at `x`; zero outside `(-ct, ct)`.
pub fn density(law: &LawSelector, h: &Horizon, x: f64) -> Result<f64> {
    law.validate()?;
    h.validate()?;
    if let LawSelector::Uncond { .. } = law {
        h.rate()?;
    }
    let ax = x.abs();
    density_gap(law, h, ax, h.reach() - ax)
}

pub(crate) fn cdf_spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-13, 1e-12)
}

/// `P(X <= x)` by quadrature of the density from the nearer edge.
pub fn cdf(law: &LawSelector, h: &Horizon, x: f64) -> Result<f64> {
    law.validate()?;
    h.validate()?;
    let reach = h.reach();
    if x <= -reach {
        return Ok(0.0);
    }
    if x >= reach {
        return Ok(1.0);
    }
    let mut err = None;
    let tail = integrate_with_gaps(
        |y, _, right| match density_gap(law, h, y, right) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        x.abs(),
        reach,
        &cdf_spec(),
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    let tail = tail.clamp(0.0, 0.5);
    Ok(if x < 0.0 { tail } else { 1.0 - tail })
}

/// `P(|X| < eta)`.
pub fn central_mass(law: &LawSelector, h: &Horizon, eta: f64) -> Result<f64> {
    if eta <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * cdf(law, h, eta)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXACT_1: f64 = 1e-14;

    #[test]
    fn closed_conditional_values() {
        let h = Horizon::conditional(1.0, 1.0);
        let d = density(&LawSelector::CondClosed { m: 0, n: 2 }, &h, 0.0).unwrap();
        assert!((d - 2.0 / PI).abs() < EXACT_1);
        let d = density(&LawSelector::CondClosed { m: 1, n: 1 }, &h, 0.0).unwrap();
        assert!((d - 8.0 / (3.0 * PI)).abs() < EXACT_1);
        // one change, no friction: uniform on (-ct, ct)
        let h2 = Horizon::conditional(2.0, 1.5);
        for x in [-2.9, -1.0, 0.0, 0.4, 2.99] {
            let d = density(&LawSelector::CondClosed { m: 0, n: 1 }, &h2, x).unwrap();
            assert!((d - 1.0 / 6.0).abs() < EXACT_1);
        }
        assert_eq!(density(&LawSelector::CondClosed { m: 0, n: 1 }, &h2, 3.5).unwrap(), 0.0);
    }

    #[test]
    fn frictionless_single_segment_is_arcsine() {
        let h = Horizon::conditional(1.0, 1.0);
        for x in [0.0, 0.3, -0.9] {
            let d = density(&LawSelector::CondGeneral { nu: 0.0, n: 0 }, &h, x).unwrap();
            let want = 1.0 / (PI * (1.0f64 - x * x).sqrt());
            assert!((d - want).abs() < 1e-14);
        }
    }

    #[test]
    fn general_friction_with_events_needs_monte_carlo() {
        let h = Horizon::conditional(1.0, 1.0);
        let e = density(&LawSelector::CondGeneral { nu: 0.7, n: 2 }, &h, 0.1).unwrap_err();
        assert!(matches!(e, Error::Capability(_)));
        // integer friction coincides with a closed family
        let a = density(&LawSelector::CondGeneral { nu: 1.0, n: 2 }, &h, 0.1).unwrap();
        let b = density(&LawSelector::CondClosed { m: 1, n: 2 }, &h, 0.1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unconditional_needs_positive_rate() {
        let law = LawSelector::Uncond { m: 0 };
        assert!(matches!(density(&law, &Horizon::unconditional(1.0, 1.0, -1.0), 0.0), Err(Error::Domain(_))));
        assert!(density(&law, &Horizon::conditional(1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn cdf_of_uniform_case() {
        let h = Horizon::conditional(1.0, 2.0);
        let law = LawSelector::CondClosed { m: 0, n: 1 };
        for x in [-1.5, -0.2, 0.0, 0.7, 1.9] {
            assert!((cdf(&law, &h, x).unwrap() - (x + 2.0) / 4.0).abs() < 1e-12);
        }
        assert_eq!(cdf(&law, &h, -3.0).unwrap(), 0.0);
        assert_eq!(cdf(&law, &h, 3.0).unwrap(), 1.0);
    }
}
