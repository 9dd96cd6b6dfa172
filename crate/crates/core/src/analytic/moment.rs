use std::f64::consts::PI;

use super::law::{Horizon, LawSelector};
use crate::error::{Error, Result};
use crate::numerics::{bessel_i, ln_gamma_pos, mittag_leffler, struve_l};

/// `E X^p`. Odd orders vanish by symmetry.
pub fn moment(law: &LawSelector, h: &Horizon, p: u32) -> Result<f64> {
    law.validate()?;
    h.validate()?;
    if let LawSelector::Uncond { .. } = law {
        h.rate()?;
    }
    if p == 0 {
        return Ok(1.0);
    }
    if p % 2 == 1 {
        return Ok(0.0);
    }
    let reach = h.reach();
    let pf = f64::from(p);
    if let Some(v) = law.conditional_shape() {
        // Γ(v+1) Γ((p+1)/2) / (√π Γ(p/2+v+1)) (ct)^p
        let log =
            ln_gamma_pos(v + 1.0) + ln_gamma_pos((pf + 1.0) / 2.0) - 0.5 * PI.ln() - ln_gamma_pos(pf / 2.0 + v + 1.0)
                + pf * reach.ln();
        return Ok(log.exp());
    }
    match *law {
        LawSelector::CondGeneral { nu, n } if p == 2 => Ok(reach * reach / ((nu + 1.0) * (n as f64 + 2.0))),
        LawSelector::CondGeneral { .. } => {
            Err(Error::capability("moments beyond the second need n = 0 or friction in {0, 1} (no formula otherwise)"))
        }
        LawSelector::Uncond { m } => uncond_moment(m, h, pf),
        LawSelector::CondClosed { .. } => unreachable!("closed families always have a shape"),
    }
}

fn uncond_moment(m: u8, h: &Horizon, p: f64) -> Result<f64> {
    let rate_t = h.rate()? * h.t;
    let reach_p = h.reach().powf(p);
    let half_gamma = ln_gamma_pos((p + 1.0) / 2.0).exp();
    let damp = (-rate_t).exp();
    if m == 0 {
        let order = (p + 1.0) / 2.0;
        let moving = (2.0 / rate_t).powf((p - 1.0) / 2.0) * (bessel_i(order, rate_t)? + struve_l(order, rate_t)?);
        let still = (ln_gamma_pos((p + 1.0) / 2.0) - 0.5 * PI.ln() - ln_gamma_pos(p / 2.0 + 1.0)).exp();
        Ok(damp * reach_p * (half_gamma * moving + still))
    } else {
        let e = mittag_leffler(1.0, p / 2.0 + 1.0, rate_t)? - p / 2.0 * mittag_leffler(1.0, p / 2.0 + 2.0, rate_t)?;
        Ok(damp / PI.sqrt() * half_gamma * reach_p * e)
    }
}

/// `E X²` after a Poisson number of changes, for any friction:
/// `(ct)² / (ν+1) · (λt - 1 + e^(-λt)) / (λt)²`.
pub fn uncond_second_moment(nu: f64, h: &Horizon) -> Result<f64> {
    h.validate()?;
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("friction level must be >= 0, got {nu}")));
    }
    let x = h.rate()? * h.t;
    let ratio = if x < 1e-3 { 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 } else { (x + (-x).exp_m1()) / (x * x) };
    Ok(h.reach().powi(2) / (nu + 1.0) * ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let h = Horizon::unconditional(1.0, 1.0, 1.0);
        for law in [
            LawSelector::CondGeneral { nu: 0.3, n: 4 },
            LawSelector::CondClosed { m: 1, n: 2 },
            LawSelector::Uncond { m: 0 },
        ] {
            assert_eq!(moment(&law, &h, 0).unwrap(), 1.0);
            assert_eq!(moment(&law, &h, 1).unwrap(), 0.0);
            assert_eq!(moment(&law, &h, 3).unwrap(), 0.0);
        }
    }

    #[test]
    fn second_moments() {
        let h = Horizon::conditional(1.0, 1.0);
        let m = moment(&LawSelector::CondGeneral { nu: 0.0, n: 0 }, &h, 2).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        let m = moment(&LawSelector::CondClosed { m: 1, n: 2 }, &h, 2).unwrap();
        assert!((m - 0.125).abs() < 1e-15);
        let m = moment(&LawSelector::CondGeneral { nu: 0.7, n: 3 }, &h, 2).unwrap();
        assert!((m - 1.0 / (1.7 * 5.0)).abs() < 1e-15);
        let m = moment(&LawSelector::CondGeneral { nu: 0.0, n: 0 }, &h, 4).unwrap();
        assert!((m - 0.375).abs() < 1e-15);
    }

    #[test]
    fn closed_shape_agrees_with_general_second_moment() {
        let h = Horizon::conditional(1.7, 0.9);
        for (m, n) in [(0u8, 1usize), (0, 4), (1, 1), (1, 3)] {
            let closed = moment(&LawSelector::CondClosed { m, n }, &h, 2).unwrap();
            let general = h.reach().powi(2) / ((f64::from(m) + 1.0) * (n as f64 + 2.0));
            assert!((closed - general).abs() < 1e-14 * general);
        }
    }

    #[test]
    fn unconditional_second_moment_values() {
        let h = Horizon::unconditional(1.0, 1.0, 1.0);
        let e_inv = (-1f64).exp();
        assert!((moment(&LawSelector::Uncond { m: 0 }, &h, 2).unwrap() - e_inv).abs() < 1e-14);
        assert!((uncond_second_moment(0.0, &h).unwrap() - e_inv).abs() < 1e-15);
        assert!((uncond_second_moment(1.0, &h).unwrap() - e_inv / 2.0).abs() < 1e-15);
        // small rate limit: no change, E X² = (ct)²/(2(ν+1))
        let slow = Horizon::unconditional(1.0, 1.0, 1e-9);
        assert!((uncond_second_moment(0.0, &slow).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn unsupported_orders() {
        let h = Horizon::conditional(1.0, 1.0);
        assert!(matches!(moment(&LawSelector::CondGeneral { nu: 0.7, n: 3 }, &h, 4), Err(Error::Capability(_))));
    }
}
