//! Observables of `Y = exp(X)` on the vertical axis of the hyperbolic half
//! plane, where the distance from the starting point is `|X|`.

use serde::{Deserialize, Serialize};

use super::density::central_mass;
use super::law::{Horizon, LawSelector};
use super::moment::uncond_second_moment;
use super::transform::{transform, TransformKind, TransformMethod};
use crate::error::{Error, Result};

/// `E[Y | n changes]`, the conditional moment generating function at 1.
pub fn hyperbolic_mean(m: u8, n: usize, c: f64, t: f64) -> Result<f64> {
    let law = LawSelector::CondClosed { m, n };
    Ok(transform(&law, &Horizon::conditional(c, t), TransformKind::Mgf, 1.0, TransformMethod::Closed)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceBound {
    /// `P(|X| < eta)` when the law is known in closed form.
    pub exact: Option<f64>,
    /// Chebyshev bound `max(0, 1 - E X² / eta²)`.
    pub lower_bound: f64,
}

/// Distribution function of the hyperbolic distance at `eta`, conditioned
/// on `events` changes when given, otherwise mixed over the Poisson count.
pub fn hyperbolic_distance_cdf(nu: f64, events: Option<usize>, h: &Horizon, eta: f64) -> Result<DistanceBound> {
    h.validate()?;
    if !(eta > 0.0) {
        return Err(Error::domain(format!("distance level must be > 0, got {eta}")));
    }
    let (second, law) = match events {
        Some(n) => {
            let law = LawSelector::CondGeneral { nu, n };
            law.validate()?;
            (h.reach().powi(2) / ((nu + 1.0) * (n as f64 + 2.0)), law.conditional_shape().map(|_| law))
        }
        None => {
            let law = (nu == 0.0 || nu == 1.0).then_some(LawSelector::Uncond { m: nu as u8 });
            (uncond_second_moment(nu, h)?, law)
        }
    };
    let exact = match law {
        Some(law) => Some(central_mass(&law, h, eta)?),
        None => None,
    };
    Ok(DistanceBound { exact, lower_bound: (1.0 - second / (eta * eta)).max(0.0) })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen 17-digit oracle values
mod tests {
    use super::*;

    #[test]
    fn mean_matches_modified_bessel() {
        assert!((hyperbolic_mean(0, 2, 1.0, 1.0).unwrap() - 1.130_318_207_984_970_1).abs() < 1e-15);
        assert!((hyperbolic_mean(1, 3, 1e-9, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_bound() {
        let h = Horizon::unconditional(1.0, 1.0, 1.0);
        let b = hyperbolic_distance_cdf(0.0, None, &h, 0.9).unwrap();
        assert!((b.lower_bound - (1.0 - (-1f64).exp() / 0.81)).abs() < 1e-14);
        assert!(b.exact.unwrap() >= b.lower_bound);
        let vacuous = hyperbolic_distance_cdf(0.5, None, &h, 0.1).unwrap();
        assert_eq!(vacuous.lower_bound, 0.0);
        assert!(vacuous.exact.is_none());
    }

    #[test]
    fn full_support_is_certain() {
        let h = Horizon::unconditional(1.0, 1.0, 1.0);
        for nu in [0.0, 1.0] {
            let b = hyperbolic_distance_cdf(nu, None, &h, 1.0).unwrap();
            assert!((b.exact.unwrap() - 1.0).abs() < 1e-6);
        }
        let b = hyperbolic_distance_cdf(1.0, Some(2), &h, 1.0).unwrap();
        assert!((b.exact.unwrap() - 1.0).abs() < 1e-12);
    }
}
