use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::law::{Horizon, LawSelector};
use crate::error::{Error, Result};
use crate::numerics::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_j_scaled, integrate, mittag_leffler, struve_l, QuadratureSpec,
};
use crate::sampling::{draw_schedule, par_draw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformKind {
    /// `E cos(αX)` (the characteristic function; the laws are symmetric).
    Cf,
    /// `E exp(βX)`.
    Mgf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformMethod {
    /// Bessel closed form for conditional laws with a known shape.
    Closed,
    /// Single angular integral for unconditional laws.
    Integral,
    /// Average of per-segment Bessel factors over random schedules.
    MonteCarlo { count: usize, seed: u64 },
}

/// A value with its Monte Carlo standard error (zero when deterministic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_err: 0.0 }
    }

    pub(crate) fn from_draws(draws: &[f64]) -> Self {
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        if draws.len() < 2 {
            return Self { value: mean, std_err: f64::NAN };
        }
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self { value: mean, std_err: (var / n).sqrt() }
    }
}

/// Transform of one segment of length `Δ` at friction `nu`:
/// `Γ(ν+1) (2/y)^ν J_ν(y)` (or `I_ν`) with `y = |arg| c Δ`.
pub(crate) fn segment_factor(kind: TransformKind, nu: f64, y: f64) -> Result<f64> {
    match kind {
        TransformKind::Cf => bessel_j_scaled(nu, y),
        TransformKind::Mgf => bessel_i_scaled(nu, y),
    }
}

pub fn transform(
    law: &LawSelector,
    h: &Horizon,
    kind: TransformKind,
    arg: f64,
    method: TransformMethod,
) -> Result<Estimate> {
    law.validate()?;
    h.validate()?;
    if !arg.is_finite() {
        return Err(Error::domain(format!("transform argument must be finite, got {arg}")));
    }
    match (method, law) {
        (TransformMethod::Closed, LawSelector::Uncond { .. }) => {
            Err(Error::usage("unconditional transforms are evaluated with the integral method"))
        }
        (TransformMethod::Closed, _) => {
            let v = law.conditional_shape().ok_or_else(|| {
                Error::usage("closed transforms need n = 0 or a closed family; use the Monte Carlo method")
            })?;
            Ok(Estimate::exact(segment_factor(kind, v, arg.abs() * h.reach())?))
        }
        (TransformMethod::Integral, LawSelector::Uncond { m }) => {
            Ok(Estimate::exact(uncond_integral(*m, h, kind, arg)?))
        }
        (TransformMethod::Integral, _) => Err(Error::usage("the integral method applies to unconditional laws")),
        (TransformMethod::MonteCarlo { count, seed }, LawSelector::CondGeneral { nu, n }) if *n >= 1 => {
            monte_carlo(*nu, *n, h, kind, arg, count, seed)
        }
        (TransformMethod::MonteCarlo { .. }, _) => {
            Err(Error::usage("the Monte Carlo transform applies to general friction with n >= 1"))
        }
    }
}

fn monte_carlo(
    nu: f64,
    n: usize,
    h: &Horizon,
    kind: TransformKind,
    arg: f64,
    count: usize,
    seed: u64,
) -> Result<Estimate> {
    if count < 2 {
        return Err(Error::usage("Monte Carlo transform needs at least two schedules"));
    }
    let scale = arg.abs() * h.c;
    let draws = par_draw(seed, count, |rng, _| {
        let schedule = draw_schedule(n, h.t, rng)?;
        let product: Result<f64> =
            schedule.segments().try_fold(1.0, |acc, seg| Ok(acc * segment_factor(kind, nu, scale * seg)?));
        product
    })?;
    Ok(Estimate::from_draws(&draws))
}

/// Angular integral over the support, written with `x = ct cos θ` and
/// folded onto `(0, π/2)` by symmetry.
fn uncond_integral(m: u8, h: &Horizon, kind: TransformKind, arg: f64) -> Result<f64> {
    let lambda = h.rate()?;
    let rate_t = lambda * h.t;
    let y = arg.abs() * h.reach();
    let even = |z: f64| match kind {
        TransformKind::Cf => z.cos(),
        TransformKind::Mgf => z.cosh(),
    };
    let spec = QuadratureSpec::with_tol(1e-14, 1e-12);
    let mut err = None;
    let mut guard = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    };
    let value = if m == 0 {
        let atom_free = match kind {
            TransformKind::Cf => bessel_j(0.0, y)?,
            TransformKind::Mgf => bessel_i(0.0, y)?,
        };
        let integral = integrate(
            |th: f64| {
                let z = rate_t * th.sin();
                let special = guard(bessel_i(0.0, z).and_then(|i| Ok(i + struve_l(0.0, z)?)));
                even(y * th.cos()) * special * th.sin()
            },
            0.0,
            FRAC_PI_2,
            &spec,
        )?;
        (-rate_t).exp() * (atom_free + rate_t * integral)
    } else {
        let integral = integrate(
            |th: f64| {
                let s2 = th.sin().powi(2);
                let z = rate_t * s2;
                let special =
                    guard(mittag_leffler(1.0, 0.5, z).and_then(|a| Ok(a + 0.5 * mittag_leffler(1.0, 1.5, z)?)));
                even(y * th.cos()) * special * s2
            },
            0.0,
            FRAC_PI_2,
            &spec,
        )?;
        2.0 * (-rate_t).exp() / std::f64::consts::PI.sqrt() * integral
    };
    match err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}
