//! Laws of the position observed at an independent random clock.
//!
//! Every single-level clock turns the shape-`v` law into a scale mixture
//! over a Beta-distributed variable `W`; iterated clocks are reduced to a
//! single level by averaging over draws of the inner clock.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::density::shaped_density;
use super::law::{closed_shape, Horizon, LawSelector};
use super::transform::Estimate;
use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_with_gaps, ln_bessel_k_scaled, ln_beta_pos, ln_gamma_pos, QuadratureSpec};
use crate::sampling::{draw_time, par_draw, TimeChange};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedLaw {
    pub base: LawSelector,
    pub change: TimeChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixtureMethod {
    /// Quadrature of the mixture formula of a single-level clock.
    Closed,
    /// Average of the single-level formula over draws of the inner clocks.
    MonteCarlo { count: usize, seed: u64 },
}

/// A density value; `singular` marks the integrable `+inf` some mixtures
/// take at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    pub std_err: f64,
    pub singular: bool,
}

impl DensityValue {
    fn exact(value: f64) -> Self {
        Self { value, std_err: 0.0, singular: value.is_infinite() }
    }
}

const POISSON_MASS: f64 = 1.0 - 1e-15;
const MAX_POISSON_MEAN: f64 = 500.0;

fn mixture_spec() -> QuadratureSpec {
    QuadratureSpec { abs_tol: 1e-15, rel_tol: 1e-11, max_levels: 12 }
}

/// `(weight, shape)` pairs of the event-count mixture behind `base`.
fn shape_terms(base: &LawSelector, h: &Horizon) -> Result<Vec<(f64, f64)>> {
    if let Some(v) = base.conditional_shape() {
        return Ok(vec![(1.0, v)]);
    }
    match *base {
        LawSelector::Uncond { m } => {
            let mean = h.rate()? * h.t;
            if mean > MAX_POISSON_MEAN {
                return Err(Error::domain(format!("Poisson mean {mean} too large for the event-count series")));
            }
            let mut terms = Vec::new();
            let mut w = (-mean).exp();
            let mut total = 0.0;
            let mut n = 0usize;
            loop {
                terms.push((w, closed_shape(m, n)));
                total += w;
                n += 1;
                w *= mean / n as f64;
                if total >= POISSON_MASS || (n as f64 > mean && w < 1e-300) {
                    break;
                }
            }
            Ok(terms)
        }
        _ => Err(Error::capability(format!(
            "composed laws need m in {{0, 1}} or n = 0; friction {} with n >= 1 has no closed form",
            base.friction()
        ))),
    }
}

fn check_bessel_constraint(v: f64, dim: u32) -> Result<()> {
    let bound = f64::from(dim) / 2.0 - 1.0;
    if v < bound {
        return Err(Error::capability(format!(
            "requires v_m > d/2 - 1 (v_m = {v}, d = {dim}); the mixture is undefined there"
        )));
    }
    Ok(())
}

fn check_gamma_constraint(v: f64, shape: f64) -> Result<()> {
    if v <= shape / 2.0 - 1.0 {
        return Err(Error::capability(format!("requires v_m > alpha/2 - 1 (v_m = {v}, alpha = {shape})")));
    }
    Ok(())
}

fn normal_density(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Evaluates a quadrature whose integrand may fail, surfacing the first
/// failure instead of the integral.
fn guarded_integral<F>(lo: f64, hi: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    let mut err = None;
    let v = integrate_with_gaps(
        |x, l, r| match f(x, l, r) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        &mixture_spec(),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// [`guarded_integral`] split at `mid`, where the integrand switches from
/// a cutoff to its bulk; tiny arguments put that switch far from both ends.
/// The bulk `(mid, hi)` is integrated in `z = ln(x / mid)`, which flattens
/// the `1/x`-like decay beyond the switch. The gaps handed to `f` stay
/// measured from `lo` and `hi`.
fn guarded_split<F>(lo: f64, mid: f64, hi: f64, mut f: F) -> Result<f64>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    // a subnormal switch is too close to lo to resolve; the head is negligible there
    if !(mid > lo && mid < hi) || mid - lo < f64::MIN_POSITIVE {
        return guarded_integral(lo, hi, f);
    }
    let head = guarded_integral(lo, mid, |x, left, right| f(x, left, (hi - mid) + right))?;
    let span = (hi / mid).ln();
    let tail = guarded_integral(0.0, span, |z, _, z_gap| {
        let x = mid * z.exp();
        let right = if hi.is_finite() { -hi * (-z_gap).exp_m1() } else { f64::INFINITY };
        Ok(x * f(x, (mid - lo) + mid * z.exp_m1(), right)?)
    })?;
    Ok(head + tail)
}

/// `∫ Beta(d/2, v-d/2+1)(w) N(x; 0, var·w) dw`; `W ≡ 1` on the boundary
/// `v = d/2 - 1`.
fn gaussian_scale_mixture(v: f64, dim: u32, var: f64, x: f64) -> Result<f64> {
    check_bessel_constraint(v, dim)?;
    let a = f64::from(dim) / 2.0;
    let b = v - a + 1.0;
    if b <= 0.0 {
        return Ok(normal_density(x, var));
    }
    if x == 0.0 && dim == 1 {
        return Ok(f64::INFINITY);
    }
    let sd = var.sqrt();
    let ax = x.abs();
    if dim == 1 {
        // w = u²
        let log_norm = 2f64.ln() - ln_beta_pos(0.5, b);
        return guarded_split(0.0, ax / sd, 1.0, |u, _, right| {
            let log = log_norm + (v - 0.5) * (right * (1.0 + u)).ln()
                - 0.5 * (ax / (sd * u)).powi(2)
                - 0.5 * (2.0 * PI * var).ln()
                - u.ln();
            Ok(log.exp())
        });
    }
    let log_norm = -ln_beta_pos(a, b);
    guarded_split(0.0, (ax / sd).powi(2), 1.0, |w, left, right| {
        let log = log_norm + (a - 1.5) * left.ln() + (b - 1.0) * right.ln()
            - 0.5 * (ax / sd).powi(2) / w
            - 0.5 * (2.0 * PI * var).ln();
        Ok(log.exp())
    })
}

/// `Σ w p_v(x; reach)` over the `(w, v)` event-count terms.
fn shaped_kernel(terms: &[(f64, f64)], reach: f64, ax: f64, gap: f64) -> f64 {
    terms.iter().map(|&(w, v)| w * shaped_density(v, reach, ax, gap)).sum()
}

/// `∫ g(s) Σ w p_v(x; c s) ds` over the clock values `s > |x|/c` that reach `x`,
/// integrated in `y = ln(s c / |x|)` so the power laws of `g` near the
/// lower limit stay resolvable for tiny `|x|`. `ln_clock(s, hi - s)` is the
/// log density of the clock, whose support is `(0, hi)`; `scale` is a
/// typical clock value, where the integrand in `y` leaves its power-law
/// regime. The clock density is evaluated once per node for all terms.
fn clock_mixture<G>(terms: &[(f64, f64)], c: f64, ax: f64, scale: f64, hi: Option<f64>, ln_clock: G) -> Result<f64>
where
    G: Fn(f64, f64) -> Result<f64>,
{
    let top = hi.unwrap_or(f64::INFINITY);
    let weight = |s: f64, upper_gap: f64| -> Result<f64> {
        let log_g = ln_clock(s, upper_gap)?;
        Ok(if log_g == f64::NEG_INFINITY { 0.0 } else { log_g.exp() })
    };
    if ax == 0.0 {
        // only reached for clocks with E[1/S] finite
        return guarded_integral(0.0, top, |s, _, right| {
            Ok(weight(s, right)? * shaped_kernel(terms, c * s, 0.0, c * s))
        });
    }
    let lo = ax / c;
    if lo >= top {
        return Ok(0.0);
    }
    let span = (top / lo).ln();
    guarded_split(0.0, (scale / lo).ln(), span, |y, _, right| {
        let s = lo * y.exp();
        let upper_gap = match hi {
            Some(hi) => -hi * (-right).exp_m1(),
            None => f64::INFINITY,
        };
        let log_g = ln_clock(s, upper_gap)?;
        if log_g == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        // ds = s dy; the gap c s - |x| is exact as c lo (e^y - 1)
        Ok((log_g + s.ln()).exp() * shaped_kernel(terms, c * s, ax, c * lo * y.exp_m1()))
    })
}

/// Clock `t · sin²(πU/2)`, arcsine distributed on `(0, t)`.
fn sojourn_mixture(terms: &[(f64, f64)], c: f64, t: f64, x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(f64::INFINITY);
    }
    clock_mixture(terms, c, ax, 0.5 * t, Some(t), |s, upper_gap| Ok(-PI.ln() - 0.5 * (s.ln() + upper_gap.ln())))
}

/// Gamma clock of shape `alpha` and rate `t`. Shape 1 gives a Beta mixture
/// of Laplace laws with scale `c√W/t`, `W ~ Beta(1/2, v + 1/2)`.
fn gamma_mixture(terms: &[(f64, f64)], alpha: f64, c: f64, t: f64, x: f64) -> Result<f64> {
    for &(_, v) in terms {
        check_gamma_constraint(v, alpha)?;
    }
    let ax = x.abs();
    if ax == 0.0 && alpha <= 1.0 {
        return Ok(f64::INFINITY);
    }
    if alpha == 1.0 {
        let mut total = 0.0;
        for &(w, v) in terms {
            total += w * laplace_mixture(v, c, t, ax)?;
        }
        return Ok(total);
    }
    let log_norm = alpha * t.ln() - ln_gamma_pos(alpha);
    clock_mixture(terms, c, ax, alpha / t, None, |s, _| Ok(log_norm + (alpha - 1.0) * s.ln() - t * s))
}

/// Laplace laws of scale `c U / t` mixed over `U² ~ Beta(1/2, v + 1/2)`.
fn laplace_mixture(v: f64, c: f64, t: f64, ax: f64) -> Result<f64> {
    let log_norm = 2f64.ln() - ln_beta_pos(0.5, v + 0.5);
    guarded_split(0.0, t * ax / c, 1.0, |u, _, right| {
        let log = log_norm + (v - 0.5) * (right * (1.0 + u)).ln() + (t / (2.0 * c * u)).ln() - t * ax / (c * u);
        Ok(log.exp())
    })
}

/// Bessel process of dimension `dim` run to a Gamma(`alpha`, rate `t`) time.
/// Its value `R` has density
/// `2 t^(d/2) r^(d-1) (a/2)^ν K_ν(a) / (Γ(α) Γ(d/2) 2^(d/2-1))`,
/// `a = r√(2t)`, `ν = α - d/2`.
fn bessel_of_gamma_mixture(terms: &[(f64, f64)], dim: u32, alpha: f64, c: f64, t: f64, x: f64) -> Result<f64> {
    for &(_, v) in terms {
        check_bessel_constraint(v, dim)?;
    }
    let ax = x.abs();
    if ax == 0.0 && (alpha <= 0.5 || dim < 2) {
        return Ok(f64::INFINITY);
    }
    let half_dim = f64::from(dim) / 2.0;
    let order = alpha - half_dim;
    let root = (2.0 * t).sqrt();
    let log_norm =
        2f64.ln() + half_dim * t.ln() - ln_gamma_pos(alpha) - ln_gamma_pos(half_dim) - (half_dim - 1.0) * 2f64.ln();
    clock_mixture(terms, c, ax, (f64::from(dim) * alpha / t).sqrt(), None, |r, _| {
        Ok(log_norm + (f64::from(dim) - 1.0) * r.ln() + ln_bessel_k_scaled(order, r * root)?)
    })
}

/// Density of the event-count mixture `Σ w p_v` observed at a single-level
/// clock with parameter `t`.
fn single_level(terms: &[(f64, f64)], change: &TimeChange, c: f64, t: f64, x: f64) -> Result<f64> {
    let per_term = |variance: f64, dim: u32| -> Result<f64> {
        let mut total = 0.0;
        for &(w, v) in terms {
            let term = gaussian_scale_mixture(v, dim, variance, x)?;
            if term.is_infinite() {
                return Ok(f64::INFINITY);
            }
            total += w * term;
        }
        Ok(total)
    };
    match change {
        TimeChange::Bessel { dim, iterations: 0 } => per_term(c * c * t, *dim),
        TimeChange::GaussianModulus { variance } => per_term(c * c * variance.at(t)?, 1),
        TimeChange::Sojourn => sojourn_mixture(terms, c, t, x),
        TimeChange::GammaChain { shapes } if shapes.len() == 1 => gamma_mixture(terms, shapes[0], c, t, x),
        TimeChange::BesselOfGamma { dim, shape } => bessel_of_gamma_mixture(terms, *dim, *shape, c, t, x),
        _ => Err(Error::capability(format!("clock {change} is iterated; use the Monte Carlo mixture"))),
    }
}

fn prepare(law: &ComposedLaw, h: &Horizon) -> Result<Vec<(f64, f64)>> {
    law.base.validate()?;
    law.change.validate()?;
    h.validate()?;
    let terms = shape_terms(&law.base, h)?;
    // constraints are checked on the outermost single level
    let outer = law.change.split_outer().map(|(o, _)| o).unwrap_or_else(|| law.change.clone());
    for &(_, v) in &terms {
        match &outer {
            TimeChange::Bessel { dim, .. } | TimeChange::BesselOfGamma { dim, .. } => check_bessel_constraint(v, *dim)?,
            TimeChange::GammaChain { shapes } => check_gamma_constraint(v, shapes[0])?,
            _ => {}
        }
    }
    Ok(terms)
}

/// Density at `x` of the motion observed at the random clock. Event counts
/// of unconditional laws are Poisson with mean `λt` at the deterministic
/// horizon.
pub fn composed_density(law: &ComposedLaw, h: &Horizon, x: f64, method: MixtureMethod) -> Result<DensityValue> {
    let terms = prepare(law, h)?;
    match method {
        MixtureMethod::Closed => {
            if law.change.is_iterated() {
                return Err(Error::capability(format!(
                    "clock {} is iterated; no closed mixture, use the Monte Carlo mixture",
                    law.change
                )));
            }
            Ok(DensityValue::exact(single_level(&terms, &law.change, h.c, h.t, x)?))
        }
        MixtureMethod::MonteCarlo { count, seed } => {
            let (outer, inner) = law
                .change
                .split_outer()
                .ok_or_else(|| Error::usage(format!("clock {} is single-level; use the closed mixture", law.change)))?;
            if count < 2 {
                return Err(Error::usage("Monte Carlo mixture needs at least two draws"));
            }
            let draws = par_draw(seed, count, |rng, _| {
                let s = draw_time(&inner, h.t, rng)?;
                if s <= 0.0 {
                    return Ok(0.0);
                }
                single_level(&terms, &outer, h.c, s, x)
            })?;
            if draws.iter().any(|d| d.is_infinite()) {
                return Ok(DensityValue { value: f64::INFINITY, std_err: 0.0, singular: true });
            }
            let est = Estimate::from_draws(&draws);
            Ok(DensityValue { value: est.value, std_err: est.std_err, singular: false })
        }
    }
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn gaussian_scale_mixture_cdf(v: f64, dim: u32, var: f64, x: f64) -> Result<f64> {
    check_bessel_constraint(v, dim)?;
    let a = f64::from(dim) / 2.0;
    let b = v - a + 1.0;
    let sd = var.sqrt();
    if b <= 0.0 {
        return Ok(standard_normal_cdf(x / sd));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    // P(X > |x|) = E Φ(-|x| / (sd √W))
    let ax = x.abs();
    let upper = if dim == 1 {
        let log_norm = 2f64.ln() - ln_beta_pos(0.5, b);
        guarded_split(0.0, ax / sd, 1.0, |u, _, right| {
            let weight = (log_norm + (v - 0.5) * (right * (1.0 + u)).ln()).exp();
            Ok(weight * standard_normal_cdf(-ax / (sd * u)))
        })?
    } else {
        let log_norm = -ln_beta_pos(a, b);
        guarded_split(0.0, (ax / sd).powi(2), 1.0, |w, left, right| {
            let weight = (log_norm + (a - 1.0) * left.ln() + (b - 1.0) * right.ln()).exp();
            Ok(weight * standard_normal_cdf(-ax / (sd * w.sqrt())))
        })?
    };
    Ok(if x < 0.0 { upper } else { 1.0 - upper })
}

fn laplace_mixture_cdf(v: f64, c: f64, t: f64, x: f64) -> Result<f64> {
    check_gamma_constraint(v, 1.0)?;
    if x == 0.0 {
        return Ok(0.5);
    }
    let ax = x.abs();
    let b = v + 0.5;
    let log_norm = 2f64.ln() - ln_beta_pos(0.5, b);
    // P(X > |x|) = E ½ exp(-t|x| / (c U))
    let upper = guarded_split(0.0, t * ax / c, 1.0, |u, _, right| {
        Ok((log_norm + (v - 0.5) * (right * (1.0 + u)).ln() - t * ax / (c * u)).exp() * 0.5)
    })?;
    Ok(if x < 0.0 { upper } else { 1.0 - upper })
}

/// `P(X <= x)` for single-level clocks. Gaussian-scale and Laplace mixtures
/// use their kernel distribution functions; other clocks integrate the
/// density from the origin.
pub fn composed_cdf(law: &ComposedLaw, h: &Horizon, x: f64) -> Result<f64> {
    let terms = prepare(law, h)?;
    if law.change.is_iterated() {
        return Err(Error::capability("distribution functions need a single-level clock"));
    }
    let (c, t) = (h.c, h.t);
    let per_term = |cdf: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let mut total = 0.0;
        for &(w, v) in &terms {
            total += w * cdf(v)?;
        }
        Ok(total)
    };
    match &law.change {
        TimeChange::Bessel { dim, .. } => per_term(&|v| gaussian_scale_mixture_cdf(v, *dim, c * c * t, x)),
        TimeChange::GaussianModulus { variance } => {
            let var = c * c * variance.at(t)?;
            per_term(&|v| gaussian_scale_mixture_cdf(v, 1, var, x))
        }
        TimeChange::GammaChain { shapes } if shapes[0] == 1.0 => per_term(&|v| laplace_mixture_cdf(v, c, t, x)),
        change => {
            let mut err = None;
            let half = integrate(
                |y| match single_level(&terms, change, c, t, y) {
                    Ok(d) => d,
                    Err(e) => {
                        err.get_or_insert(e);
                        f64::NAN
                    }
                },
                0.0,
                x.abs(),
                &QuadratureSpec::with_tol(1e-12, 1e-10),
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            Ok(if x < 0.0 { 0.5 - half } else { 0.5 + half })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(base: LawSelector, change: &str) -> ComposedLaw {
        ComposedLaw { base, change: change.parse().unwrap() }
    }

    #[test]
    fn constraint_is_a_capability_error() {
        let h = Horizon::conditional(1.0, 1.0);
        // v = 1/2 < d/2 - 1 = 1 for d = 4
        let l = law(LawSelector::CondClosed { m: 0, n: 1 }, "bessel:d=4");
        let e = composed_density(&l, &h, 0.3, MixtureMethod::Closed).unwrap_err();
        assert!(matches!(&e, Error::Capability(msg) if msg.contains("d/2 - 1")), "{e}");
        let l = law(LawSelector::CondGeneral { nu: 0.0, n: 0 }, "gamma:2");
        let e = composed_density(&l, &h, 0.3, MixtureMethod::Closed).unwrap_err();
        assert!(matches!(&e, Error::Capability(msg) if msg.contains("alpha/2 - 1")), "{e}");
    }

    #[test]
    fn degenerate_boundary_is_gaussian() {
        let h = Horizon::conditional(1.5, 2.0);
        let l = law(LawSelector::CondGeneral { nu: 0.0, n: 0 }, "bessel:d=2");
        let got = composed_density(&l, &h, 0.7, MixtureMethod::Closed).unwrap().value;
        assert!((got - normal_density(0.7, 1.5 * 1.5 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn singular_origin_is_flagged() {
        let h = Horizon::conditional(1.0, 1.0);
        for clock in ["bessel:d=1", "gamma:1", "sojourn", "gamma:0.5", "bessel-of-gamma:d=1,alpha=0.5"] {
            let l = law(LawSelector::CondClosed { m: 0, n: 2 }, clock);
            let d = composed_density(&l, &h, 0.0, MixtureMethod::Closed).unwrap();
            assert!(d.singular && d.value.is_infinite(), "{clock}");
        }
        let l = law(LawSelector::CondClosed { m: 0, n: 2 }, "gamma:2");
        assert!(composed_density(&l, &h, 0.0, MixtureMethod::Closed).unwrap().value.is_finite());
    }

    #[test]
    fn method_must_match_clock() {
        let h = Horizon::conditional(1.0, 1.0);
        let nested = law(LawSelector::CondClosed { m: 0, n: 2 }, "bessel:d=2,iter=1");
        assert!(matches!(composed_density(&nested, &h, 0.3, MixtureMethod::Closed), Err(Error::Capability(_))));
        let single = law(LawSelector::CondClosed { m: 0, n: 2 }, "bessel:d=2");
        assert!(matches!(
            composed_density(&single, &h, 0.3, MixtureMethod::MonteCarlo { count: 10, seed: 1 }),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn laplace_oracle_point() {
        // W ~ Beta(1/2, 1): E[ (t/(2c√W)) exp(-t|x|/(c√W)) ] by independent quadrature
        let h = Horizon::conditional(1.0, 1.0);
        let l = law(LawSelector::CondClosed { m: 0, n: 1 }, "gamma:1");
        let got = composed_density(&l, &h, 0.5, MixtureMethod::Closed).unwrap().value;
        let want = integrate(
            |w: f64| 0.5 * w.powf(-0.5) / (2.0 * w.sqrt()) * (-0.5 / w.sqrt()).exp(),
            0.0,
            1.0,
            &QuadratureSpec::with_tol(1e-14, 1e-13),
        )
        .unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn cdf_limits() {
        let h = Horizon::conditional(1.0, 1.0);
        let l = law(LawSelector::CondClosed { m: 0, n: 2 }, "bessel:d=2");
        assert_eq!(composed_cdf(&l, &h, 0.0).unwrap(), 0.5);
        assert!(composed_cdf(&l, &h, 8.0).unwrap() > 1.0 - 1e-12);
        let a = composed_cdf(&l, &h, -0.4).unwrap();
        let b = composed_cdf(&l, &h, 0.4).unwrap();
        assert!((a + b - 1.0).abs() < 1e-14);
    }
}
