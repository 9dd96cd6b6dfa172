use std::f64::consts::PI;

use super::transform::Estimate;
use crate::error::{Error, Result};
use crate::numerics::bessel_j_scaled;
use crate::sampling::{draw_schedule, par_draw};

/// Density of the flight endpoint at distance `r` from the origin after `n`
/// changes, in dimension 2 or 4; zero outside the ball of radius `ct`.
pub fn flight_density(dim: usize, n: usize, c: f64, t: f64, r: f64) -> Result<f64> {
    if dim != 2 && dim != 4 {
        return Err(Error::domain(format!("flight densities exist here for dim 2 and 4, got {dim}")));
    }
    if n == 0 {
        return Err(Error::domain("flight densities need n >= 1 (n = 0 is a sphere)"));
    }
    if !(c > 0.0) || !(t > 0.0) || !(r >= 0.0) {
        return Err(Error::domain(format!("need c > 0, t > 0, r >= 0 (got {c}, {t}, {r})")));
    }
    let reach = c * t;
    if r >= reach {
        return Ok(0.0);
    }
    let nf = n as f64;
    let log_radicand = (reach - r).ln() + (reach + r).ln();
    let log = if dim == 2 {
        nf.ln() - (2.0 * PI).ln() - nf * reach.ln() + (nf / 2.0 - 1.0) * log_radicand
    } else {
        (nf * (nf + 1.0)).ln() - 2.0 * PI.ln() - (2.0 * nf + 2.0) * reach.ln() + (nf - 1.0) * log_radicand
    };
    Ok(log.exp())
}

/// Surface measure of the sphere of radius `r` in dimension 2 or 4.
pub fn sphere_measure(dim: usize, r: f64) -> f64 {
    if dim == 2 {
        2.0 * PI * r
    } else {
        2.0 * PI * PI * r.powi(3)
    }
}

/// Characteristic function of one planar segment of length `seg` when the
/// direction has density `sin²θ / π`:
/// `2 J₁(zρ)/(zρ) - 2 (a₂/ρ)² J₂(zρ)` with `z = c seg`, `ρ = |a|`.
pub fn drift_segment_cf(c: f64, seg: f64, a1: f64, a2: f64) -> Result<f64> {
    let rho = a1.hypot(a2);
    let z = c * seg;
    let y = z * rho;
    // 2 J₂(y) (a₂/ρ)² = a₂² z² Λ₂(y) / 4 with Λ₂ the scaled kernel
    Ok(bessel_j_scaled(1.0, y)? - a2 * a2 * z * z * bessel_j_scaled(2.0, y)? / 4.0)
}

/// Monte Carlo characteristic function at `(a1, a2)` of the planar motion
/// whose directions have density `sin²θ / π`, after `n` changes.
pub fn drift_cf_mc(n: usize, c: f64, t: f64, a1: f64, a2: f64, count: usize, seed: u64) -> Result<Estimate> {
    if !(c > 0.0) || !(t > 0.0) {
        return Err(Error::domain(format!("need c > 0 and t > 0, got {c}, {t}")));
    }
    if a1 == 0.0 && a2 == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    if count < 2 {
        return Err(Error::usage("Monte Carlo needs at least two schedules"));
    }
    let draws = par_draw(seed, count, |rng, _| {
        let schedule = draw_schedule(n, t, rng)?;
        let cf: Result<f64> = schedule.segments().try_fold(1.0, |acc, seg| Ok(acc * drift_segment_cf(c, seg, a1, a2)?));
        cf
    })?;
    Ok(Estimate::from_draws(&draws))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_with_gaps, QuadratureSpec};

    #[test]
    fn centre_values() {
        assert!((flight_density(2, 2, 1.0, 1.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((flight_density(4, 1, 1.0, 1.0, 0.0).unwrap() - 2.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(flight_density(2, 3, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(flight_density(3, 1, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn normalized_against_surface_measure() {
        for dim in [2, 4] {
            for n in [1, 2, 3, 7] {
                let mass = integrate_with_gaps(
                    |r, _, _| flight_density(dim, n, 1.3, 0.8, r).unwrap() * sphere_measure(dim, r),
                    0.0,
                    1.04,
                    &QuadratureSpec::default(),
                )
                .unwrap();
                assert!((mass - 1.0).abs() < 1e-6, "dim={dim} n={n}: {mass}");
            }
        }
    }

    #[test]
    fn drift_symmetries() {
        assert_eq!(drift_cf_mc(3, 1.0, 1.0, 0.0, 0.0, 10, 1).unwrap(), Estimate::exact(1.0));
        let a = drift_cf_mc(2, 1.0, 1.0, 0.8, 1.1, 200, 4).unwrap();
        let b = drift_cf_mc(2, 1.0, 1.0, -0.8, -1.1, 200, 4).unwrap();
        assert_eq!(a, b);
        assert!((drift_segment_cf(1.0, 0.0, 2.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
    }
}
