use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, Poisson, StandardNormal};

use crate::error::{Error, Result};

pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Gamma variate with the given shape and rate (density ∝ s^(shape-1) e^(-rate s)).
pub fn draw_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !(rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
        return Err(Error::domain(format!("gamma needs shape > 0 and rate > 0, got ({shape}, {rate})")));
    }
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::domain(format!("gamma({shape}, {rate}): {e}")))?;
    Ok(g.sample(rng))
}

/// `(G_a - G_b) / (G_a + G_b)` for independent unit-rate Gammas, which is
/// `2V - 1` for `V ~ Beta(a, b)` without the cancellation of forming `V`.
fn centered_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    loop {
        let ga = draw_gamma(a, 1.0, rng)?;
        let gb = draw_gamma(b, 1.0, rng)?;
        let s = ga + gb;
        if s > 0.0 {
            return Ok((ga - gb) / s);
        }
    }
}

pub fn draw_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    loop {
        let ga = draw_gamma(a, 1.0, rng)?;
        let gb = draw_gamma(b, 1.0, rng)?;
        let s = ga + gb;
        if s > 0.0 {
            return Ok(ga / s);
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::domain(format!("friction level must be finite and >= 0, got {nu}")));
    }
    Ok(())
}

/// Angle with density ∝ sin^(2ν) θ on (0, π).
pub fn draw_angle<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> Result<f64> {
    Ok(draw_direction_cosine(nu, rng)?.acos())
}

/// `cos θ` for θ from [`draw_angle`]; density ∝ (1 - u²)^(ν - 1/2) on (-1, 1).
pub fn draw_direction_cosine<R: Rng + ?Sized>(nu: f64, rng: &mut R) -> Result<f64> {
    check_nu(nu)?;
    centered_beta(nu + 0.5, nu + 0.5, rng)
}

pub fn draw_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::domain(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let p = Poisson::new(mean).map_err(|e| Error::domain(format!("poisson({mean}): {e}")))?;
    Ok(p.sample(rng) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::RngStream;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn uniform_angle_mean() {
        let mut rng = RngStream::new(101, 0).generator();
        let xs: Vec<f64> = (0..100_000).map(|_| draw_angle(0.0, &mut rng).unwrap()).collect();
        assert!(xs.iter().all(|&x| x > 0.0 && x < std::f64::consts::PI));
        let (m, se) = mean_and_se(&xs);
        assert!((m - std::f64::consts::FRAC_PI_2).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn cosine_moments() {
        for nu in [0.0f64, 0.5, 1.0, 3.0] {
            let mut rng = RngStream::new(102, nu.to_bits()).generator();
            let xs: Vec<f64> = (0..100_000).map(|_| draw_direction_cosine(nu, &mut rng).unwrap()).collect();
            let (m, se) = mean_and_se(&xs);
            assert!(m.abs() < 3.0 * se, "nu={nu}: mean {m} ± {se}");
            let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
            let (m2, se2) = mean_and_se(&sq);
            let want = 1.0 / (2.0 * (nu + 1.0));
            assert!((m2 - want).abs() < 3.0 * se2, "nu={nu}: E cos² {m2} ± {se2} vs {want}");
        }
    }

    #[test]
    fn poisson_mean_and_variance() {
        let mut rng = RngStream::new(103, 0).generator();
        assert_eq!(draw_poisson(0.0, &mut rng).unwrap(), 0);
        let xs: Vec<f64> = (0..100_000).map(|_| draw_poisson(2.0, &mut rng).unwrap() as f64).collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 2.0).abs() < 3.0 * se);
        let n = xs.len() as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        // SE of the sample variance: sqrt((μ4 - σ⁴)/n), μ4 = λ + 3λ² for Poisson
        let se_var = ((2.0 + 3.0 * 4.0 - 4.0) / n).sqrt();
        assert!((var - 2.0).abs() < 4.0 * se_var, "{var} ± {se_var}");
    }

    #[test]
    fn domain_errors() {
        let mut rng = RngStream::new(1, 0).generator();
        assert!(draw_angle(-0.1, &mut rng).is_err());
        assert!(draw_poisson(-1.0, &mut rng).is_err());
        assert!(draw_gamma(0.0, 1.0, &mut rng).is_err());
        assert!(draw_gamma(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn beta_mean() {
        let mut rng = RngStream::new(104, 0).generator();
        let xs: Vec<f64> = (0..100_000).map(|_| draw_beta(0.5, 1.5, &mut rng).unwrap()).collect();
        let (m, se) = mean_and_se(&xs);
        assert!((m - 0.25).abs() < 3.0 * se);
    }
}
