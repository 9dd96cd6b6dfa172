//! Kolmogorov-Smirnov tests and empirical moments.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_KS_SAMPLE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: f64,
}

impl KsReport {
    fn new(statistic: f64, n_effective: f64) -> Self {
        let p_value = kolmogorov_survival(n_effective.sqrt() * statistic);
        Self { statistic, p_value, n_effective }
    }
}

/// `P(K > z)` for the Kolmogorov limit distribution.
pub fn kolmogorov_survival(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    let q = if z >= 1.18 {
        let mut s = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * z * z).exp();
            s += if k % 2 == 1 { term } else { -term };
        }
        2.0 * s
    } else {
        // Jacobi-transformed series, fast for small z
        let mut s = 0.0;
        for k in 1..=100 {
            let odd = (2 * k - 1) as f64;
            s += (-odd * odd * PI * PI / (8.0 * z * z)).exp();
        }
        1.0 - (2.0 * PI).sqrt() / z * s
    };
    q.clamp(0.0, 1.0)
}

fn check_size(n: usize) -> Result<()> {
    if n < MIN_KS_SAMPLE {
        return Err(Error::usage(format!("KS needs at least {MIN_KS_SAMPLE} samples, got {n}")));
    }
    Ok(())
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::usage("sample contains NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Exact one-sample statistic `sup |F_n - F|`, attained at an order
/// statistic on one side or the other. The CDF is evaluated in parallel.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64 + Sync) -> Result<KsReport> {
    check_size(sample.len())?;
    let xs = sorted(sample)?;
    let values: Vec<f64> = xs.par_iter().map(|&x| cdf(x)).collect();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for (i, (&x, &f)) in xs.iter().zip(&values).enumerate() {
        if !(-1e-12..=1.0 + 1e-12).contains(&f) || f < prev - 1e-12 {
            return Err(Error::usage(format!("CDF is not a nondecreasing map into [0, 1] near x = {x} (value {f})")));
        }
        prev = prev.max(f);
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        d = d.max(below).max(above);
    }
    Ok(KsReport::new(d.clamp(0.0, 1.0), n))
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsReport> {
    check_size(a.len())?;
    check_size(b.len())?;
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] == x {
            i += 1;
        }
        while j < nb && xb[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    Ok(KsReport::new(d, n_eff))
}

/// Sample mean of `x^p` and its standard error.
pub fn empirical_moment(sample: &[f64], p: u32) -> Result<(f64, f64)> {
    if sample.len() < 2 {
        return Err(Error::usage("empirical moment needs at least two samples"));
    }
    let n = sample.len() as f64;
    let powers: Vec<f64> = sample.iter().map(|x| x.powi(p as i32)).collect();
    let mean = powers.iter().sum::<f64>() / n;
    let var = powers.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{standard_normal, uniform_open, RngStream};

    #[test]
    fn degenerate_sample() {
        let xs = vec![0.5; 20];
        let r = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identical_batches() {
        let mut rng = RngStream::new(41, 0).generator();
        let xs: Vec<f64> = (0..1000).map(|_| standard_normal(&mut rng)).collect();
        let r = ks_two_sample(&xs, &xs).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.n_effective, 500.0);
    }

    #[test]
    fn survival_function_values() {
        // scipy.special.kolmogorov
        let cases = [
            (0.5, 0.963_945_243_664_875_1),
            (1.0, 0.269_999_671_677_354_56),
            (1.18, 0.123_453_809_429_765_7),
            (1.5, 0.022_217_962_616_525_127),
            (2.0, 0.000_670_925_255_779_695_3),
        ];
        for (z, want) in cases {
            assert!((kolmogorov_survival(z) - want).abs() < 1e-12, "z={z}");
        }
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(0.05) <= 1.0);
    }

    #[test]
    fn uniform_null_calibration() {
        let mut passes = 0;
        for rep in 0..100 {
            let mut rng = RngStream::new(42, rep).generator();
            let xs: Vec<f64> = (0..10_000).map(|_| uniform_open(&mut rng)).collect();
            if ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.001 {
                passes += 1;
            }
        }
        assert!(passes >= 99, "{passes}");
    }

    #[test]
    fn normal_two_sample_calibration() {
        let mut passes = 0;
        for rep in 0..100 {
            let mut ra = RngStream::new(43, 2 * rep).generator();
            let mut rb = RngStream::new(43, 2 * rep + 1).generator();
            let a: Vec<f64> = (0..50_000).map(|_| standard_normal(&mut ra)).collect();
            let b: Vec<f64> = (0..50_000).map(|_| standard_normal(&mut rb)).collect();
            if ks_two_sample(&a, &b).unwrap().p_value > 0.001 {
                passes += 1;
            }
        }
        assert!(passes >= 99, "{passes}");
    }

    #[test]
    fn detects_shift() {
        let mut rng = RngStream::new(44, 0).generator();
        let xs: Vec<f64> = (0..10_000).map(|_| uniform_open(&mut rng) + 0.05).collect();
        assert!(ks_one_sample(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
    }

    #[test]
    fn non_monotone_cdf_rejected() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        assert!(matches!(ks_one_sample(&xs, |x| 1.0 - x), Err(Error::Usage(_))));
        assert!(matches!(ks_one_sample(&xs[..5], |x| x), Err(Error::Usage(_))));
    }

    #[test]
    fn moments() {
        let (m, se) = empirical_moment(&[2.5; 10], 1).unwrap();
        assert_eq!((m, se), (2.5, 0.0));
        let mut rng = RngStream::new(45, 0).generator();
        let xs: Vec<f64> = (0..100_000).map(|_| 2.0 * uniform_open(&mut rng) - 1.0).collect();
        let (m2, se2) = empirical_moment(&xs, 2).unwrap();
        assert!((m2 - 1.0 / 3.0).abs() < 3.0 * se2);
        let (_, se_quarter) = empirical_moment(&xs[..25_000], 2).unwrap();
        let ratio = se_quarter / se2;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }
}
