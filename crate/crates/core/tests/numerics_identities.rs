use std::f64::consts::PI;

use frizione::numerics::{
    bessel_i, bessel_j, bessel_k, gamma_ln, integrate, integrate_with_gaps, mittag_leffler, struve_l, QuadratureSpec,
};
use proptest::prelude::*;

fn tight() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-13, 1e-13)
}

fn gamma(x: f64) -> f64 {
    gamma_ln(x).unwrap().exp()
}

#[test]
fn j_series_matches_angular_integral() {
    for nu in [0.0, 0.5, 1.0, 2.0] {
        for x in [0.5, 1.0, 5.0, 10.0] {
            let integral =
                integrate(|phi: f64| (x * phi.cos()).cos() * phi.sin().powf(2.0 * nu), 0.0, PI, &tight()).unwrap();
            let via_integral = (x / 2.0).powf(nu) / (gamma(nu + 0.5) * PI.sqrt()) * integral;
            let series = bessel_j(nu, x).unwrap();
            assert!((series - via_integral).abs() < 1e-9, "nu={nu} x={x}: {series} vs {via_integral}");
        }
    }
}

#[test]
fn j_convolution_reduces_to_sine() {
    let v = integrate(|x| bessel_j(0.0, x).unwrap() * bessel_j(0.0, 2.0 - x).unwrap(), 0.0, 2.0, &tight()).unwrap();
    assert!((v - 2f64.sin()).abs() < 1e-12, "{v}");

    // midpoint Riemann sum as a crude independent check
    let m = 20_000;
    let h = 2.0 / m as f64;
    let riemann: f64 = (0..m)
        .map(|i| {
            let x = (i as f64 + 0.5) * h;
            bessel_j(0.0, x).unwrap() * bessel_j(0.0, 2.0 - x).unwrap() * h
        })
        .sum();
    assert!((riemann - 2f64.sin()).abs() < 1e-7);
}

#[test]
fn j_convolution_with_power_weights() {
    for (mu, nu) in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        for a in [1.0, 2.0, 5.0] {
            let lhs = integrate_with_gaps(
                |x, left, right| {
                    left.powf(mu) * right.powf(nu) * bessel_j(mu, x).unwrap() * bessel_j(nu, right).unwrap()
                },
                0.0,
                a,
                &tight(),
            )
            .unwrap();
            let order = mu + nu + 0.5;
            let rhs = gamma(mu + 0.5) * gamma(nu + 0.5) / ((2.0 * PI).sqrt() * gamma(mu + nu + 1.0))
                * a.powf(order)
                * bessel_j(order, a).unwrap();
            assert!((lhs - rhs).abs() < 1e-8, "({mu},{nu}) a={a}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn j_over_argument_convolution() {
    for a in [1.0, 2.0, 5.0] {
        let lhs = integrate_with_gaps(
            |x, _, right| bessel_j(1.0, x).unwrap() / x * bessel_j(1.0, right).unwrap() / right,
            0.0,
            a,
            &tight(),
        )
        .unwrap();
        let rhs = 2.0 * bessel_j(2.0, a).unwrap() / a;
        assert!((lhs - rhs).abs() < 1e-8, "a={a}: {lhs} vs {rhs}");
    }
}

#[test]
fn i_semigroup_identity() {
    for a in [0.5, 1.0, 2.0] {
        let lhs = integrate_with_gaps(
            |x, _, right| bessel_i(0.0, x).unwrap() * bessel_i(0.0, right).unwrap(),
            0.0,
            a,
            &tight(),
        )
        .unwrap();
        let rhs = PI / (2.0 * PI).sqrt() * a.sqrt() * bessel_i(0.5, a).unwrap();
        assert!((lhs - rhs).abs() < 1e-8, "a={a}: {lhs} vs {rhs}");
    }
}

#[test]
fn k_matches_direct_z_integral() {
    // ½ (x/2)^μ ∫ exp(-z - x²/(4z)) z^(-μ-1) dz, integrated directly in z
    for (mu, x) in [(0.0, 1.0), (0.5, 2.0), (1.7, 3.0), (3.0, 0.8)] {
        let direct = 0.5
            * (x / 2.0f64).powf(mu)
            * integrate(|z: f64| (-z - x * x / (4.0 * z)).exp() * z.powf(-mu - 1.0), 0.0, f64::INFINITY, &tight())
                .unwrap();
        let k = bessel_k(mu, x).unwrap();
        assert!(((k - direct) / direct).abs() < 1e-9, "mu={mu} x={x}: {k} vs {direct}");
    }
}

#[test]
fn beta_integral_and_gamma_integral() {
    let b = integrate_with_gaps(|_, l, r| l.powf(-0.5) * r.powf(-0.5), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
    assert!((b - PI).abs() < 1e-9);
    let g = integrate(|z: f64| (-z).exp() * z.sqrt(), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
    assert!((g - PI.sqrt() / 2.0).abs() < 1e-9);
}

#[test]
fn monotone_on_grid() {
    let mut prev = [0.0f64; 3];
    for i in 1..=3000 {
        let x = i as f64 * 0.01;
        let cur = [bessel_i(0.0, x).unwrap(), bessel_i(1.0, x).unwrap(), struve_l(0.0, x).unwrap()];
        assert!(cur[2] >= 0.0);
        if i > 1 {
            for k in 0..3 {
                assert!(cur[k] > prev[k], "series {k} not increasing at x={x}");
            }
        }
        prev = cur;
    }
}

proptest! {
    #[test]
    fn k_even_in_order(mu in -100.0f64..100.0, x in 0.01f64..200.0) {
        prop_assert_eq!(bessel_k(mu, x).unwrap(), bessel_k(-mu, x).unwrap());
    }

    #[test]
    fn k_recurrence(mu in 0.0f64..20.0, x in 0.1f64..50.0) {
        // K_{μ+1} = K_{μ-1} + (2μ/x) K_μ
        let lhs = bessel_k(mu + 1.0, x).unwrap();
        let rhs = bessel_k(mu - 1.0, x).unwrap() + 2.0 * mu / x * bessel_k(mu, x).unwrap();
        prop_assert!(((lhs - rhs) / lhs).abs() < 5e-9);
    }

    #[test]
    fn j_recurrence(nu in 1.0f64..40.0, x in 0.1f64..60.0) {
        // J_{ν-1} + J_{ν+1} = (2ν/x) J_ν
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + 2.0 * nu / x));
    }

    #[test]
    fn j_bounded(nu in 0.0f64..200.0, x in 0.0f64..60.0) {
        prop_assert!(bessel_j(nu, x).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn i_recurrence(nu in 1.0f64..30.0, x in 0.1f64..30.0) {
        let lhs = bessel_i(nu - 1.0, x).unwrap() - bessel_i(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_i(nu, x).unwrap();
        prop_assert!(((lhs - rhs) / lhs.abs().max(1e-300)).abs() < 1e-12);
    }

    #[test]
    fn gamma_ln_shift(x in 0.01f64..160.0) {
        let lhs = gamma_ln(x + 1.0).unwrap();
        let rhs = gamma_ln(x).unwrap() + x.ln();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn exponential_mittag_leffler(x in -30.0f64..50.0) {
        // alternating tails may be refused, never returned inaccurately
        match mittag_leffler(1.0, 1.0, x) {
            Ok(e) => prop_assert!(((e - x.exp()) / x.exp()).abs() < 1e-11),
            Err(err) => prop_assert!(x < -4.0, "refused x={x}: {err}"),
        }
    }

    #[test]
    fn quadrature_is_linear(a in 0.1f64..5.0, b in -3.0f64..3.0) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (a * x).sin();
        let g = |x: f64| x * x;
        let lhs = integrate(|x| f(x) + b * g(x), 0.0, 2.0, &spec).unwrap();
        let rhs = integrate(f, 0.0, 2.0, &spec).unwrap() + b * integrate(g, 0.0, 2.0, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }
}
