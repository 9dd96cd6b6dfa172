//! The acceptance suite as library calls. Every criterion draws from seeds
//! derived from one base seed and records each comparison it makes, so a
//! report is a pure function of that seed.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    cdf, composed_cdf, composed_density, density, drift_cf_mc, flight_density, moment, sphere_measure, transform,
    uncond_second_moment, ComposedLaw, Horizon, LawSelector, MixtureMethod, TransformKind, TransformMethod,
};
use crate::error::{Error, Result};
use crate::motion::{position, sample_composed, sample_flights, sample_positions, Conditioning, MotionParams};
use crate::numerics::{bessel_i, bessel_j, gamma, integrate, integrate_with_gaps, mittag_leffler, QuadratureSpec};
use crate::sampling::{
    derive_seed, draw_beta, draw_gamma, draw_poisson, draw_schedule, par_draw, standard_normal, TimeChange,
};
use crate::stats::{empirical_moment, ks_one_sample, ks_two_sample, KsReport};

/// KS comparisons pass when the p-value exceeds this.
pub const KS_LEVEL: f64 = 0.01;
/// Monte Carlo comparisons pass within this many standard errors.
pub const SIGMAS: f64 = 3.0;

/// Identifiers and names of the criteria this module runs.
pub const CRITERIA: [(u8, &str); 8] = [
    (1, "conditional-law KS"),
    (2, "moment laws"),
    (3, "transform consistency"),
    (4, "special-function identities"),
    (5, "subordination identities"),
    (6, "projection identities"),
    (7, "normalization sweep"),
    (8, "drifted planar CF"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    /// Goodness of fit; passes when `p_value > threshold`.
    Ks { label: String, statistic: f64, p_value: f64, n_effective: f64, threshold: f64, passed: bool },
    /// Monte Carlo estimate against a target; passes within `allowed`.
    Estimate { label: String, estimate: f64, std_err: f64, target: f64, allowed: f64, passed: bool },
    /// Deterministic value against a reference; passes within `tol`.
    Close { label: String, got: f64, want: f64, tol: f64, passed: bool },
}

impl Check {
    pub fn passed(&self) -> bool {
        match self {
            Check::Ks { passed, .. } | Check::Estimate { passed, .. } | Check::Close { passed, .. } => *passed,
        }
    }

    fn ks(label: impl Into<String>, r: KsReport) -> Self {
        Check::Ks {
            label: label.into(),
            statistic: r.statistic,
            p_value: r.p_value,
            n_effective: r.n_effective,
            threshold: KS_LEVEL,
            passed: r.p_value > KS_LEVEL,
        }
    }

    fn estimate(label: impl Into<String>, estimate: f64, std_err: f64, target: f64, allowed: f64) -> Self {
        Check::Estimate {
            label: label.into(),
            estimate,
            std_err,
            target,
            allowed,
            passed: (estimate - target).abs() <= allowed,
        }
    }

    fn close(label: impl Into<String>, got: f64, want: f64, tol: f64) -> Self {
        Check::Close { label: label.into(), got, want, tol, passed: (got - want).abs() <= tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Set when the criterion stopped on an error; it then fails.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Runs one criterion. Errors inside the criterion fail it; only an
/// unknown id is an error here.
pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionReport> {
    let name = CRITERIA
        .iter()
        .find(|(k, _)| *k == id)
        .map(|(_, n)| n.to_string())
        .ok_or_else(|| Error::usage(format!("no criterion {id}; known ids are 1 to {}", CRITERIA.len())))?;
    let mut checks = Vec::new();
    let outcome = match id {
        1 => conditional_ks(seed, &mut checks),
        2 => moment_laws(seed, &mut checks),
        3 => transform_consistency(seed, &mut checks),
        4 => special_identities(&mut checks),
        5 => subordination(seed, &mut checks),
        6 => projections(seed, &mut checks),
        7 => normalization(&mut checks),
        _ => drift_cf(seed, &mut checks),
    };
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && checks.iter().all(Check::passed);
    Ok(CriterionReport { id, name, passed, checks, error })
}

/// Runs the listed criteria in order; an empty list means all of them.
pub fn run_suite(ids: &[u8], seed: u64) -> Result<ValidationReport> {
    let all: Vec<u8> = CRITERIA.iter().map(|(k, _)| *k).collect();
    let ids = if ids.is_empty() { &all[..] } else { ids };
    let criteria = ids.iter().map(|&id| run_criterion(id, seed)).collect::<Result<Vec<_>>>()?;
    let passed = criteria.iter().all(|c| c.passed);
    Ok(ValidationReport { seed, passed, criteria })
}

fn unit() -> Horizon {
    Horizon::conditional(1.0, 1.0)
}

fn params(nu: f64) -> Result<MotionParams> {
    MotionParams::new(nu, 1.0, 1.0)
}

/// The closed family with `nu = m`, or the general law otherwise.
fn conditional_law(nu: f64, n: usize) -> LawSelector {
    match (nu, n) {
        (_, 0) => LawSelector::CondGeneral { nu, n },
        (m, _) if m == 0.0 || m == 1.0 => LawSelector::CondClosed { m: m as u8, n },
        _ => LawSelector::CondGeneral { nu, n },
    }
}

/// One-sample KS of `sample` against the quadrature CDF of `law`.
fn ks_against(label: String, sample: &[f64], law: &LawSelector, h: &Horizon) -> Result<Check> {
    let failure = std::sync::Mutex::new(None);
    let report = ks_one_sample(sample, |x| match cdf(law, h, x) {
        Ok(f) => f,
        Err(e) => {
            failure.lock().expect("poisoned").get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = failure.into_inner().expect("poisoned") {
        return Err(e);
    }
    Ok(Check::ks(label, report?))
}

fn conditional_ks(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    for (nu, n) in [(0.0, 1), (0.0, 2), (0.0, 5), (1.0, 1), (1.0, 3)] {
        let label = format!("nu={nu} n={n}");
        let batch = sample_positions(
            &params(nu)?,
            Conditioning::FixedEvents { n },
            1.0,
            100_000,
            derive_seed(seed, &format!("c1 {label}")),
        )?;
        checks.push(ks_against(label, &batch.values, &conditional_law(nu, n), &unit())?);
    }
    Ok(())
}

fn moment_laws(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    for nu in [0.0, 1.0, 2.0] {
        for n in [0, 1, 5] {
            let label = format!("E X^2 nu={nu} n={n}");
            let batch = sample_positions(
                &params(nu)?,
                Conditioning::FixedEvents { n },
                1.0,
                100_000,
                derive_seed(seed, &label),
            )?;
            let (m, se) = empirical_moment(&batch.values, 2)?;
            let target = moment(&LawSelector::CondGeneral { nu, n }, &unit(), 2)?;
            checks.push(Check::estimate(label, m, se, target, SIGMAS * se));
        }
    }
    let label = "E X^2 nu=0 poisson lambda=1";
    let batch =
        sample_positions(&params(0.0)?, Conditioning::PoissonAtHorizon, 1.0, 100_000, derive_seed(seed, label))?;
    let (m, se) = empirical_moment(&batch.values, 2)?;
    let target = uncond_second_moment(0.0, &Horizon::unconditional(1.0, 1.0, 1.0))?;
    checks.push(Check::estimate(label, m, se, target, SIGMAS * se));

    let label = "E X^4 nu=0 n=0";
    let batch =
        sample_positions(&params(0.0)?, Conditioning::FixedEvents { n: 0 }, 1.0, 100_000, derive_seed(seed, label))?;
    let (m, se) = empirical_moment(&batch.values, 4)?;
    let target = moment(&LawSelector::CondGeneral { nu: 0.0, n: 0 }, &unit(), 4)?;
    checks.push(Check::estimate(label, m, se, target, SIGMAS * se));
    Ok(())
}

/// Sample mean of `cos(αx)` and its standard error.
fn empirical_cf(sample: &[f64], alpha: f64) -> (f64, f64) {
    let n = sample.len() as f64;
    let cos: Vec<f64> = sample.iter().map(|x| (alpha * x).cos()).collect();
    let mean = cos.iter().sum::<f64>() / n;
    let var = cos.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn transform_consistency(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    const ALPHAS: [f64; 3] = [0.5, 1.0, 2.0];
    for (m, n) in [(0u8, 2usize), (1, 3)] {
        let label = format!("closed CF m={m} n={n}");
        let batch = sample_positions(
            &params(f64::from(m))?,
            Conditioning::FixedEvents { n },
            1.0,
            1_000_000,
            derive_seed(seed, &label),
        )?;
        for alpha in ALPHAS {
            let closed = transform(
                &LawSelector::CondClosed { m, n },
                &unit(),
                TransformKind::Cf,
                alpha,
                TransformMethod::Closed,
            )?;
            let (cf, se) = empirical_cf(&batch.values, alpha);
            checks.push(Check::estimate(format!("{label} alpha={alpha}"), cf, se, closed.value, SIGMAS * se));
        }
    }
    let label = "monte carlo CF nu=0.7 n=2";
    let law = LawSelector::CondGeneral { nu: 0.7, n: 2 };
    let batch =
        sample_positions(&params(0.7)?, Conditioning::FixedEvents { n: 2 }, 1.0, 1_000_000, derive_seed(seed, label))?;
    for alpha in ALPHAS {
        let method =
            TransformMethod::MonteCarlo { count: 200_000, seed: derive_seed(seed, &format!("{label} alpha={alpha}")) };
        let mc = transform(&law, &unit(), TransformKind::Cf, alpha, method)?;
        let (cf, se) = empirical_cf(&batch.values, alpha);
        let combined = se.hypot(mc.std_err);
        checks.push(Check::estimate(format!("{label} alpha={alpha}"), cf, se, mc.value, SIGMAS * combined));
    }
    Ok(())
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-13, 1e-13)
}

/// `∫_0^a f(x, a - x) dx` with the complementary argument exact.
fn convolution(a: f64, f: impl Fn(f64, f64) -> Result<f64>) -> Result<f64> {
    let mut failure = None;
    let v = integrate_with_gaps(
        |_, left, right| match f(left, right) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        a,
        &tight(),
    )?;
    failure.map_or(Ok(v), Err)
}

fn special_identities(checks: &mut Vec<Check>) -> Result<()> {
    const TOL: f64 = 1e-8;
    for (mu, nu) in [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        for a in [1.0, 2.0, 5.0] {
            let lhs = convolution(a, |x, y| Ok(x.powf(mu) * y.powf(nu) * bessel_j(mu, x)? * bessel_j(nu, y)?))?;
            let order = mu + nu + 0.5;
            let rhs = gamma(mu + 0.5)? * gamma(nu + 0.5)? / ((2.0 * PI).sqrt() * gamma(mu + nu + 1.0)?)
                * a.powf(order)
                * bessel_j(order, a)?;
            checks.push(Check::close(format!("J power-weight convolution mu={mu} nu={nu} a={a}"), lhs, rhs, TOL));
        }
    }
    for a in [1.0, 2.0, 5.0] {
        let lhs = convolution(a, |x, y| Ok(bessel_j(1.0, x)? / x * bessel_j(1.0, y)? / y))?;
        let rhs = 2.0 * bessel_j(2.0, a)? / a;
        checks.push(Check::close(format!("J over-argument convolution mu=1 nu=1 a={a}"), lhs, rhs, TOL));
    }
    for a in [0.5, 1.0, 2.0] {
        let lhs = convolution(a, |x, y| Ok(bessel_i(0.0, x)? * bessel_i(0.0, y)?))?;
        let rhs = PI / (2.0 * PI).sqrt() * a.sqrt() * bessel_i(0.5, a)?;
        checks.push(Check::close(format!("I semigroup mu=0 nu=0 a={a}"), lhs, rhs, TOL));
    }
    let lhs = convolution(2.0, |x, y| Ok(bessel_j(0.0, x)? * bessel_j(0.0, y)?))?;
    checks.push(Check::close("J0 self-convolution at a=2", lhs, 2f64.sin(), TOL));
    for x in [-2.0, 0.5, 1.0, 2.0, 5.0] {
        let e12 = mittag_leffler(1.0, 2.0, x)?;
        let want = x.exp_m1() / x;
        checks.push(Check::close(format!("E(1,2) at {x}"), e12, want, 1e-11 * want.abs()));
        let e13 = mittag_leffler(1.0, 3.0, x)?;
        let want = (x.exp_m1() - x) / (x * x);
        checks.push(Check::close(format!("E(1,3) at {x}"), e13, want, 1e-11 * want.abs()));
    }
    Ok(())
}

/// Distribution function tabulated with its derivative on a uniform grid
/// and inverted through the cubic Hermite model between nodes.
struct TabulatedLaw {
    xs: Vec<f64>,
    fs: Vec<f64>,
    ds: Vec<f64>,
}

impl TabulatedLaw {
    fn new(
        lo: f64,
        hi: f64,
        points: usize,
        cdf: impl Fn(f64) -> Result<f64> + Sync,
        density: impl Fn(f64) -> Result<f64> + Sync,
    ) -> Result<Self> {
        let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
        let fs = xs.par_iter().map(|&x| cdf(x)).collect::<Result<Vec<_>>>()?;
        let ds = xs.par_iter().map(|&x| density(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self { xs, fs, ds })
    }

    fn hermite(&self, i: usize, s: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.fs[i]
            + (s3 - 2.0 * s2 + s) * h * self.ds[i]
            + (-2.0 * s3 + 3.0 * s2) * self.fs[i + 1]
            + (s3 - s2) * h * self.ds[i + 1]
    }

    fn quantile(&self, u: f64) -> f64 {
        let last = self.xs.len() - 1;
        if u <= self.fs[0] {
            return self.xs[0];
        }
        if u >= self.fs[last] {
            return self.xs[last];
        }
        let i = self.fs.partition_point(|&f| f <= u).clamp(1, last) - 1;
        let (mut a, mut b) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if self.hermite(i, mid) < u {
                a = mid;
            } else {
                b = mid;
            }
        }
        self.xs[i] + 0.5 * (a + b) * (self.xs[i + 1] - self.xs[i])
    }
}

fn subordination(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    const DRAWS: usize = 50_000;
    let (c, t) = (1.0, 1.0);
    let p = params(0.0)?;

    // (a) X0(|B(t)|) against B(X0(t)^2 / t)
    let label = "reflected Brownian clock";
    let clock = TimeChange::Bessel { dim: 1, iterations: 0 };
    let composed = sample_composed(&p, &clock, Conditioning::PoissonAtHorizon, t, DRAWS, derive_seed(seed, label))?;
    let oracle = par_draw(derive_seed(seed, &format!("{label} oracle")), DRAWS, |rng, _| {
        let n = draw_poisson(p.lambda * t, rng)? as usize;
        let x0 = position(&p, &draw_schedule(n, t, rng)?, rng)?;
        Ok(x0.abs() / t.sqrt() * standard_normal(rng))
    })?;
    checks.push(Check::ks(label, ks_two_sample(&composed.values, &oracle)?));

    // (b) X0(R^2(t)) against inverse-CDF draws from the closed mixture
    let label = "planar Bessel clock n=2";
    let clock = TimeChange::Bessel { dim: 2, iterations: 0 };
    let composed = sample_composed(&p, &clock, Conditioning::FixedEvents { n: 2 }, t, DRAWS, derive_seed(seed, label))?;
    let law = ComposedLaw { base: LawSelector::CondClosed { m: 0, n: 2 }, change: clock };
    let h = Horizon::conditional(c, t);
    // W <= 1 bounds the mixing variance by c²t; 12 standard deviations leave no mass
    let reach = 12.0 * c * t.sqrt();
    let table = TabulatedLaw::new(
        -reach,
        reach,
        4001,
        |x| composed_cdf(&law, &h, x),
        |x| Ok(composed_density(&law, &h, x, MixtureMethod::Closed)?.value),
    )?;
    let oracle = par_draw(derive_seed(seed, &format!("{label} oracle")), DRAWS, |rng, _| {
        Ok(table.quantile(rng.random::<f64>()))
    })?;
    checks.push(Check::ks(label, ks_two_sample(&composed.values, &oracle)?));

    // (c) X0(G_1(t)) against Laplace draws of scale c√W/t, W ~ Beta(1/2, v + 1/2)
    let label = "exponential clock n=2";
    let n = 2;
    let v = n as f64 / 2.0;
    let clock = TimeChange::GammaChain { shapes: vec![1.0] };
    let composed = sample_composed(&p, &clock, Conditioning::FixedEvents { n }, t, DRAWS, derive_seed(seed, label))?;
    let oracle = par_draw(derive_seed(seed, &format!("{label} oracle")), DRAWS, |rng, _| {
        let w = draw_beta(0.5, v + 0.5, rng)?;
        let scale = c * w.sqrt() / t;
        let magnitude = scale * draw_gamma(1.0, 1.0, rng)?;
        Ok(if rng.random::<bool>() { magnitude } else { -magnitude })
    })?;
    checks.push(Check::ks(label, ks_two_sample(&composed.values, &oracle)?));
    Ok(())
}

fn projections(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    for (dim, n, m) in [(2usize, 3usize, 0u8), (4, 2, 1)] {
        let label = format!("{dim}-d flight n={n} first coordinate vs m={m}");
        let batch =
            sample_flights(dim, 1.0, 1.0, Conditioning::FixedEvents { n }, 1.0, 100_000, derive_seed(seed, &label))?;
        checks.push(ks_against(label, &batch.coordinate(0), &LawSelector::CondClosed { m, n }, &unit())?);
    }
    Ok(())
}

/// `2 ∫_0^reach f`, skipping the origin where some densities diverge.
fn even_mass(reach: f64, spec: &QuadratureSpec, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut failure = None;
    let half = integrate(
        |x| {
            if x == 0.0 {
                return 0.0;
            }
            f(x).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                f64::NAN
            })
        },
        0.0,
        reach,
        spec,
    )?;
    failure.map_or(Ok(2.0 * half), Err)
}

fn normalization(checks: &mut Vec<Check>) -> Result<()> {
    const DIRECT: f64 = 1e-6;
    const COMPOSED: f64 = 1e-4;
    let spec = QuadratureSpec::default();
    let h = unit();
    let mut conditional = vec![
        LawSelector::CondGeneral { nu: 0.0, n: 0 },
        LawSelector::CondGeneral { nu: 0.3, n: 0 },
        LawSelector::CondGeneral { nu: 2.5, n: 0 },
    ];
    for m in 0..=1 {
        for n in [1, 2, 5] {
            conditional.push(LawSelector::CondClosed { m, n });
        }
    }
    for law in &conditional {
        let mass = even_mass(h.reach(), &spec, |x| density(law, &h, x))?;
        checks.push(Check::close(format!("{law:?}"), mass, 1.0, DIRECT));
    }
    for lambda in [0.5, 2.0] {
        let hu = Horizon::unconditional(1.0, 1.0, lambda);
        for m in 0..=1 {
            let law = LawSelector::Uncond { m };
            let mass = even_mass(hu.reach(), &spec, |x| density(&law, &hu, x))?;
            checks.push(Check::close(format!("{law:?} lambda={lambda}"), mass, 1.0, DIRECT));
        }
    }
    for (dim, n) in [(2, 1), (2, 2), (2, 3), (4, 1), (4, 2)] {
        let mass = integrate(
            |r| sphere_measure(dim, r) * flight_density(dim, n, 1.0, 1.0, r).unwrap_or(f64::NAN),
            0.0,
            1.0,
            &spec,
        )?;
        checks.push(Check::close(format!("flight dim={dim} n={n}"), mass, 1.0, DIRECT));
    }

    let sweep = QuadratureSpec::with_tol(1e-8, 1e-8);
    let hu = Horizon::unconditional(1.0, 1.0, 1.0);
    let clocks =
        ["bessel:d=1", "bessel:d=2", "gamma:0.5", "gamma:1", "gamma:2", "sojourn", "bessel-of-gamma:d=1,alpha=0.5"];
    let mut composed = Vec::new();
    for (base, horizon) in [
        (LawSelector::CondClosed { m: 0, n: 2 }, &h),
        (LawSelector::CondClosed { m: 1, n: 1 }, &h),
        (LawSelector::Uncond { m: 1 }, &hu),
    ] {
        for clock in clocks {
            composed.push((base, clock, horizon));
        }
    }
    // the shape-0 term of m = 0 admits only clocks with alpha/2 - 1 < 0
    for clock in ["bessel:d=1", "gamma:1", "sojourn"] {
        composed.push((LawSelector::Uncond { m: 0 }, clock, &hu));
    }
    composed.push((LawSelector::CondClosed { m: 0, n: 2 }, "gauss:fbm,h=0.7", &h));
    for (base, clock, horizon) in composed {
        let law = ComposedLaw { base, change: clock.parse()? };
        let reach = if clock == "sojourn" { horizon.reach() } else { f64::INFINITY };
        let mass = even_mass(reach, &sweep, |x| Ok(composed_density(&law, horizon, x, MixtureMethod::Closed)?.value))?;
        checks.push(Check::close(format!("{base:?} at {clock}"), mass, 1.0, COMPOSED));
    }
    Ok(())
}

fn drift_cf(seed: u64, checks: &mut Vec<Check>) -> Result<()> {
    for (a1, a2) in [(1.0f64, 0.0f64), (0.0, 1.0), (1.0, 1.0)] {
        let label = format!("drift CF n=0 a=({a1},{a2})");
        let oracle = integrate(
            |th: f64| (a1 * th.cos() + a2 * th.sin()).cos() * th.sin().powi(2) / PI,
            0.0,
            2.0 * PI,
            &tight(),
        )?;
        let est = drift_cf_mc(0, 1.0, 1.0, a1, a2, 100_000, derive_seed(seed, &label))?;
        // without changes every draw is the same segment, so the spread is rounding
        let allowed = (SIGMAS * est.std_err).max(1e-9);
        checks.push(Check::estimate(label, est.value, est.std_err, oracle, allowed));
    }
    Ok(())
}
