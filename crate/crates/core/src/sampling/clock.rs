use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distributions::{draw_gamma, standard_normal, uniform_open};
use crate::error::{Error, Result};

/// Variance profile `σ²(t)` of a centred Gaussian clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VarianceFn {
    /// Fractional Brownian motion, `t^(2H)`.
    Fbm { hurst: f64 },
    /// Integrated Brownian motion, `t³/3`.
    IntegratedBm,
    /// Wiener integral with tabulated `(t, σ²)`; linear in between.
    WienerIntegral { table: Vec<(f64, f64)> },
}

impl VarianceFn {
    pub fn at(&self, t: f64) -> Result<f64> {
        match self {
            VarianceFn::Fbm { hurst } => Ok(t.powf(2.0 * hurst)),
            VarianceFn::IntegratedBm => Ok(t * t * t / 3.0),
            VarianceFn::WienerIntegral { table } => {
                let (first, last) = (table[0], table[table.len() - 1]);
                if t < first.0 || t > last.0 {
                    return Err(Error::domain(format!(
                        "horizon {t} outside the variance table range [{}, {}]",
                        first.0, last.0
                    )));
                }
                let i = table.partition_point(|&(s, _)| s < t);
                if table[i].0 == t {
                    return Ok(table[i].1);
                }
                let (t0, v0) = table[i - 1];
                let (t1, v1) = table[i];
                Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }
}

/// A random clock `S(t)` at which the motion is observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TimeChange {
    /// Bessel process in `dim` dimensions, nested `iterations` extra times:
    /// `R(R(...R(t)))`.
    Bessel { dim: u32, iterations: u32 },
    /// Gamma clocks; the first shape is the outermost, each inner draw
    /// serving as the rate of the next one out.
    GammaChain { shapes: Vec<f64> },
    /// Time a Brownian motion spends positive on `[0, t]` (arcsine law).
    Sojourn,
    /// Bessel process evaluated at an independent Gamma time.
    BesselOfGamma { dim: u32, shape: f64 },
    /// `|G(t)|` for a centred Gaussian process with variance `σ²(t)`.
    GaussianModulus { variance: VarianceFn },
}

impl TimeChange {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::usage(msg));
        match self {
            TimeChange::Bessel { dim, .. } | TimeChange::BesselOfGamma { dim, .. } if *dim == 0 => {
                bad("Bessel clock needs d >= 1".into())
            }
            TimeChange::BesselOfGamma { shape, .. } if !(*shape > 0.0 && shape.is_finite()) => {
                bad(format!("Gamma shape must be > 0, got {shape}"))
            }
            TimeChange::GammaChain { shapes } if shapes.is_empty() => {
                bad("Gamma chain needs at least one shape".into())
            }
            TimeChange::GammaChain { shapes } if shapes.iter().any(|a| !(*a > 0.0 && a.is_finite())) => {
                bad(format!("Gamma shapes must be > 0, got {shapes:?}"))
            }
            TimeChange::GaussianModulus { variance } => match variance {
                VarianceFn::Fbm { hurst } if !(*hurst > 0.0 && *hurst < 1.0) => {
                    bad(format!("Hurst index must lie in (0, 1), got {hurst}"))
                }
                VarianceFn::WienerIntegral { table } => {
                    let increasing = table.windows(2).all(|w| w[0].0 < w[1].0);
                    let valid = table.iter().all(|&(t, v)| t >= 0.0 && v >= 0.0 && t.is_finite() && v.is_finite());
                    if table.is_empty() || !increasing || !valid {
                        bad("variance table needs strictly increasing t and sigma^2 >= 0".into())
                    } else {
                        Ok(())
                    }
                }
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// True when the clock nests another random clock.
    pub fn is_iterated(&self) -> bool {
        matches!(self, TimeChange::Bessel { iterations, .. } if *iterations > 0)
            || matches!(self, TimeChange::GammaChain { shapes } if shapes.len() > 1)
    }

    /// Splits a nested clock into its outermost single level and the clock
    /// that supplies that level's horizon.
    pub fn split_outer(&self) -> Option<(TimeChange, TimeChange)> {
        match self {
            TimeChange::Bessel { dim, iterations } if *iterations > 0 => Some((
                TimeChange::Bessel { dim: *dim, iterations: 0 },
                TimeChange::Bessel { dim: *dim, iterations: iterations - 1 },
            )),
            TimeChange::GammaChain { shapes } if shapes.len() > 1 => Some((
                TimeChange::GammaChain { shapes: vec![shapes[0]] },
                TimeChange::GammaChain { shapes: shapes[1..].to_vec() },
            )),
            _ => None,
        }
    }
}

fn bessel_step<R: Rng + ?Sized>(dim: u32, horizon: f64, rng: &mut R) -> f64 {
    let chi2: f64 = (0..dim).map(|_| standard_normal(rng).powi(2)).sum();
    (horizon * chi2).sqrt()
}

/// One draw of `S(t)`.
pub fn draw_time<R: Rng + ?Sized>(change: &TimeChange, t: f64, rng: &mut R) -> Result<f64> {
    change.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("horizon must be finite and > 0, got {t}")));
    }
    match change {
        TimeChange::Bessel { dim, iterations } => {
            let mut s = t;
            for _ in 0..=*iterations {
                s = bessel_step(*dim, s, rng);
            }
            Ok(s)
        }
        TimeChange::GammaChain { shapes } => {
            let mut rate = t;
            for &shape in shapes.iter().rev() {
                rate = draw_gamma(shape, rate, rng)?;
            }
            Ok(rate)
        }
        TimeChange::Sojourn => Ok(t * (FRAC_PI_2 * uniform_open(rng)).sin().powi(2)),
        TimeChange::BesselOfGamma { dim, shape } => {
            let g = draw_gamma(*shape, t, rng)?;
            Ok(bessel_step(*dim, g, rng))
        }
        TimeChange::GaussianModulus { variance } => Ok(variance.at(t)?.sqrt() * standard_normal(rng).abs()),
    }
}

impl fmt::Display for TimeChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeChange::Bessel { dim, iterations } => write!(f, "bessel:d={dim},iter={iterations}"),
            TimeChange::GammaChain { shapes } => {
                let parts: Vec<String> = shapes.iter().map(|a| a.to_string()).collect();
                write!(f, "gamma:{}", parts.join(","))
            }
            TimeChange::Sojourn => write!(f, "sojourn"),
            TimeChange::BesselOfGamma { dim, shape } => write!(f, "bessel-of-gamma:d={dim},alpha={shape}"),
            TimeChange::GaussianModulus { variance } => match variance {
                VarianceFn::Fbm { hurst } => write!(f, "gauss:fbm,h={hurst}"),
                VarianceFn::IntegratedBm => write!(f, "gauss:ibm"),
                VarianceFn::WienerIntegral { table } => {
                    let parts: Vec<String> = table.iter().map(|(t, v)| format!("{t}/{v}")).collect();
                    write!(f, "gauss:wiener,table={}", parts.join(";"))
                }
            },
        }
    }
}

fn parse_num<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::usage(format!("cannot parse {key} value '{raw}'")))
}

/// `key=value` pairs after the clock name.
fn key_values(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .filter(|s| !s.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::usage(format!("expected key=value, got '{kv}'")))
        })
        .collect()
}

impl FromStr for TimeChange {
    type Err = Error;

    /// Accepts `bessel:d=2,iter=0`, `gamma:1.0,0.5`, `sojourn`,
    /// `bessel-of-gamma:d=1,alpha=0.5`, `gauss:fbm,h=0.7`, `gauss:ibm` and
    /// `gauss:wiener,table=0.5/0.2;1/0.6`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s.split_once(':').unwrap_or((s, ""));
        let change = match name.trim() {
            "sojourn" if body.is_empty() => TimeChange::Sojourn,
            "bessel" => {
                let (mut dim, mut iterations) = (None, 0);
                for (k, v) in key_values(body)? {
                    match k {
                        "d" => dim = Some(parse_num("d", v)?),
                        "iter" => iterations = parse_num("iter", v)?,
                        _ => return Err(Error::usage(format!("unknown bessel key '{k}'"))),
                    }
                }
                let dim = dim.ok_or_else(|| Error::usage("bessel clock needs d=<dimension>"))?;
                TimeChange::Bessel { dim, iterations }
            }
            "gamma" => {
                let shapes = body.split(',').map(|a| parse_num("gamma shape", a)).collect::<Result<Vec<f64>>>()?;
                TimeChange::GammaChain { shapes }
            }
            "bessel-of-gamma" => {
                let (mut dim, mut shape) = (None, None);
                for (k, v) in key_values(body)? {
                    match k {
                        "d" => dim = Some(parse_num("d", v)?),
                        "alpha" => shape = Some(parse_num("alpha", v)?),
                        _ => return Err(Error::usage(format!("unknown bessel-of-gamma key '{k}'"))),
                    }
                }
                match (dim, shape) {
                    (Some(dim), Some(shape)) => TimeChange::BesselOfGamma { dim, shape },
                    _ => return Err(Error::usage("bessel-of-gamma needs d=<dim>,alpha=<shape>")),
                }
            }
            "gauss" => {
                let (kind, rest) = body.split_once(',').unwrap_or((body, ""));
                let variance = match kind.trim() {
                    "ibm" if rest.is_empty() => VarianceFn::IntegratedBm,
                    "fbm" => match key_values(rest)?.as_slice() {
                        [("h", h)] => VarianceFn::Fbm { hurst: parse_num("h", h)? },
                        _ => return Err(Error::usage("gauss:fbm needs h=<hurst>")),
                    },
                    "wiener" => match key_values(rest)?.as_slice() {
                        [("table", raw)] => {
                            let table = raw
                                .split(';')
                                .map(|pair| {
                                    let (t, v) = pair.split_once('/').ok_or_else(|| {
                                        Error::usage(format!("table entries are t/sigma2, got '{pair}'"))
                                    })?;
                                    Ok((parse_num("t", t)?, parse_num("sigma2", v)?))
                                })
                                .collect::<Result<Vec<_>>>()?;
                            VarianceFn::WienerIntegral { table }
                        }
                        _ => return Err(Error::usage("gauss:wiener needs table=t/sigma2;...")),
                    },
                    other => return Err(Error::usage(format!("unknown Gaussian clock '{other}'"))),
                };
                TimeChange::GaussianModulus { variance }
            }
            other => return Err(Error::usage(format!("unknown time change '{other}'"))),
        };
        change.validate()?;
        Ok(change)
    }
}
