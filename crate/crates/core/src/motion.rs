//! Terminal positions of the motion, its random flights and its
//! time-changed versions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{
    draw_direction_cosine, draw_poisson, draw_schedule, draw_time, par_draw, standard_normal, uniform_open,
    EventSchedule, TimeChange,
};

/// Friction level `ν`, speed `c` and Poisson rate `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionParams {
    pub nu: f64,
    pub c: f64,
    pub lambda: f64,
}

impl MotionParams {
    pub fn new(nu: f64, c: f64, lambda: f64) -> Result<Self> {
        let p = Self { nu, c, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.nu.is_finite() && self.c.is_finite() && self.lambda.is_finite();
        if !finite || self.nu < 0.0 || self.c <= 0.0 || self.lambda <= 0.0 {
            return Err(Error::domain(format!(
                "motion needs nu >= 0, c > 0, lambda > 0 (got nu={}, c={}, lambda={})",
                self.nu, self.c, self.lambda
            )));
        }
        Ok(())
    }
}

/// How many direction changes happen before the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conditioning {
    FixedEvents {
        n: usize,
    },
    /// `N ~ Poisson(λ t)` at the deterministic horizon `t`.
    PoissonAtHorizon,
}

impl Conditioning {
    fn draw_count<R: Rng + ?Sized>(&self, lambda: f64, t: f64, rng: &mut R) -> Result<usize> {
        match *self {
            Conditioning::FixedEvents { n } => Ok(n),
            Conditioning::PoissonAtHorizon => Ok(draw_poisson(lambda * t, rng)? as usize),
        }
    }

    fn label(&self) -> String {
        match self {
            Conditioning::FixedEvents { n } => format!("events={n}"),
            Conditioning::PoissonAtHorizon => "events=poisson".to_string(),
        }
    }
}

/// Monte Carlo output. Vector-valued samples are stored row-major with
/// `dim` entries per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub dim: usize,
    pub seed: u64,
    pub descriptor: String,
}

impl SampleBatch {
    pub fn scalars(values: Vec<f64>, seed: u64, descriptor: impl Into<String>) -> Self {
        Self { values, dim: 1, seed, descriptor: descriptor.into() }
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// The `k`-th coordinate of every sample.
    pub fn coordinate(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("horizon must be finite and > 0, got {t}")));
    }
    Ok(())
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::usage("sample count must be >= 1"));
    }
    Ok(())
}

/// `c Σ_j (s_j - s_{j-1}) cos θ_j` over the schedule's segments, with fresh
/// angles; the result lies in `[-c T, c T]` for horizon `T`.
pub fn position<R: Rng + ?Sized>(params: &MotionParams, schedule: &EventSchedule, rng: &mut R) -> Result<f64> {
    params.validate()?;
    let mut x = 0.0;
    for seg in schedule.segments() {
        x += seg * draw_direction_cosine(params.nu, rng)?;
    }
    let bound = params.c * schedule.horizon();
    Ok((params.c * x).clamp(-bound, bound))
}

pub fn sample_positions(
    params: &MotionParams,
    cond: Conditioning,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    params.validate()?;
    check_horizon(t)?;
    check_count(count)?;
    let values = par_draw(seed, count, |rng, _| {
        let n = cond.draw_count(params.lambda, t, rng)?;
        let schedule = draw_schedule(n, t, rng)?;
        position(params, &schedule, rng)
    })?;
    let descriptor = format!(
        "positions nu={} c={} lambda={} {} t={t} count={count} seed={seed}",
        params.nu,
        params.c,
        params.lambda,
        cond.label()
    );
    Ok(SampleBatch::scalars(values, seed, descriptor))
}

/// Position observed at the random time `S = change(t)`. The event count is
/// drawn at the deterministic horizon `t`; the epochs are placed on `(0, S)`.
pub fn sample_composed(
    params: &MotionParams,
    change: &TimeChange,
    cond: Conditioning,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    params.validate()?;
    change.validate()?;
    check_horizon(t)?;
    check_count(count)?;
    let values = par_draw(seed, count, |rng, _| {
        let s = draw_time(change, t, rng)?;
        let n = cond.draw_count(params.lambda, t, rng)?;
        if s <= 0.0 {
            return Ok(0.0);
        }
        let schedule = draw_schedule(n, s, rng)?;
        position(params, &schedule, rng)
    })?;
    let descriptor = format!(
        "composed nu={} c={} lambda={} clock={change} {} t={t} count={count} seed={seed}",
        params.nu,
        params.c,
        params.lambda,
        cond.label()
    );
    Ok(SampleBatch::scalars(values, seed, descriptor))
}

fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    if dim == 2 {
        let phi = std::f64::consts::TAU * uniform_open(rng);
        return vec![phi.cos(), phi.sin()];
    }
    loop {
        let g: Vec<f64> = (0..dim).map(|_| standard_normal(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return g.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn check_flight_dim(dim: usize) -> Result<()> {
    if dim != 2 && dim != 4 {
        return Err(Error::domain(format!("random flights exist here for dim 2 and 4, got {dim}")));
    }
    Ok(())
}

/// Endpoint of a flight with isotropic directions on `S^(dim-1)`.
pub fn flight_position<R: Rng + ?Sized>(dim: usize, c: f64, schedule: &EventSchedule, rng: &mut R) -> Result<Vec<f64>> {
    check_flight_dim(dim)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("speed must be finite and > 0, got {c}")));
    }
    let mut x = vec![0.0; dim];
    for seg in schedule.segments() {
        for (xi, ui) in x.iter_mut().zip(unit_vector(dim, rng)) {
            *xi += c * seg * ui;
        }
    }
    let bound = c * schedule.horizon();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > bound {
        x.iter_mut().for_each(|v| *v *= bound / norm);
    }
    Ok(x)
}

pub fn sample_flights(
    dim: usize,
    c: f64,
    lambda: f64,
    cond: Conditioning,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    check_flight_dim(dim)?;
    check_horizon(t)?;
    check_count(count)?;
    let rows = par_draw(seed, count, |rng, _| {
        let n = cond.draw_count(lambda, t, rng)?;
        let schedule = draw_schedule(n, t, rng)?;
        flight_position(dim, c, &schedule, rng)
    })?;
    let descriptor = format!("flight dim={dim} c={c} lambda={lambda} {} t={t} count={count} seed={seed}", cond.label());
    Ok(SampleBatch { values: rows.concat(), dim, seed, descriptor })
}
