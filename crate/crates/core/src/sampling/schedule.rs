use rand::Rng;
use serde::{Deserialize, Serialize};

use super::distributions::uniform_open;
use crate::error::{Error, Result};

/// Poisson event epochs on `(0, horizon)`; `0` and `horizon` bound the
/// first and last segments implicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSchedule {
    horizon: f64,
    times: Vec<f64>,
}

impl EventSchedule {
    pub fn new(horizon: f64, times: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::domain(format!("horizon must be finite and > 0, got {horizon}")));
        }
        let inside = times.iter().all(|&s| s > 0.0 && s < horizon);
        let increasing = times.windows(2).all(|w| w[0] < w[1]);
        if !inside || !increasing {
            return Err(Error::domain("event times must be strictly increasing inside (0, horizon)"));
        }
        Ok(Self { horizon, times })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn count(&self) -> usize {
        self.times.len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Lengths of the `count + 1` segments between consecutive epochs.
    pub fn segments(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.times.len();
        (0..=n).map(move |j| {
            let hi = if j == n { self.horizon } else { self.times[j] };
            let lo = if j == 0 { 0.0 } else { self.times[j - 1] };
            hi - lo
        })
    }
}

/// Order statistics of `n` independent uniforms on `(0, t)`.
pub fn draw_schedule<R: Rng + ?Sized>(n: usize, t: f64, rng: &mut R) -> Result<EventSchedule> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("horizon must be finite and > 0, got {t}")));
    }
    loop {
        let mut times: Vec<f64> = (0..n).map(|_| t * uniform_open(rng)).collect();
        times.sort_by(f64::total_cmp);
        // rounding can push t*u onto t or merge two epochs; redraw then
        let valid = times.last().is_none_or(|&s| s < t) && times.windows(2).all(|w| w[0] < w[1]);
        if valid {
            return Ok(EventSchedule { horizon: t, times });
        }
    }
}
