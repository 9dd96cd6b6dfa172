use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which analytic law of the position is addressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LawSelector {
    /// Friction level `nu`, conditioned on `n` direction changes. Closed
    /// densities exist for `n = 0`; `n >= 1` is reachable by Monte Carlo.
    CondGeneral { nu: f64, n: usize },
    /// `nu = m` with `m` in {0, 1}, conditioned on `n >= 1` changes.
    CondClosed { m: u8, n: usize },
    /// `nu = m`, mixed over a Poisson number of changes.
    Uncond { m: u8 },
}

/// Shape of the conditional law of the family `m` after `n` changes:
/// `n/2` for `m = 0`, `n + 1` for `m = 1`.
pub fn closed_shape(m: u8, n: usize) -> f64 {
    if m == 0 {
        n as f64 / 2.0
    } else {
        n as f64 + 1.0
    }
}

fn check_family(m: u8) -> Result<()> {
    if m > 1 {
        return Err(Error::domain(format!("closed-form families are m = 0 and m = 1, got {m}")));
    }
    Ok(())
}

impl LawSelector {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LawSelector::CondGeneral { nu, .. } => {
                if !(nu >= 0.0) || !nu.is_finite() {
                    return Err(Error::domain(format!("friction level must be >= 0, got {nu}")));
                }
                Ok(())
            }
            LawSelector::CondClosed { m, n } => {
                check_family(m)?;
                if n == 0 {
                    return Err(Error::domain("closed conditional laws need n >= 1 (use CondGeneral for n = 0)"));
                }
                Ok(())
            }
            LawSelector::Uncond { m } => check_family(m),
        }
    }

    /// Friction level of the underlying motion.
    pub fn friction(&self) -> f64 {
        match *self {
            LawSelector::CondGeneral { nu, .. } => nu,
            LawSelector::CondClosed { m, .. } | LawSelector::Uncond { m } => f64::from(m),
        }
    }

    /// Shape `v` when the law is the scaled-Beta law with density
    /// ∝ (c²t² - x²)^(v - 1/2); general friction with `n >= 1` has one only
    /// when it coincides with a closed family.
    pub fn conditional_shape(&self) -> Option<f64> {
        match *self {
            LawSelector::CondGeneral { nu, n: 0 } => Some(nu),
            LawSelector::CondGeneral { nu: 0.0, n } => Some(closed_shape(0, n)),
            LawSelector::CondGeneral { nu: 1.0, n } => Some(closed_shape(1, n)),
            LawSelector::CondClosed { m, n } => Some(closed_shape(m, n)),
            _ => None,
        }
    }
}

/// Speed, horizon and (for unconditional laws) Poisson rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub c: f64,
    pub t: f64,
    pub lambda: Option<f64>,
}

impl Horizon {
    pub fn conditional(c: f64, t: f64) -> Self {
        Self { c, t, lambda: None }
    }

    pub fn unconditional(c: f64, t: f64, lambda: f64) -> Self {
        Self { c, t, lambda: Some(lambda) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) || !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("need c > 0 and t > 0, got c={}, t={}", self.c, self.t)));
        }
        Ok(())
    }

    pub fn reach(&self) -> f64 {
        self.c * self.t
    }

    /// The Poisson rate, required by unconditional laws.
    pub fn rate(&self) -> Result<f64> {
        match self.lambda {
            Some(l) if l > 0.0 && l.is_finite() => Ok(l),
            Some(l) => Err(Error::domain(format!("Poisson rate must be > 0, got {l}"))),
            None => Err(Error::usage("unconditional laws need a Poisson rate lambda")),
        }
    }

    pub fn with_time(&self, t: f64) -> Self {
        Self { t, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(closed_shape(0, 2), 1.0);
        assert_eq!(closed_shape(0, 0), 0.0);
        assert_eq!(closed_shape(1, 1), 2.0);
        assert_eq!(LawSelector::CondGeneral { nu: 0.7, n: 0 }.conditional_shape(), Some(0.7));
        assert_eq!(LawSelector::CondGeneral { nu: 0.7, n: 2 }.conditional_shape(), None);
        assert_eq!(LawSelector::CondGeneral { nu: 1.0, n: 3 }.conditional_shape(), Some(4.0));
        assert_eq!(LawSelector::CondClosed { m: 0, n: 5 }.conditional_shape(), Some(2.5));
        assert_eq!(LawSelector::Uncond { m: 1 }.conditional_shape(), None);
    }

    #[test]
    fn validation() {
        assert!(LawSelector::CondClosed { m: 2, n: 1 }.validate().is_err());
        assert!(LawSelector::CondClosed { m: 0, n: 0 }.validate().is_err());
        assert!(LawSelector::CondGeneral { nu: -0.5, n: 0 }.validate().is_err());
        assert!(Horizon::conditional(1.0, 1.0).rate().is_err());
        assert!(matches!(Horizon::unconditional(1.0, 1.0, 0.0).rate(), Err(Error::Domain(_))));
    }
}
