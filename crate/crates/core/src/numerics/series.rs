use crate::error::{Error, Result};

/// Truncation rule shared by every power series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    /// Relative size below which a term counts as negligible.
    pub term_tol: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self { max_terms: 500, term_tol: 1e-16 }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 || !(self.term_tol > 0.0) {
            return Err(Error::usage("series policy needs max_terms >= 1 and term_tol > 0"));
        }
        Ok(())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Result of summing a series: the value and the sum of term magnitudes,
/// the latter bounding the rounding error at about `abs_sum * eps`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesValue {
    pub value: f64,
    pub abs_sum: f64,
}

/// Sums `term(0) + term(1) + ...` where `next(k, prev)` yields term `k`
/// from term `k - 1`.
pub(crate) fn sum_recurrence(
    policy: &SeriesPolicy,
    first: f64,
    mut next: impl FnMut(usize, f64) -> f64,
) -> Result<SeriesValue> {
    let mut acc = KahanSum::new();
    acc.add(first);
    let mut abs_sum = first.abs();
    let mut term = first;
    let mut small_run = 0;
    for k in 1..policy.max_terms {
        term = next(k, term);
        acc.add(term);
        abs_sum += term.abs();
        if term.abs() <= policy.term_tol * acc.value().abs() || term == 0.0 {
            small_run += 1;
            if small_run == 2 {
                return Ok(SeriesValue { value: acc.value(), abs_sum });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::Series { terms: policy.max_terms, partial: acc.value() })
}

/// Like [`sum_recurrence`] but with each term given directly by index.
pub(crate) fn sum_terms(policy: &SeriesPolicy, mut term: impl FnMut(usize) -> f64) -> Result<SeriesValue> {
    let first = term(0);
    sum_recurrence(policy, first, |k, _| term(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_lost_bits() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10_000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn geometric_series() {
        let p = SeriesPolicy::default();
        let s = sum_recurrence(&p, 1.0, |_, t| t * 0.5).unwrap();
        assert!((s.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn divergent_series_reports_partial_sum() {
        let p = SeriesPolicy { max_terms: 10, term_tol: 1e-16 };
        let err = sum_recurrence(&p, 1.0, |_, t| t).unwrap_err();
        assert_eq!(err, Error::Series { terms: 10, partial: 10.0 });
    }

    #[test]
    fn policy_validation() {
        assert!(SeriesPolicy { max_terms: 0, term_tol: 1e-16 }.validate().is_err());
        assert!(SeriesPolicy::default().validate().is_ok());
    }
}
