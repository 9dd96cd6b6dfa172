//! Telegraph-type random motions with random velocities: samplers, analytic
//! laws, random-clock compositions and goodness-of-fit checks.

// `!(x > 0.0)` deliberately rejects NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod motion;
pub mod numerics;
pub mod sampling;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
