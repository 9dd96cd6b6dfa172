//! Exact samplers for angles, event schedules and random clocks.

mod clock;
mod distributions;
mod rng;
mod schedule;

pub use clock::{draw_time, TimeChange, VarianceFn};
pub use distributions::{
    draw_angle, draw_beta, draw_direction_cosine, draw_gamma, draw_poisson, standard_normal, uniform_open,
};
pub use rng::{derive_seed, par_draw, RngStream, StreamRng};
pub use schedule::{draw_schedule, EventSchedule};
