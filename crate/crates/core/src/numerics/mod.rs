//! Special functions and quadrature behind every analytic evaluation.

mod bessel;
mod gamma;
mod quadrature;
mod series;
mod special;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_i_with, bessel_j, bessel_j_scaled, bessel_j_with, bessel_k, bessel_k_scaled,
    ln_bessel_k_scaled, MAX_JI_ORDER, MAX_K_ARG, MAX_K_ORDER, MAX_SERIES_ARG,
};
pub use gamma::{beta_ln, gamma, gamma_ln};
pub(crate) use gamma::{ln_beta_pos, ln_gamma_pos};
pub use quadrature::{integrate, integrate_with_gaps, QuadratureSpec};
pub use series::{KahanSum, SeriesPolicy};
pub use special::{
    mittag_leffler, mittag_leffler_with, struve_l, struve_l_with, MAX_MITTAG_LEFFLER_ARG, MAX_STRUVE_ARG,
    MAX_STRUVE_ORDER,
};
