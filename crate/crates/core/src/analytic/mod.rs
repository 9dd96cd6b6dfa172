//! Densities, transforms and moments of the motion and its relatives.

mod composed;
mod density;
mod flight;
mod hyperbolic;
mod law;
mod moment;
mod transform;

pub use composed::{composed_cdf, composed_density, ComposedLaw, DensityValue, MixtureMethod};
pub use density::{cdf, central_mass, density};
pub use flight::{drift_cf_mc, drift_segment_cf, flight_density, sphere_measure};
pub use hyperbolic::{hyperbolic_distance_cdf, hyperbolic_mean, DistanceBound};
pub use law::{closed_shape, Horizon, LawSelector};
pub use moment::{moment, uncond_second_moment};
pub use transform::{transform, Estimate, TransformKind, TransformMethod};
