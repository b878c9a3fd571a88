//! Finite-dimensional ℓ_p geometry: norms, point-to-set distances, nearest
//! points, and the Hausdorff metric on compact sets.

mod hausdorff;
mod norm;
pub(crate) mod projection;
mod set;

pub use hausdorff::{directed_hausdorff, hausdorff};
pub use norm::{Exponent, NormedSpace, Point};
pub use projection::{distance_point_set, nearest_point, Projection, PROJECTION_BUDGET};
pub use set::{CompactSet, SET_TOL};

pub(crate) use set::linspace;
