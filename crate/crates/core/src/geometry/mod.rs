//! Convex and star bodies: support and radial functions, polar duality, Wulff
//! shapes, convex hulls, L_p combinations, linear images and the radial Gauss
//! map of polytopes.

mod body;
mod hull;
mod ops;
mod polytope;
mod vector;

pub use body::{Body, PolarBody, LinearImage};
pub use hull::{hemisphere_margin, hull_facets, HullFacet};
pub use ops::{apply_linear, convex_hull_of_radial, lp_combination, polar, NormalSet};
pub use polytope::{wulff_shape, HPolytope, PruneCertificate, VPolytope, WulffShape};
pub use vector::{ball_volume, sphere_area, Matrix, UnitDirection, Vector};
pub(crate) use vector::check_dim;

/// Relative tolerance for incidence and feasibility predicates on polytopes.
pub const GEOM_TOL: f64 = 1e-9;

/// Normals with `v_i · v_k >= 1 - DUPLICATE_TOL` are treated as equal.
pub const DUPLICATE_TOL: f64 = 1e-10;

/// Minimum of `max_i u·v_i` over unit `u` below which a normal set is
/// considered to lie in a closed hemisphere.
pub const HEMISPHERE_TOL: f64 = 1e-9;
