//! Numerical toolkit for (p,q)-dual mixed curvature measures and
//! (p,q)-mixed quermassintegrals of convex and star bodies.
//!
//! Layout:
//! - [`geometry`]: bodies, support/radial functions, polars, Wulff shapes,
//!   convex hulls, L_p combinations, radial Gauss map of polytopes.
//! - [`quadrature`]: spherical grids, including grids split along the cones of
//!   polytopes so that piecewise-smooth integrands are integrated to near
//!   machine precision.
//! - [`measure`]: curvature measures of polytopes and their boundary-integral
//!   oracle.
//! - [`quermass`]: dual and (p,q)-mixed quermassintegrals with identity,
//!   covariance, valuation and variational checks.
//! - [`inequality`]: randomized verification of the Minkowski, monotonicity
//!   and cyclic inequalities.
//! - [`solver`]: the discrete Minkowski problem for these measures.
//! - [`schema`]: JSON interchange formats for bodies and measures.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod inequality;
pub mod measure;
pub mod quadrature;
pub mod quermass;
pub mod schema;
pub mod solver;

mod par;

pub use error::{Error, Result};
pub use geometry::{Body, HPolytope, Matrix, UnitDirection, Vector};
pub use quadrature::{GridConfig, Scheme, SphericalGrid};
pub use measure::{DiscreteSphericalMeasure, MeasureParams};


