use std::f64::consts::PI;

use super::body::{Body, LinearImage, PolarBody};
use super::hull::hemisphere_margin;
use super::polytope::{HPolytope, VPolytope};
use super::vector::{check_dim, Matrix, Vector};
use super::{UnitDirection, DUPLICATE_TOL, HEMISPHERE_TOL};
use crate::error::{Error, Result};

/// `φM`. Polytopes keep an explicit H-description of the image.
pub fn apply_linear(body: &Body, matrix: &Matrix) -> Result<Body> {
    let n = body.dim();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
    }
    if matrix.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteVector);
    }
    let det = matrix.determinant();
    let scale = matrix.amax().powi(n as i32).max(f64::MIN_POSITIVE);
    if det.abs() <= 1e-14 * scale {
        return Err(Error::SingularMatrix { det });
    }
    let inverse = matrix.clone().try_inverse().ok_or(Error::SingularMatrix { det })?;
    let canonical = body.as_polytope().map(|p| p.linear_image(&inverse)).transpose()?;
    Ok(Body::Linear(LinearImage { matrix: matrix.clone(), inverse, inner: Box::new(body.clone()), canonical }))
}

/// Polar body `M* = {x : x·y ≤ 1 for all y ∈ M}`.
pub fn polar(body: &Body) -> Result<Body> {
    if !body.is_convex() {
        return Err(Error::NonConvexBody);
    }
    Ok(match body {
        Body::Ball { dim, radius } => Body::Ball { dim: *dim, radius: 1.0 / radius },
        Body::Polar(p) => (*p.inner).clone(),
        _ => {
            let canonical = body.as_polytope().map(HPolytope::polar).transpose()?;
            Body::Polar(PolarBody { inner: Box::new(body.clone()), canonical })
        }
    })
}

/// Normal set on which an L_p combination is realized as a Wulff shape.
#[derive(Clone, Debug, Default)]
pub enum NormalSet {
    /// Facet normals of the polytopal operands when there are any, an exact
    /// dilate when the operands are dilates of each other, and
    /// [`NormalSet::Sampled`] with a default size otherwise.
    #[default]
    Auto,
    Explicit(Vec<UnitDirection>),
    /// Quasi-uniform directions: equally spaced angles in the plane, a
    /// Fibonacci lattice on `S^2`.
    Sampled(usize),
}

const DEFAULT_SAMPLES_2D: usize = 720;
const DEFAULT_SAMPLES_3D: usize = 96;

/// L_p combination `k·M +_p l·N`: the Wulff shape of
/// `(k h_M^p + l h_N^p)^{1/p}` on the chosen normal set.
pub fn lp_combination(m: &Body, n: &Body, k: f64, l: f64, p: f64, normals: &NormalSet) -> Result<Body> {
    check_dim(m.dim(), n.dim())?;
    if !(m.is_convex() && n.is_convex()) {
        return Err(Error::NonConvexBody);
    }
    if !(p != 0.0 && p.is_finite() && k.is_finite() && l.is_finite()) {
        return Err(Error::InvalidParameter(format!("invalid L_p combination k={k}, l={l}, p={p}")));
    }
    let dim = m.dim();
    let directions = match normals {
        NormalSet::Auto => {
            if let Some(ratio) = n.dilation_of(m) {
                let c = k + l * ratio.powf(p);
                if !(c > 0.0) {
                    return Err(Error::NonPositiveCombination { index: 0 });
                }
                return m.scaled(c.powf(1.0 / p));
            }
            let mut dirs: Vec<UnitDirection> = Vec::new();
            for body in [m, n] {
                if let Some(poly) = body.as_polytope() {
                    for v in poly.normals() {
                        if dirs.iter().all(|w| w.dot(v) < 1.0 - DUPLICATE_TOL) {
                            dirs.push(v.clone());
                        }
                    }
                }
            }
            if dirs.is_empty() {
                let count = if dim == 2 { DEFAULT_SAMPLES_2D } else { DEFAULT_SAMPLES_3D };
                sample_directions(dim, count)?
            } else {
                dirs
            }
        }
        NormalSet::Explicit(dirs) => dirs.clone(),
        NormalSet::Sampled(count) => sample_directions(dim, *count)?,
    };
    let mut support = Vec::with_capacity(directions.len());
    for (index, u) in directions.iter().enumerate() {
        let s = k * m.h(u).powf(p) + l * n.h(u).powf(p);
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::NonPositiveCombination { index });
        }
        support.push(s.powf(1.0 / p));
    }
    Ok(Body::PolytopeH(HPolytope::new(directions, support)?))
}

/// Quasi-uniform unit directions in dimension 2 or 3.
pub(crate) fn sample_directions(dim: usize, count: usize) -> Result<Vec<UnitDirection>> {
    match dim {
        2 => Ok((0..count).map(|k| UnitDirection::from_angle(2.0 * PI * k as f64 / count as f64)).collect()),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    UnitDirection::new_unchecked(Vector::from_vec(vec![r * t.cos(), r * t.sin(), z]))
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDimension(dim)),
    }
}

/// `⟨ρ⟩ = conv{ρ_i u_i}` for finitely many directions.
pub fn convex_hull_of_radial(directions: &[UnitDirection], rho: &[f64]) -> Result<Body> {
    check_dim(directions.len(), rho.len())?;
    let Some(first) = directions.first() else {
        return Err(Error::UnboundedWulffShape { margin: f64::NEG_INFINITY });
    };
    for u in directions {
        check_dim(first.dim(), u.dim())?;
    }
    for (index, &value) in rho.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSupport { index, value });
        }
    }
    let margin = hemisphere_margin(directions);
    if !(margin > HEMISPHERE_TOL) {
        return Err(Error::UnboundedWulffShape { margin });
    }
    let points: Vec<Vector> = directions.iter().zip(rho).map(|(u, &r)| u.as_vector() * r).collect();
    Ok(Body::PolytopeV(VPolytope::new(points)?))
}
