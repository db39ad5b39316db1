//! Brute-force facet enumeration for small point sets.
//!
//! Every n-subset of points spans a candidate hyperplane; it is a facet when
//! all points lie on one side. Cost is O(C(m, n) · m), which is fine for the
//! point counts this crate works with (tens of points, n ≤ 4).

use itertools::Itertools;

use super::vector::{orthogonal_complement, Vector};
use super::{UnitDirection, DUPLICATE_TOL, GEOM_TOL};

/// Supporting hyperplane `{x : normal·x = offset}` of a convex hull, with the
/// hull on the side `normal·x ≤ offset`.
#[derive(Clone, Debug)]
pub struct HullFacet {
    pub normal: UnitDirection,
    pub offset: f64,
}

/// Facets of `conv(points)`. Empty when the points are not full-dimensional.
pub fn hull_facets(points: &[Vector]) -> Vec<HullFacet> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = first.len();
    if points.len() < n + 1 {
        return Vec::new();
    }
    let scale = points.iter().map(|p| p.amax()).fold(0.0, f64::max).max(1e-300);
    let tol = GEOM_TOL * scale;
    let mut facets: Vec<HullFacet> = Vec::new();
    for subset in (0..points.len()).combinations(n) {
        let base = &points[subset[0]];
        let spans: Vec<Vector> = subset[1..].iter().map(|&k| &points[k] - base).collect();
        let Some(normal) = orthogonal_complement(&spans) else {
            continue;
        };
        let offset = normal.dot(base);
        let (mut above, mut below) = (false, false);
        for p in points {
            let s = normal.dot(p) - offset;
            above |= s > tol;
            below |= s < -tol;
            if above && below {
                break;
            }
        }
        let (normal, offset) = match (above, below) {
            (false, true) => (normal, offset),
            (true, false) => (-normal, -offset),
            _ => continue,
        };
        if facets.iter().any(|f| f.normal.dot(&normal) >= 1.0 - DUPLICATE_TOL) {
            continue;
        }
        facets.push(HullFacet { normal: UnitDirection::new_unchecked(normal), offset });
    }
    facets
}

/// `min_{|u|=1} max_i u·v_i` for the given unit normals.
///
/// Positive exactly when the origin lies strictly inside `conv{v_i}`, i.e. the
/// normals are not contained in any closed hemisphere. Equals the smallest
/// facet offset of the hull; `-inf` for lower-dimensional normal sets.
pub fn hemisphere_margin(normals: &[UnitDirection]) -> f64 {
    if normals.first().map(|v| v.dim()) == Some(2) {
        return planar_margin(normals);
    }
    let points: Vec<Vector> = normals.iter().map(|v| v.as_vector().clone()).collect();
    let facets = hull_facets(&points);
    if facets.is_empty() {
        return f64::NEG_INFINITY;
    }
    facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min)
}

/// In the plane the margin is `cos(g/2)` for the largest angular gap `g`.
fn planar_margin(normals: &[UnitDirection]) -> f64 {
    let mut angles: Vec<f64> = normals.iter().map(|v| v.angle()).collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    let gap = angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max);
    (0.5 * gap).cos()
}
