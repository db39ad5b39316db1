//! Exact partition of `S^2` into the facet cones of one or more polytopes.
//!
//! Each facet cone of the owner polytope is a convex spherical polygon. Every
//! further polytope splits those cells along its own cone boundaries, which
//! are great circles through consecutive facet vertices. The resulting cells
//! are fanned into spherical triangles and refined until their edges are short.

use nalgebra::Vector3;

use super::rules::spherical_triangle;
use crate::geometry::HPolytope;

type V3 = Vector3<f64>;

/// Longest edge (radians) of a triangle handed to the product rule.
pub(crate) const MAX_EDGE: f64 = 0.5;

const AREA_EPS: f64 = 1e-14;

fn v3(v: &nalgebra::DVector<f64>) -> V3 {
    V3::new(v[0], v[1], v[2])
}

pub(crate) fn facet_cones(p: &HPolytope) -> Vec<Vec<V3>> {
    (0..p.len())
        .map(|i| p.facet_vertices(i).iter().map(|&k| v3(&p.vertices()[k]).normalize()).collect())
        .collect()
}

/// Keeps the part of a convex polygon with `g·x ≥ 0`. Spherical polygons
/// (`on_sphere`) have their new vertices pushed back to the unit sphere.
pub(crate) fn clip_halfspace(poly: &[V3], g: &V3, on_sphere: bool) -> Vec<V3> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (k, cur) in poly.iter().enumerate() {
        let next = &poly[(k + 1) % poly.len()];
        let (dc, dn) = (g.dot(cur), g.dot(next));
        if dc >= 0.0 {
            out.push(*cur);
        }
        if (dc >= 0.0) != (dn >= 0.0) && dc != dn {
            let x = cur + (next - cur) * (dc / (dc - dn));
            out.push(if on_sphere { x.normalize() } else { x });
        }
    }
    let eps = 1e-13 * poly.iter().map(|v| v.norm()).fold(0.0, f64::max);
    out.dedup_by(|a, b| (*a - *b).norm() < eps);
    if out.len() > 1 && (out[0] - out[out.len() - 1]).norm() < eps {
        out.pop();
    }
    out
}

pub(crate) fn triangle_solid_angle(a: &V3, b: &V3, c: &V3) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

fn polygon_solid_angle(poly: &[V3]) -> f64 {
    (1..poly.len().saturating_sub(1)).map(|k| triangle_solid_angle(&poly[0], &poly[k], &poly[k + 1])).sum()
}

/// Cells of the common refinement, each tagged with the owner facet index.
fn cells(polys: &[&HPolytope]) -> Vec<(Vec<V3>, usize)> {
    let mut cells: Vec<(Vec<V3>, usize)> = facet_cones(polys[0]).into_iter().enumerate().map(|(i, c)| (c, i)).collect();
    for other in &polys[1..] {
        let cones = facet_cones(other);
        let mut next = Vec::new();
        for (cell, owner) in &cells {
            for cone in &cones {
                let mut piece = cell.clone();
                for k in 0..cone.len() {
                    if piece.len() < 3 {
                        break;
                    }
                    let g = cone[k].cross(&cone[(k + 1) % cone.len()]);
                    piece = clip_halfspace(&piece, &g, true);
                }
                if piece.len() >= 3 && polygon_solid_angle(&piece) > AREA_EPS {
                    next.push((piece, *owner));
                }
            }
        }
        cells = next;
    }
    cells
}

/// Largest ratio of `u·v` between two vertices of a triangle, for the facet
/// normals `v` whose cones contain it. The integrands behave like powers of
/// `1/(u·v)`, so this bounds their variation.
pub(crate) const MAX_RATIO: f64 = 1.3;
const MAX_DEPTH: usize = 8;

fn spread(tri: [&V3; 3], normals: &[V3]) -> f64 {
    normals
        .iter()
        .map(|v| {
            let d = tri.map(|u| u.dot(v));
            let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
            if lo > 0.0 { hi / lo } else { f64::INFINITY }
        })
        .fold(1.0, f64::max)
}

fn refine(a: V3, b: V3, c: V3, normals: &[V3], depth: usize, out: &mut Vec<[V3; 3]>) {
    let longest = a.angle(&b).max(b.angle(&c)).max(c.angle(&a));
    if depth >= MAX_DEPTH || (longest <= MAX_EDGE && spread([&a, &b, &c], normals) <= MAX_RATIO) {
        out.push([a, b, c]);
        return;
    }
    let ab = (a + b).normalize();
    let bc = (b + c).normalize();
    let ca = (c + a).normalize();
    refine(a, ab, ca, normals, depth + 1, out);
    refine(ab, b, bc, normals, depth + 1, out);
    refine(ca, bc, c, normals, depth + 1, out);
    refine(ab, bc, ca, normals, depth + 1, out);
}

/// Quadrature nodes on `S^2` adapted to the cones of `polys`. The returned
/// tags give the facet of `polys[0]` whose cone contains each node.
pub(crate) fn cone_nodes(polys: &[&HPolytope], rule: &[(f64, f64)]) -> (Vec<(V3, f64)>, Vec<usize>) {
    let mut nodes = Vec::new();
    let mut tags = Vec::new();
    let mut tris = Vec::new();
    for (cell, owner) in cells(polys) {
        let centre = cell.iter().fold(V3::zeros(), |acc, v| acc + v).normalize();
        let c = nalgebra::DVector::from_column_slice(centre.as_slice());
        let normals: Vec<V3> = polys.iter().map(|p| v3(&p.normals()[p.radial_gauss(&c)])).collect();
        tris.clear();
        for k in 0..cell.len() {
            refine(centre, cell[k], cell[(k + 1) % cell.len()], &normals, 0, &mut tris);
        }
        let before = nodes.len();
        for [a, b, c] in &tris {
            spherical_triangle(a, b, c, rule, &mut nodes);
        }
        tags.extend(std::iter::repeat_n(owner, nodes.len() - before));
    }
    (nodes, tags)
}
