use std::cmp::Ordering;

use itertools::Itertools;

use super::hull::{hemisphere_margin, hull_facets};
use super::vector::{check_dim, Matrix, Vector};
use super::{UnitDirection, DUPLICATE_TOL, GEOM_TOL, HEMISPHERE_TOL};
use crate::error::{Error, Result};

/// How redundant halfspaces were detected during Wulff-shape construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruneCertificate {
    /// Planar case: each facet's feasible interval on its line is computed
    /// exactly from all other constraints.
    Exact,
    /// n ≥ 3: facets are kept when their incident vertices (from
    /// floating-point vertex enumeration) span an (n-1)-dimensional set.
    Numerical,
}

/// Result of [`wulff_shape`]: the polytope plus a record of pruned inputs.
#[derive(Clone, Debug)]
pub struct WulffShape {
    pub polytope: HPolytope,
    /// Input indices whose halfspaces do not touch the polytope in a facet.
    pub pruned: Vec<usize>,
    pub certificate: PruneCertificate,
}

/// Convex polytope `∩ {x : x·v_i ≤ h_i}` with the origin in its interior.
///
/// Only facet-defining halfspaces are stored. Vertices and, for n ≤ 3, the
/// ordered vertex cycle of every facet are computed at construction.
#[derive(Clone, Debug)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<UnitDirection>,
    support: Vec<f64>,
    vertices: Vec<Vector>,
    facet_vertices: Vec<Vec<usize>>,
    source: Vec<usize>,
}

/// Builds the Wulff shape `[h] = ∩ {x : x·v_i ≤ h_i}` of finitely many normals.
pub fn wulff_shape(normals: &[UnitDirection], support: &[f64]) -> Result<WulffShape> {
    let Some(first) = normals.first() else {
        return Err(Error::UnboundedWulffShape { margin: f64::NEG_INFINITY });
    };
    let dim = first.dim();
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    check_dim(normals.len(), support.len())?;
    for v in normals {
        check_dim(dim, v.dim())?;
    }
    for (index, &value) in support.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSupport { index, value });
        }
    }
    for (a, b) in (0..normals.len()).tuple_combinations() {
        if normals[a].dot(&normals[b]) >= 1.0 - DUPLICATE_TOL {
            return Err(Error::DuplicateNormals { first: a, second: b });
        }
    }
    let margin = hemisphere_margin(normals);
    if !(margin > HEMISPHERE_TOL) {
        return Err(Error::UnboundedWulffShape { margin });
    }

    let scale = support.iter().cloned().fold(0.0, f64::max);
    let (vertices, mut incidences, certificate) = if dim == 2 {
        let (v, inc) = planar_facets(normals, support, scale);
        (v, inc, PruneCertificate::Exact)
    } else {
        let (v, inc) = enumerate_vertices(normals, support, scale)?;
        (v, inc, PruneCertificate::Numerical)
    };

    let mut kept = Vec::new();
    let mut pruned = Vec::new();
    for (i, inc) in incidences.iter().enumerate() {
        if affine_rank(inc.iter().map(|&k| &vertices[k]), scale) + 1 >= dim {
            kept.push(i);
        } else {
            pruned.push(i);
        }
    }
    let normals_kept: Vec<UnitDirection> = kept.iter().map(|&i| normals[i].clone()).collect();
    let support_kept: Vec<f64> = kept.iter().map(|&i| support[i]).collect();
    let mut facet_vertices: Vec<Vec<usize>> =
        kept.iter().map(|&i| std::mem::take(&mut incidences[i])).collect();
    for (f, cycle) in facet_vertices.iter_mut().enumerate() {
        order_cycle(cycle, &vertices, &normals_kept[f]);
    }
    Ok(WulffShape {
        polytope: HPolytope {
            dim,
            normals: normals_kept,
            support: support_kept,
            vertices,
            facet_vertices,
            source: kept,
        },
        pruned,
        certificate,
    })
}

/// Feasible interval of every facet line in the plane; returns the distinct
/// vertices and, per input facet, the indices of its endpoints.
fn planar_facets(normals: &[UnitDirection], support: &[f64], scale: f64) -> (Vec<Vector>, Vec<Vec<usize>>) {
    let tol = GEOM_TOL * scale;
    let mut vertices: Vec<Vector> = Vec::new();
    let mut incidences = vec![Vec::new(); normals.len()];
    for (i, v) in normals.iter().enumerate() {
        let tangent = Vector::from_vec(vec![-v[1], v[0]]);
        let foot = v.as_vector() * support[i];
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut empty = false;
        for (k, w) in normals.iter().enumerate() {
            if k == i {
                continue;
            }
            let slope = w.dot(&tangent);
            let slack = support[k] - w.dot(&foot);
            if slope.abs() < 1e-15 {
                empty |= slack < -tol;
            } else if slope > 0.0 {
                hi = hi.min(slack / slope);
            } else {
                lo = lo.max(slack / slope);
            }
        }
        if empty || !(hi - lo > tol) {
            continue;
        }
        for t in [lo, hi] {
            let p = &foot + &tangent * t;
            incidences[i].push(intern_vertex(&mut vertices, p, tol));
        }
    }
    (vertices, incidences)
}

fn enumerate_vertices(
    normals: &[UnitDirection],
    support: &[f64],
    scale: f64,
) -> Result<(Vec<Vector>, Vec<Vec<usize>>)> {
    let dim = normals[0].dim();
    let tol = GEOM_TOL * scale;
    let mut vertices: Vec<Vector> = Vec::new();
    for subset in (0..normals.len()).combinations(dim) {
        let a = Matrix::from_fn(dim, dim, |r, c| normals[subset[r]][c]);
        if a.determinant().abs() < 1e-12 {
            continue;
        }
        let b = Vector::from_iterator(dim, subset.iter().map(|&k| support[k]));
        let Some(x) = a.lu().solve(&b) else {
            continue;
        };
        if normals.iter().zip(support).all(|(v, &h)| v.dot(&x) <= h + tol) {
            intern_vertex(&mut vertices, x, tol);
        }
    }
    if vertices.len() < dim + 1 {
        return Err(Error::DegenerateBody("Wulff shape has too few vertices".into()));
    }
    let incidences = normals
        .iter()
        .zip(support)
        .map(|(v, &h)| {
            (0..vertices.len())
                .filter(|&k| (v.dot(&vertices[k]) - h).abs() <= tol)
                .collect()
        })
        .collect();
    Ok((vertices, incidences))
}

fn intern_vertex(vertices: &mut Vec<Vector>, p: Vector, tol: f64) -> usize {
    if let Some(k) = vertices.iter().position(|w| (w - &p).amax() <= tol) {
        return k;
    }
    vertices.push(p);
    vertices.len() - 1
}

fn affine_rank<'a>(points: impl Iterator<Item = &'a Vector>, scale: f64) -> usize {
    let pts: Vec<&Vector> = points.collect();
    let Some(base) = pts.first() else {
        return 0;
    };
    if pts.len() == 1 {
        return 0;
    }
    let dim = base.len();
    let diffs = Matrix::from_fn(pts.len() - 1, dim, |r, c| pts[r + 1][c] - base[c]);
    let svd = diffs.svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > GEOM_TOL * scale.max(1e-300)).count()
}

/// Orders a facet's vertices counter-clockwise as seen from outside.
fn order_cycle(cycle: &mut [usize], vertices: &[Vector], normal: &UnitDirection) {
    let dim = normal.dim();
    if cycle.len() < 2 || dim > 3 {
        return;
    }
    if dim == 2 {
        let tangent = [-normal[1], normal[0]];
        let key = |k: &usize| vertices[*k][0] * tangent[0] + vertices[*k][1] * tangent[1];
        cycle.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(Ordering::Equal));
        return;
    }
    let n = normal.fixed_rows::<3>(0).into_owned();
    let centroid = cycle
        .iter()
        .fold(nalgebra::Vector3::zeros(), |acc, &k| acc + vertices[k].fixed_rows::<3>(0))
        / cycle.len() as f64;
    let e1 = (vertices[cycle[0]].fixed_rows::<3>(0) - centroid).normalize();
    let e2 = n.cross(&e1);
    let angle = |k: &usize| {
        let d = vertices[*k].fixed_rows::<3>(0) - centroid;
        d.dot(&e2).atan2(d.dot(&e1))
    };
    cycle.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap_or(Ordering::Equal));
}

impl HPolytope {
    /// Wulff shape of the data, with redundant halfspaces removed.
    pub fn new(normals: Vec<UnitDirection>, support: Vec<f64>) -> Result<Self> {
        Ok(wulff_shape(&normals, &support)?.polytope)
    }

    /// Like [`HPolytope::new`] but normalizes raw normal vectors first.
    pub fn from_raw(normals: &[Vec<f64>], support: &[f64]) -> Result<Self> {
        let normals = normals
            .iter()
            .map(|c| UnitDirection::from_slice(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(normals, support.to_vec())
    }

    /// The cube `[-a, a]^n`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        let mut normals = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            for sign in [1.0, -1.0] {
                let mut e = Vector::zeros(dim);
                e[axis] = sign;
                normals.push(UnitDirection::new_unchecked(e));
            }
        }
        Self::new(normals, vec![half_width; 2 * dim])
    }

    /// The cross-polytope `{x : Σ|x_i| ≤ r}`.
    pub fn cross_polytope(dim: usize, radius: f64) -> Result<Self> {
        let mut normals = Vec::with_capacity(1 << dim);
        for signs in 0..(1usize << dim) {
            let v = Vector::from_fn(dim, |i, _| if signs >> i & 1 == 1 { -1.0 } else { 1.0 });
            normals.push(UnitDirection::new(v)?);
        }
        let h = radius / (dim as f64).sqrt();
        Self::new(normals, vec![h; 1 << dim])
    }

    /// Regular polygon circumscribed about the circle of radius `inradius`,
    /// with normals at angles `offset + 2πk/m`.
    pub fn regular_polygon(m: usize, inradius: f64, offset: f64) -> Result<Self> {
        let normals = (0..m)
            .map(|k| UnitDirection::from_angle(offset + 2.0 * std::f64::consts::PI * k as f64 / m as f64))
            .collect();
        Self::new(normals, vec![inradius; m])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of facets.
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[UnitDirection] {
        &self.normals
    }

    pub fn support_numbers(&self) -> &[f64] {
        &self.support
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Vertex indices of facet `i`, counter-clockwise seen from outside
    /// (n ≤ 3; unordered otherwise).
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.facet_vertices[i]
    }

    /// Index into the construction input for each stored facet.
    pub fn source_indices(&self) -> &[usize] {
        &self.source
    }

    /// Radial function `min_{x·v_i > 0} h_i / (x·v_i)`.
    pub fn radial(&self, x: &Vector) -> f64 {
        self.normals
            .iter()
            .zip(&self.support)
            .filter_map(|(v, &h)| {
                let d = v.dot(x);
                (d > 0.0).then(|| h / d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Support function, evaluated as `1/ρ` of the polar body. The polar of
    /// `[h]` is `conv{v_i/h_i}` whose facets are the vertices `w` of this
    /// polytope, so `1/ρ_polar(x) = max_w x·w`.
    pub fn support(&self, x: &Vector) -> f64 {
        self.vertices.iter().map(|w| w.dot(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Facet hit by the ray through `u`; ties go to the lowest facet index.
    pub fn radial_gauss(&self, u: &Vector) -> usize {
        let mut best = usize::MAX;
        let mut best_ratio = f64::INFINITY;
        for (i, (v, &h)) in self.normals.iter().zip(&self.support).enumerate() {
            let d = v.dot(u);
            if d <= 0.0 {
                continue;
            }
            let ratio = h / d;
            if best == usize::MAX || ratio < best_ratio * (1.0 - 1e-12) {
                best = i;
                best_ratio = ratio;
            }
        }
        best
    }

    /// `λ P`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            normals: self.normals.clone(),
            support: self.support.iter().map(|h| h * factor).collect(),
            vertices: self.vertices.iter().map(|w| w * factor).collect(),
            facet_vertices: self.facet_vertices.clone(),
            source: self.source.clone(),
        }
    }

    /// `φ P` for invertible `φ` (inverse supplied by the caller).
    pub fn linear_image(&self, inverse: &Matrix) -> Result<Self> {
        let inv_t = inverse.transpose();
        let mut normals = Vec::with_capacity(self.len());
        let mut support = Vec::with_capacity(self.len());
        for (v, &h) in self.normals.iter().zip(&self.support) {
            let w = &inv_t * v.as_vector();
            let norm = w.norm();
            normals.push(UnitDirection::new(w)?);
            support.push(h / norm);
        }
        Self::new(normals, support)
    }

    /// Vertices `v_i / h_i` of the polar body.
    pub fn polar_vertices(&self) -> Vec<Vector> {
        self.normals.iter().zip(&self.support).map(|(v, &h)| v.as_vector() / h).collect()
    }

    /// The polar body as an H-polytope: one facet per vertex `w`, with normal
    /// `w/|w|` and support number `1/|w|`.
    pub fn polar(&self) -> Result<Self> {
        let normals = self
            .vertices
            .iter()
            .map(|w| UnitDirection::new(w.clone()))
            .collect::<Result<Vec<_>>>()?;
        let support = self.vertices.iter().map(|w| 1.0 / w.norm()).collect();
        Self::new(normals, support)
    }

    /// (n-1)-volume of facet `i` (n = 2 or 3).
    pub fn facet_area(&self, i: usize) -> Result<f64> {
        let cycle = &self.facet_vertices[i];
        match self.dim {
            2 => Ok((&self.vertices[cycle[1]] - &self.vertices[cycle[0]]).norm()),
            3 => {
                let p = |k: usize| self.vertices[cycle[k]].fixed_rows::<3>(0).into_owned();
                let mut area = nalgebra::Vector3::zeros();
                for k in 1..cycle.len().saturating_sub(1) {
                    area += (p(k) - p(0)).cross(&(p(k + 1) - p(0)));
                }
                Ok(0.5 * area.norm())
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Volume as a sum of facet pyramids, `(1/n) Σ h_i area_i`.
    pub fn volume(&self) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..self.len() {
            total += self.support[i] * self.facet_area(i)?;
        }
        Ok(total / self.dim as f64)
    }

    /// Antipodally symmetric normal set with equal support numbers on pairs.
    pub fn is_origin_symmetric(&self) -> bool {
        (0..self.len()).all(|i| {
            (0..self.len()).any(|k| {
                self.normals[i].dot(&self.normals[k]) <= -1.0 + DUPLICATE_TOL
                    && (self.support[i] - self.support[k]).abs() <= 1e-12 * self.support[i]
            })
        })
    }
}

/// Convex hull of finitely many points, stored with its facet description.
#[derive(Clone, Debug)]
pub struct VPolytope {
    points: Vec<Vector>,
    hull: HPolytope,
}

impl VPolytope {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::DegenerateBody("empty vertex list".into()));
        };
        let dim = first.len();
        for p in &points {
            check_dim(dim, p.len())?;
            super::vector::check_finite(p)?;
        }
        let facets = hull_facets(&points);
        if facets.is_empty() {
            return Err(Error::DegenerateBody("points are not full-dimensional".into()));
        }
        if let Some(f) = facets.iter().find(|f| !(f.offset > GEOM_TOL)) {
            return Err(Error::DegenerateBody(format!(
                "origin is not interior to the hull (facet offset {:.3e})",
                f.offset
            )));
        }
        let normals = facets.iter().map(|f| f.normal.clone()).collect();
        let support = facets.iter().map(|f| f.offset).collect();
        let hull = HPolytope::new(normals, support)?;
        Ok(Self { points, hull })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn hull(&self) -> &HPolytope {
        &self.hull
    }

    /// `max_k x·p_k`.
    pub fn support(&self, x: &Vector) -> f64 {
        self.points.iter().map(|p| p.dot(x)).fold(f64::NEG_INFINITY, f64::max)
    }
}
