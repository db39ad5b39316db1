//! Quadrature on the unit sphere `S^{n-1}`.
//!
//! Integrands in this crate are piecewise smooth: radial functions of
//! polytopes and the radial Gauss map jump or kink along facet cone
//! boundaries. [`adapted_grid`] places those boundaries between nodes (exactly
//! in dimensions 2 and 3) so that per-piece Gauss rules converge spectrally.

mod partition;
mod rules;

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, Body, HPolytope, Vector};
use crate::par::{compensated_sum, map_indexed};

pub(crate) use partition::{clip_halfspace, facet_cones, MAX_EDGE};
pub(crate) use rules::gauss_legendre;

/// Grid family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Cone-partitioned when a polytope is involved, smooth product rules
    /// otherwise, Monte Carlo for n ≥ 4.
    Auto,
    UniformAngle,
    ProductGauss,
    #[serde(rename = "mc", alias = "monte-carlo")]
    MonteCarlo,
    ConePartitioned,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Auto => "auto",
            Scheme::UniformAngle => "uniform-angle",
            Scheme::ProductGauss => "product-gauss",
            Scheme::MonteCarlo => "mc",
            Scheme::ConePartitioned => "cone-partitioned",
        }
    }
}

/// Serialized grid request: `{"scheme": "auto", "resolution": 32, "seed": 0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub scheme: Scheme,
    pub resolution: usize,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { scheme: Scheme::Auto, resolution: 32, seed: 0 }
    }
}

impl GridConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        GridConfig { resolution, ..Default::default() }
    }

    /// Same request at half resolution, used for error estimates.
    pub fn coarse(&self) -> Self {
        GridConfig { resolution: (self.resolution / 2).max(2), ..*self }
    }

    pub fn refined(&self) -> Self {
        GridConfig { resolution: self.resolution * 2, ..*self }
    }

    /// Grid for an integrand built from `bodies`. The first body, when
    /// polytopal, owns the cone cache.
    pub fn grid(&self, bodies: &[&Body]) -> Result<SphericalGrid> {
        self.grid_with_breaks(bodies, &[])
    }

    /// Like [`GridConfig::grid`], with additional planar break angles.
    pub fn grid_with_breaks(&self, bodies: &[&Body], breaks: &[f64]) -> Result<SphericalGrid> {
        let Some(first) = bodies.first() else {
            return Err(Error::InvalidParameter("grid request without bodies".into()));
        };
        let dim = first.dim();
        match self.scheme {
            Scheme::Auto | Scheme::ConePartitioned => adapted(bodies, breaks, self.resolution, self.seed),
            scheme => {
                let grid = build_grid(dim, self.resolution, scheme, self.seed)?;
                Ok(match first.as_polytope() {
                    Some(p) => grid.with_owner(p),
                    None => grid,
                })
            }
        }
    }
}

/// Nodes and positive weights on `S^{n-1}`, optionally tagged with the facet
/// cone of an owner polytope that contains each node.
#[derive(Clone, Debug)]
pub struct SphericalGrid {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
    scheme: Scheme,
    seed: Option<u64>,
    owner: Option<HPolytope>,
    cones: Vec<usize>,
}

impl SphericalGrid {
    fn from_parts(dim: usize, pairs: Vec<(Vector, f64)>, scheme: Scheme, seed: Option<u64>) -> Self {
        let (nodes, weights) = pairs.into_iter().unzip();
        SphericalGrid { dim, nodes, weights, scheme, seed, owner: None, cones: Vec::new() }
    }

    /// Tags every node with its radial Gauss facet in `p`.
    pub fn with_owner(mut self, p: &HPolytope) -> Self {
        self.cones = map_indexed(self.nodes.len(), |k| p.radial_gauss(&self.nodes[k]));
        self.owner = Some(p.clone());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Cached cone index of node `k`, if the grid has an owner polytope.
    pub fn cone(&self, k: usize) -> Option<usize> {
        self.cones.get(k).copied()
    }

    /// Whether the cone cache belongs to a polytope with the same facets.
    pub fn is_owned_by(&self, p: &HPolytope) -> bool {
        let Some(owner) = &self.owner else {
            return false;
        };
        owner.len() == p.len()
            && owner.normals().iter().zip(p.normals()).all(|(a, b)| a.dot(b) >= 1.0 - 1e-14)
            && owner
                .support_numbers()
                .iter()
                .zip(p.support_numbers())
                .all(|(a, b)| (a - b).abs() <= 1e-14 * a.abs())
    }

    /// Evaluates `f(k, u_k)` at every node (possibly in parallel).
    pub fn values<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, &Vector) -> f64 + Sync + Send,
    {
        let values = map_indexed(self.nodes.len(), |k| f(k, &self.nodes[k]));
        match values.iter().position(|v| !v.is_finite()) {
            Some(node) => Err(Error::NonFiniteIntegrand { node }),
            None => Ok(values),
        }
    }

    /// `Σ w_k f(k, u_k)` with compensated summation in node order.
    pub fn integrate_indexed<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(usize, &Vector) -> f64 + Sync + Send,
    {
        let values = self.values(f)?;
        Ok(compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w)))
    }

    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Vector) -> f64 + Sync + Send,
    {
        self.integrate_indexed(|_, u| f(u))
    }

    /// Integrals of `f` over each owner cone, indexed by facet.
    pub fn cone_integrals<F>(&self, facets: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, &Vector) -> f64 + Sync + Send,
    {
        if self.cones.len() != self.nodes.len() {
            return Err(Error::InvalidParameter("grid has no cone cache".into()));
        }
        let values = self.values(f)?;
        let mut buckets = vec![Vec::new(); facets];
        for (k, v) in values.iter().enumerate() {
            buckets[self.cones[k]].push(v * self.weights[k]);
        }
        Ok(buckets.into_iter().map(compensated_sum).collect())
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    Ok(())
}

/// Fixed grids without any adaptation.
///
/// `uniform-angle` (n = 2) uses `resolution` equally spaced angles,
/// `product-gauss` (n = 3) uses `resolution` Gauss–Legendre nodes in the
/// cosine of the angle to `e_1` times `2·resolution` equally spaced azimuths,
/// and `mc` draws `resolution` uniform directions from a ChaCha stream.
pub fn build_grid(n: usize, resolution: usize, scheme: Scheme, seed: u64) -> Result<SphericalGrid> {
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    check_resolution(resolution)?;
    match (scheme, n) {
        (Scheme::UniformAngle, 2) => Ok(uniform_circle(resolution)),
        (Scheme::ProductGauss, 3) => Ok(product_sphere(resolution, &[])),
        (Scheme::MonteCarlo, _) => Ok(monte_carlo(n, resolution, seed)),
        (Scheme::Auto, 2) => Ok(uniform_circle(resolution)),
        (Scheme::Auto, 3) => Ok(product_sphere(resolution, &[])),
        (Scheme::Auto, _) => Ok(monte_carlo(n, resolution, seed)),
        (scheme, dim) => Err(Error::UnsupportedScheme { scheme: scheme.name(), dim }),
    }
}

fn uniform_circle(count: usize) -> SphericalGrid {
    let w = 2.0 * PI / count as f64;
    let pairs = (0..count)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / count as f64;
            (Vector::from_vec(vec![t.cos(), t.sin()]), w)
        })
        .collect();
    SphericalGrid::from_parts(2, pairs, Scheme::UniformAngle, None)
}

/// Product rule with the polar axis along `e_1`; `breaks` split the range of
/// `u_1` into separately integrated bands.
fn product_sphere(resolution: usize, breaks: &[f64]) -> SphericalGrid {
    let mut cuts = vec![-1.0];
    cuts.extend(breaks.iter().copied().filter(|&t| t > -1.0 + 1e-12 && t < 1.0 - 1e-12));
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let azimuths = 2 * resolution;
    let dphi = 2.0 * PI / azimuths as f64;
    let mut pairs = Vec::new();
    for band in cuts.windows(2) {
        for (t, wt) in gauss_legendre(resolution, band[0], band[1]) {
            let s = (1.0 - t * t).max(0.0).sqrt();
            for k in 0..azimuths {
                let phi = (k as f64 + 0.5) * dphi;
                pairs.push((Vector::from_vec(vec![t, s * phi.cos(), s * phi.sin()]), wt * dphi));
            }
        }
    }
    SphericalGrid::from_parts(3, pairs, Scheme::ProductGauss, None)
}

fn monte_carlo(n: usize, count: usize, seed: u64) -> SphericalGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = sphere_area(n) / count as f64;
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let v = Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let r = v.norm();
        if r > 1e-12 {
            pairs.push((v / r, w));
        }
    }
    SphericalGrid::from_parts(n, pairs, Scheme::MonteCarlo, Some(seed))
}

/// Longest arc handed to a single Gauss rule in the plane.
const MAX_ARC: f64 = PI / 8.0;

/// Grid aligned with the non-smooth loci of every body's radial function
/// (and, for polytopes, the radial Gauss map).
///
/// In the plane the circle is cut at all kink angles and each arc carries a
/// Gauss rule of order `resolution`; smooth planar integrands get
/// `16·resolution` equally spaced nodes. On `S^2` polytopes are overlaid into
/// a cone partition; smooth bodies use a product rule banded at latitude
/// kinks. Dimensions n ≥ 4 fall back to Monte Carlo.
pub fn adapted_grid(bodies: &[&Body], resolution: usize, seed: u64) -> Result<SphericalGrid> {
    adapted(bodies, &[], resolution, seed)
}

fn adapted(bodies: &[&Body], breaks: &[f64], resolution: usize, seed: u64) -> Result<SphericalGrid> {
    check_resolution(resolution)?;
    let Some(first) = bodies.first() else {
        return Err(Error::InvalidParameter("grid request without bodies".into()));
    };
    let dim = first.dim();
    for b in bodies {
        crate::geometry::check_dim(dim, b.dim())?;
    }
    let owner = first.as_polytope();
    let grid = match dim {
        2 => {
            let mut kinks: Vec<f64> = bodies.iter().flat_map(|b| b.kink_angles()).collect();
            kinks.extend(breaks.iter().map(|t| t.rem_euclid(2.0 * PI)));
            if kinks.is_empty() {
                uniform_circle(16 * resolution)
            } else {
                kinks.sort_by(f64::total_cmp);
                kinks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
                arc_grid(&kinks, resolution)
            }
        }
        3 => {
            let mut polys = Vec::new();
            for b in bodies {
                b.partition_polytopes(&mut polys);
            }
            if polys.is_empty() {
                let breaks: Vec<f64> = bodies.iter().flat_map(|b| b.latitude_breaks()).collect();
                product_sphere(resolution, &breaks)
            } else {
                let rule = gauss_legendre(triangle_order(resolution), 0.0, 1.0);
                let (pairs, tags) = partition::cone_nodes(&polys, &rule);
                let pairs = pairs.into_iter().map(|(u, w)| (Vector::from_column_slice(u.as_slice()), w)).collect();
                let mut grid = SphericalGrid::from_parts(3, pairs, Scheme::ConePartitioned, None);
                if owner.is_some() {
                    grid.cones = tags;
                    grid.owner = owner.cloned();
                }
                return Ok(grid);
            }
        }
        _ => monte_carlo(dim, resolution.max(1), seed),
    };
    Ok(match owner {
        Some(p) => grid.with_owner(p),
        None => grid,
    })
}

/// Gauss order per triangle side for a given resolution on `S^2`.
pub(crate) fn triangle_order(resolution: usize) -> usize {
    (resolution / 4).clamp(3, 16)
}

fn arc_grid(kinks: &[f64], resolution: usize) -> SphericalGrid {
    let mut pairs = Vec::new();
    for (i, &a) in kinks.iter().enumerate() {
        let b = if i + 1 < kinks.len() { kinks[i + 1] } else { kinks[0] + 2.0 * PI };
        let pieces = ((b - a) / MAX_ARC).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        for s in 0..pieces {
            let lo = a + s as f64 * step;
            for (t, w) in gauss_legendre(resolution, lo, lo + step) {
                pairs.push((Vector::from_vec(vec![t.cos(), t.sin()]), w));
            }
        }
    }
    SphericalGrid::from_parts(2, pairs, Scheme::ConePartitioned, None)
}

/// Grid split along the facet cones of `p`, with the cone cache set.
pub fn cone_partitioned_grid(p: &HPolytope, resolution: usize) -> Result<SphericalGrid> {
    adapted_grid(&[&Body::PolytopeH(p.clone())], resolution, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball_volume;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_sphere_area() {
        assert_relative_eq!(build_grid(2, 4, Scheme::UniformAngle, 0).unwrap().total_weight(), 2.0 * PI);
        assert_relative_eq!(build_grid(3, 9, Scheme::ProductGauss, 0).unwrap().total_weight(), 4.0 * PI, epsilon = 1e-12);
        let mc = build_grid(4, 100, Scheme::MonteCarlo, 3).unwrap();
        assert_relative_eq!(mc.total_weight(), sphere_area(4), epsilon = 1e-12);
        assert!(matches!(build_grid(4, 10, Scheme::ProductGauss, 0), Err(Error::UnsupportedScheme { .. })));
    }

    #[test]
    fn square_area_from_partitioned_grid() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let grid = cone_partitioned_grid(&sq, 16).unwrap();
        let area = grid.integrate(|u| sq.radial(u).powi(2)).unwrap() / 2.0;
        assert_relative_eq!(area, 4.0, epsilon = 1e-12);
        let per_cone = grid.cone_integrals(4, |_, _| 1.0).unwrap();
        for w in per_cone {
            assert_relative_eq!(w, PI / 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn cube_volume_from_partitioned_grid() {
        let cube = HPolytope::cube(3, 1.0).unwrap();
        let grid = cone_partitioned_grid(&cube, 32).unwrap();
        let vol = grid.integrate(|u| cube.radial(u).powi(3)).unwrap() / 3.0;
        assert_relative_eq!(vol, 8.0, epsilon = 1e-9);
        assert_relative_eq!(grid.total_weight(), 4.0 * PI, epsilon = 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let grid = build_grid(2, 8, Scheme::UniformAngle, 0).unwrap();
        let err = grid.integrate_indexed(|k, _| if k == 3 { f64::NAN } else { 1.0 }).unwrap_err();
        assert_eq!(err, Error::NonFiniteIntegrand { node: 3 });
    }

    #[test]
    fn smooth_ball_integrals() {
        let b = Body::unit_ball(3);
        let grid = adapted_grid(&[&b], 16, 0).unwrap();
        assert_relative_eq!(grid.integrate(|u| b.rho(u).powi(3)).unwrap() / 3.0, ball_volume(3), epsilon = 1e-12);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = build_grid(5, 50, Scheme::MonteCarlo, 11).unwrap();
        let b = build_grid(5, 50, Scheme::MonteCarlo, 11).unwrap();
        assert_eq!(a.nodes(), b.nodes());
    }
}
