//! (p,q)-dual mixed curvature measures.
//!
//! For a polytope `M` with facet normals `v_i` the measure is discrete:
//!
//! ```text
//! C̃_{p,q,j}(M,Q,{v_i}) = (1/n) h_i^{-p} ∫_{Δ_i} ρ_M^q ρ_Q^{n-q-j} du
//! ```
//!
//! where `Δ_i` is the spherical trace of the cone over facet `i`. The
//! boundary form integrates `(x·ν)^{1-p} |x|^{-j} ‖x‖_Q^{q+j-n}` over the
//! facets instead and serves as an independent check.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{Body, HPolytope, UnitDirection, Vector, DUPLICATE_TOL};
use crate::quadrature::{clip_halfspace, facet_cones, gauss_legendre, GridConfig, SphericalGrid, MAX_EDGE};

/// Parameters `(p, q, j)` and the star body `Q` of `C̃_{p,q,j}(·, Q, ·)`.
#[derive(Clone, Debug)]
pub struct MeasureParams {
    pub p: f64,
    pub q: f64,
    pub j: f64,
    pub q_body: Body,
}

impl MeasureParams {
    pub fn new(p: f64, q: f64, j: f64, q_body: Body) -> Self {
        MeasureParams { p, q, j, q_body }
    }

    /// Exponent of `ρ_Q` in the spherical integrand.
    pub fn q_exponent(&self) -> f64 {
        self.q_body.dim() as f64 - self.q - self.j
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        crate::geometry::check_dim(dim, self.q_body.dim())?;
        if !(self.p.is_finite() && self.q.is_finite() && self.j.is_finite()) {
            return Err(Error::InvalidParameter("p, q and j must be finite".into()));
        }
        if self.j == dim as f64 {
            return Err(Error::InvalidParameter(format!("j must differ from the dimension {dim}")));
        }
        Ok(())
    }

    /// `ρ_M^q ρ_Q^{n-q-j}` at `u`.
    pub(crate) fn density(&self, rho_m: f64, u: &Vector) -> f64 {
        rho_m.powf(self.q) * self.q_body.rho(u).powf(self.q_exponent())
    }
}

/// A single atom `(v, mass)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub normal: UnitDirection,
    pub mass: f64,
}

/// Finite measure on the sphere with pairwise distinct atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSphericalMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl DiscreteSphericalMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidParameter("measure has no atoms".into()));
        };
        let dim = first.normal.dim();
        for (k, a) in atoms.iter().enumerate() {
            crate::geometry::check_dim(dim, a.normal.dim())?;
            if !(a.mass.is_finite() && a.mass >= 0.0) {
                return Err(Error::InvalidParameter(format!("atom {k} has invalid mass {}", a.mass)));
            }
            for (l, b) in atoms[..k].iter().enumerate() {
                if a.normal.dot(&b.normal) >= 1.0 - DUPLICATE_TOL {
                    return Err(Error::DuplicateNormals { first: l, second: k });
                }
            }
        }
        Ok(DiscreteSphericalMeasure { dim, atoms })
    }

    pub fn from_parts(normals: &[UnitDirection], masses: &[f64]) -> Result<Self> {
        crate::geometry::check_dim(normals.len(), masses.len())?;
        Self::new(normals.iter().zip(masses).map(|(n, &m)| Atom { normal: n.clone(), mass: m }).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn normals(&self) -> Vec<UnitDirection> {
        self.atoms.iter().map(|a| a.normal.clone()).collect()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn total(&self) -> f64 {
        crate::par::compensated_sum(self.atoms.iter().map(|a| a.mass))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DiscreteSphericalMeasure {
            dim: self.dim,
            atoms: self.atoms.iter().map(|a| Atom { normal: a.normal.clone(), mass: a.mass * factor }).collect(),
        }
    }
}

/// Grid suited to `C̃_{p,q,j}(M, Q, ·)`: split along the cones of `M` and of
/// `Q` when polytopal, with the cone cache owned by `M`.
pub fn measure_grid(m: &HPolytope, params: &MeasureParams, config: &GridConfig) -> Result<SphericalGrid> {
    let body = Body::PolytopeH(m.clone());
    config.grid(&[&body, &params.q_body])
}

/// Atoms of `C̃_{p,q,j}(M, Q, ·)` on a grid whose cone cache belongs to `M`.
pub fn curvature_measure_polytope(
    m: &HPolytope,
    params: &MeasureParams,
    grid: &SphericalGrid,
) -> Result<DiscreteSphericalMeasure> {
    let masses = cone_masses(m, params, grid)?;
    DiscreteSphericalMeasure::from_parts(m.normals(), &masses)
}

fn cone_masses(m: &HPolytope, params: &MeasureParams, grid: &SphericalGrid) -> Result<Vec<f64>> {
    params.validate(m.dim())?;
    if !grid.is_owned_by(m) {
        return Err(Error::InvalidParameter("grid is not cone-partitioned for this polytope".into()));
    }
    let n = m.dim() as f64;
    let integrals = grid.cone_integrals(m.len(), |_, u| params.density(m.radial(u), u))?;
    Ok(integrals
        .iter()
        .zip(m.support_numbers())
        .map(|(&s, &h)| h.powf(-params.p) * s / n)
        .collect())
}

/// Measure plus the largest atom change against a half-resolution grid.
pub fn curvature_measure(
    m: &HPolytope,
    params: &MeasureParams,
    config: &GridConfig,
) -> Result<(DiscreteSphericalMeasure, f64)> {
    let fine = curvature_measure_polytope(m, params, &measure_grid(m, params, config)?)?;
    let coarse = cone_masses(m, params, &measure_grid(m, params, &config.coarse())?)?;
    let err = fine.atoms().iter().zip(&coarse).map(|(a, c)| (a.mass - c).abs()).fold(0.0, f64::max);
    Ok((fine, err))
}

/// `∫ g dC̃_{p,q,j}(M, Q, ·)` in spherical form, with `α_M` taken from the cone
/// cache when the grid has one for `M` and from [`Body::gauss_normal`]
/// otherwise.
pub fn curvature_functional<G>(m: &Body, params: &MeasureParams, g: G, grid: &SphericalGrid) -> Result<f64>
where
    G: Fn(&Vector) -> f64 + Sync + Send,
{
    params.validate(m.dim())?;
    let n = m.dim() as f64;
    if let Some(poly) = m.as_polytope().filter(|p| grid.is_owned_by(p)) {
        let normals = poly.normals();
        let support = poly.support_numbers();
        let s = grid.integrate_indexed(|k, u| {
            let i = grid.cone(k).expect("owned grid has cones");
            g(&normals[i]) * support[i].powf(-params.p) * params.density(poly.radial(u), u)
        })?;
        return Ok(s / n);
    }
    if !m.is_convex() {
        return Err(Error::NonConvexBody);
    }
    let normals = grid
        .nodes()
        .iter()
        .map(|u| m.gauss_normal(u))
        .collect::<Result<Vec<_>>>()?;
    let s = grid.integrate_indexed(|k, u| {
        let (nu, h) = &normals[k];
        g(nu) * h.powf(-params.p) * params.density(m.rho(u), u)
    })?;
    Ok(s / n)
}

/// `(1/n) ∫_{∂M} g(ν) (x·ν)^{1-p} |x|^{-j} ‖x‖_Q^{q+j-n} dH^{n-1}` by Gauss
/// rules on the facets of `M`, which are first cut along the cones of `Q`
/// when `Q` is polytopal. `density` is the Gauss order per piece.
pub fn curvature_boundary_oracle<G>(m: &HPolytope, params: &MeasureParams, g: G, density: usize) -> Result<f64>
where
    G: Fn(&Vector) -> f64,
{
    params.validate(m.dim())?;
    let n = m.dim();
    let exp_q = params.q + params.j - n as f64;
    let radial = |x: &Vector| x.norm().powf(-params.j) * (1.0 / params.q_body.rho(x)).powf(exp_q);
    let mut total = 0.0;
    match n {
        2 => {
            let kinks = params.q_body.kink_angles();
            for i in 0..m.len() {
                let cycle = m.facet_vertices(i);
                let (a, b) = (&m.vertices()[cycle[0]], &m.vertices()[cycle[1]]);
                let d = b - a;
                let mut cuts = vec![0.0, 1.0];
                for &theta in &kinks {
                    let e = UnitDirection::from_angle(theta).into_vector();
                    let den = d[0] * e[1] - d[1] * e[0];
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let t = -(a[0] * e[1] - a[1] * e[0]) / den;
                    if t > 1e-14 && t < 1.0 - 1e-14 && (a + &d * t).dot(&e) > 0.0 {
                        cuts.push(t);
                    }
                }
                cuts.sort_by(f64::total_cmp);
                let mut facet = 0.0;
                for w in cuts.windows(2) {
                    let (pa, pb) = (a + &d * w[0], a + &d * w[1]);
                    let pieces = (pa.angle(&pb) / (std::f64::consts::PI / 8.0)).ceil().max(1.0) as usize;
                    let (t0, dt) = (w[0], (w[1] - w[0]) / pieces as f64);
                    for s in 0..pieces {
                        let lo = t0 + s as f64 * dt;
                        for (t, wt) in gauss_legendre(density, lo, lo + dt) {
                            facet += wt * radial(&(a + &d * t));
                        }
                    }
                }
                let h = m.support_numbers()[i];
                total += g(&m.normals()[i]) * h.powf(1.0 - params.p) * d.norm() * facet;
            }
        }
        3 => {
            let mut q_polys = Vec::new();
            params.q_body.partition_polytopes(&mut q_polys);
            let q_cones: Vec<Vec<Vec<Vector3<f64>>>> = q_polys.iter().map(|p| facet_cones(p)).collect();
            let rule = gauss_legendre(density, 0.0, 1.0);
            for i in 0..m.len() {
                let face: Vec<Vector3<f64>> = m
                    .facet_vertices(i)
                    .iter()
                    .map(|&k| {
                        let v = &m.vertices()[k];
                        Vector3::new(v[0], v[1], v[2])
                    })
                    .collect();
                let mut pieces = vec![face];
                for cones in &q_cones {
                    let mut next = Vec::new();
                    for piece in &pieces {
                        for cone in cones {
                            let mut part = piece.clone();
                            for k in 0..cone.len() {
                                if part.len() < 3 {
                                    break;
                                }
                                part = clip_halfspace(&part, &cone[k].cross(&cone[(k + 1) % cone.len()]), false);
                            }
                            if part.len() >= 3 && polygon_area(&part) > 1e-14 * polygon_area(piece) {
                                next.push(part);
                            }
                        }
                    }
                    pieces = next;
                }
                let mut facet = 0.0;
                for piece in &pieces {
                    let centre = piece.iter().fold(Vector3::zeros(), |acc, v| acc + v) / piece.len() as f64;
                    for k in 0..piece.len() {
                        facet += flat_triangle(&centre, &piece[k], &piece[(k + 1) % piece.len()], &rule, &radial, 0);
                    }
                }
                let h = m.support_numbers()[i];
                total += g(&m.normals()[i]) * h.powf(1.0 - params.p) * facet;
            }
        }
        _ => return Err(Error::UnsupportedDimension(n)),
    }
    if !total.is_finite() {
        return Err(Error::NonFiniteIntegrand { node: 0 });
    }
    Ok(total / n as f64)
}

fn polygon_area(poly: &[Vector3<f64>]) -> f64 {
    (1..poly.len() - 1).map(|k| 0.5 * (poly[k] - poly[0]).cross(&(poly[k + 1] - poly[0])).norm()).sum()
}

fn flat_triangle<F>(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, rule: &[(f64, f64)], f: &F, depth: usize) -> f64
where
    F: Fn(&Vector) -> f64,
{
    let longest = a.angle(b).max(b.angle(c)).max(c.angle(a));
    if longest > MAX_EDGE && depth < 8 {
        let (ab, bc, ca) = ((a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0);
        return flat_triangle(a, &ab, &ca, rule, f, depth + 1)
            + flat_triangle(&ab, b, &bc, rule, f, depth + 1)
            + flat_triangle(&ca, &bc, c, rule, f, depth + 1)
            + flat_triangle(&ab, &bc, &ca, rule, f, depth + 1);
    }
    let (ea, eb) = (a - c, b - c);
    let jac = ea.cross(&eb).norm();
    let mut s = 0.0;
    for &(x, wx) in rule {
        for &(y, wy) in rule {
            let p = c + ea * x + eb * ((1.0 - x) * y);
            s += wx * wy * (1.0 - x) * f(&Vector::from_column_slice(p.as_slice()));
        }
    }
    s * jac
}

/// Residuals of the special cases of the measure.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpecialCaseReport {
    /// Largest relative spread between `C̃_{p,q,0}(M,M,·)` over several `q`,
    /// `C̃_{p,n,0}(M,B,·)` and `(1/n) h_i^{1-p} |F_i|`.
    pub surface_area_identity: f64,
    /// Largest relative gap between `C̃_{0,q,j}(M,Q,·)` and the unweighted
    /// measure `C̃_{q,j}(M,Q,·)` evaluated with explicit cone indicators.
    pub p_zero_identity: f64,
}

/// Checks the two reductions of the measure on a polytope: taking `Q = M`
/// (or `q = n`, `Q = B`) at `j = 0` collapses the atoms to the L_p surface
/// area measure over `n`, and `p = 0` removes the support weight.
pub fn special_case_suite(m: &HPolytope, q_body: &Body, p: f64, q: f64, j: f64, config: &GridConfig) -> Result<SpecialCaseReport> {
    let n = m.dim();
    let m_body = Body::PolytopeH(m.clone());
    let reference: Vec<f64> = (0..m.len())
        .map(|i| Ok(m.support_numbers()[i].powf(1.0 - p) * m.facet_area(i)? / n as f64))
        .collect::<Result<_>>()?;
    let mut spread: f64 = 0.0;
    let mut compare = |atoms: &DiscreteSphericalMeasure| {
        for (a, r) in atoms.atoms().iter().zip(&reference) {
            spread = spread.max((a.mass - r).abs() / r.abs());
        }
    };
    for qq in [-1.0, 0.5, 2.0, 3.5] {
        let params = MeasureParams::new(p, qq, 0.0, m_body.clone());
        compare(&curvature_measure_polytope(m, &params, &measure_grid(m, &params, config)?)?);
    }
    let ball = MeasureParams::new(p, n as f64, 0.0, Body::unit_ball(n));
    compare(&curvature_measure_polytope(m, &ball, &measure_grid(m, &ball, config)?)?);

    let params = MeasureParams::new(0.0, q, j, q_body.clone());
    let grid = measure_grid(m, &params, config)?;
    let weighted = curvature_measure_polytope(m, &params, &grid)?;
    let mut gap: f64 = 0.0;
    for (i, atom) in weighted.atoms().iter().enumerate() {
        let direct = grid.integrate(|u| {
            if m.radial_gauss(u) == i {
                m.radial(u).powf(q) * q_body.rho(u).powf(n as f64 - q - j)
            } else {
                0.0
            }
        })? / n as f64;
        gap = gap.max((atom.mass - direct).abs() / direct.abs().max(f64::MIN_POSITIVE));
    }
    Ok(SpecialCaseReport { surface_area_identity: spread, p_zero_identity: gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Matrix;
    use approx::assert_relative_eq;

    fn ball_params(p: f64, q: f64, j: f64, n: usize) -> MeasureParams {
        MeasureParams::new(p, q, j, Body::unit_ball(n))
    }

    #[test]
    fn square_atoms_are_one() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        for p in [0.0, 1.0] {
            let params = ball_params(p, 2.0, 0.0, 2);
            let (mu, err) = curvature_measure(&sq, &params, &GridConfig::default()).unwrap();
            for a in mu.atoms() {
                assert_relative_eq!(a.mass, 1.0, epsilon = 1e-13);
            }
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn cube_atoms_are_four_thirds() {
        let cube = HPolytope::cube(3, 1.0).unwrap();
        let params = ball_params(0.0, 3.0, 0.0, 3);
        let (mu, _) = curvature_measure(&cube, &params, &GridConfig::default()).unwrap();
        assert_eq!(mu.len(), 6);
        for a in mu.atoms() {
            assert_relative_eq!(a.mass, 4.0 / 3.0, epsilon = 1e-9);
        }
        assert_relative_eq!(mu.total(), 8.0, epsilon = 1e-8);
    }

    #[test]
    fn homogeneity_in_m() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let params = ball_params(1.0, 2.0, 0.0, 2);
        let cfg = GridConfig::default();
        let (mu, _) = curvature_measure(&sq.scaled(3.0), &params, &cfg).unwrap();
        for a in mu.atoms() {
            assert_relative_eq!(a.mass, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn functional_routes() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let body = Body::PolytopeH(sq.clone());
        let params = ball_params(0.0, 2.0, 0.0, 2);
        let grid = measure_grid(&sq, &params, &GridConfig::default()).unwrap();
        assert_relative_eq!(curvature_functional(&body, &params, |_| 1.0, &grid).unwrap(), 4.0, epsilon = 1e-12);
        let e1 = |v: &Vector| if v[0] > 0.5 { 1.0 } else { 0.0 };
        assert_relative_eq!(curvature_functional(&body, &params, e1, &grid).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(curvature_boundary_oracle(&sq, &params, |_| 1.0, 16).unwrap(), 4.0, epsilon = 1e-12);
        let p1 = ball_params(1.0, 2.0, 0.0, 2);
        assert_relative_eq!(curvature_boundary_oracle(&sq, &p1, |_| 1.0, 16).unwrap(), 4.0, epsilon = 1e-12);
        assert_eq!(curvature_boundary_oracle(&sq, &p1, |_| 0.0, 16).unwrap(), 0.0);
    }

    #[test]
    fn oracle_matches_spherical_route_with_polytopal_q() {
        let m = HPolytope::regular_polygon(5, 1.0, 0.3).unwrap();
        let q = Body::PolytopeH(HPolytope::regular_polygon(3, 0.7, 0.1).unwrap());
        let params = MeasureParams::new(0.7, 1.3, 1.0, q);
        let grid = measure_grid(&m, &params, &GridConfig::default()).unwrap();
        let g = |v: &Vector| 1.0 + v[0] * v[0] + 0.3 * v[1];
        let sph = curvature_functional(&Body::PolytopeH(m.clone()), &params, g, &grid).unwrap();
        let bdy = curvature_boundary_oracle(&m, &params, g, 24).unwrap();
        assert_relative_eq!(sph, bdy, max_relative = 1e-11);
    }

    #[test]
    fn oracle_matches_in_three_dimensions() {
        let phi = Matrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.1, 0.9, 0.3, 0.0, -0.2, 1.2]);
        let cube = HPolytope::cube(3, 1.0).unwrap().linear_image(&phi.try_inverse().unwrap()).unwrap();
        let q = Body::PolytopeH(HPolytope::cross_polytope(3, 1.4).unwrap());
        let params = MeasureParams::new(1.5, 2.0, 1.0, q);
        let grid = measure_grid(&cube, &params, &GridConfig::default()).unwrap();
        let sph = curvature_functional(&Body::PolytopeH(cube.clone()), &params, |v| 2.0 + v[2], &grid).unwrap();
        let bdy = curvature_boundary_oracle(&cube, &params, |v| 2.0 + v[2], 8).unwrap();
        assert_relative_eq!(sph, bdy, max_relative = 1e-8);
    }

    #[test]
    fn special_cases_on_square() {
        let sq = HPolytope::cube(2, 1.0).unwrap();
        let q = Body::ellipsoid(vec![1.0, 2.0]).unwrap();
        let r = special_case_suite(&sq, &q, 1.3, 1.5, 1.0, &GridConfig::default()).unwrap();
        assert!(r.surface_area_identity < 1e-12, "{r:?}");
        assert!(r.p_zero_identity < 1e-12, "{r:?}");
    }
}
