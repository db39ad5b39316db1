//! Dual mixed quermassintegrals and (p,q)-mixed quermassintegrals.
//!
//! ```text
//! W̃_{q,j}(M,Q)       = (1/n) ∫ ρ_M^q ρ_Q^{n-q-j} du
//! W̃_{p,q,j}(M,N,Q)   = (1/n) ∫ (h_N/h_M)^p(α_M(u)) ρ_M^q(u) ρ_Q^{n-q-j}(u) du
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{lp_combination, Body, HPolytope, Matrix, NormalSet, UnitDirection, Vector};
use crate::measure::{curvature_measure, MeasureParams};
use crate::par::compensated_sum;
use crate::quadrature::{GridConfig, SphericalGrid};

/// A computed integral with a half-resolution error estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuermassResult {
    pub value: f64,
    pub error_estimate: f64,
    pub p: f64,
    pub q: f64,
    pub j: f64,
    pub grid: GridConfig,
}

fn check_j(dim: usize, j: f64) -> Result<()> {
    if j == dim as f64 || !j.is_finite() {
        return Err(Error::InvalidParameter(format!("j = {j} is not allowed in dimension {dim}")));
    }
    Ok(())
}

/// Per-node logarithms of the factors of the (p,q)-mixed integrand, so that
/// `W̃_{p,q,j}` for many parameter triples costs one pass over the nodes each.
#[derive(Clone, Debug)]
pub struct QuermassFields {
    dim: usize,
    weights: Vec<f64>,
    ln_ratio: Vec<f64>,
    ln_rho_m: Vec<f64>,
    ln_rho_q: Vec<f64>,
}

impl QuermassFields {
    /// Fields for `(M, N, Q)`. Without `N` the support ratio is 1 and `M`
    /// may be any star body.
    pub fn new(m: &Body, n: Option<&Body>, q_body: &Body, grid: &SphericalGrid) -> Result<Self> {
        let dim = m.dim();
        crate::geometry::check_dim(dim, q_body.dim())?;
        crate::geometry::check_dim(dim, grid.dim())?;
        let ln_ratio = match n {
            None => vec![0.0; grid.len()],
            Some(n) => {
                crate::geometry::check_dim(dim, n.dim())?;
                if !(m.is_convex() && n.is_convex()) {
                    return Err(Error::NonConvexBody);
                }
                log_support_ratio(m, n, grid)?
            }
        };
        let ln_rho_m = grid.values(|_, u| m.rho(u).ln())?;
        let ln_rho_q = grid.values(|_, u| q_body.rho(u).ln())?;
        Ok(QuermassFields { dim, weights: grid.weights().to_vec(), ln_ratio, ln_rho_m, ln_rho_q })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `W̃_{p,q,j}` on the stored fields.
    pub fn value(&self, p: f64, q: f64, j: f64) -> Result<f64> {
        check_j(self.dim, j)?;
        let eq = self.dim as f64 - q - j;
        let s = compensated_sum((0..self.weights.len()).map(|k| {
            self.weights[k] * (p * self.ln_ratio[k] + q * self.ln_rho_m[k] + eq * self.ln_rho_q[k]).exp()
        }));
        if !s.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        Ok(s / self.dim as f64)
    }
}

/// `ln(h_N/h_M)(α_M(u))` at every node.
fn log_support_ratio(m: &Body, n: &Body, grid: &SphericalGrid) -> Result<Vec<f64>> {
    if let Some(poly) = m.as_polytope() {
        let per_facet: Vec<f64> = poly
            .normals()
            .iter()
            .zip(poly.support_numbers())
            .map(|(v, h)| (n.h(v) / h).ln())
            .collect();
        if grid.is_owned_by(poly) {
            return Ok((0..grid.len()).map(|k| per_facet[grid.cone(k).expect("owned grid")]).collect());
        }
        return Ok(grid.nodes().iter().map(|u| per_facet[poly.radial_gauss(u)]).collect());
    }
    grid.nodes()
        .iter()
        .map(|u| {
            let (nu, h) = m.gauss_normal(u)?;
            Ok((n.h(&nu) / h).ln())
        })
        .collect()
}

/// Planar angles `u` where `α_M(u)` crosses a facet normal of `N`,
/// i.e. where `h_N ∘ α_M` has a kink. Only needed when `M` is smooth.
pub fn gauss_preimage_breaks(m: &Body, n: &Body) -> Vec<f64> {
    if m.dim() != 2 || m.as_polytope().is_some() || !m.is_convex() {
        return Vec::new();
    }
    let targets: Vec<f64> = match n.as_polytope() {
        Some(p) => p.normals().iter().map(UnitDirection::angle).collect(),
        None => return Vec::new(),
    };
    let alpha = |t: f64| -> Option<f64> {
        let u = UnitDirection::from_angle(t).into_vector();
        m.gauss_normal(&u).ok().map(|(nu, _)| nu[1].atan2(nu[0]))
    };
    // The normal angle minus the radial angle stays in (-π/2, π/2).
    let offset = |t: f64, target: f64| -> Option<f64> {
        let a = alpha(t)?;
        let d = (a - target).rem_euclid(2.0 * std::f64::consts::PI);
        Some(if d > std::f64::consts::PI { d - 2.0 * std::f64::consts::PI } else { d })
    };
    let mut out = Vec::new();
    for target in targets {
        // Any u with α_M(u) = target lies within a quarter turn of target.
        let (mut lo, mut hi) = (target - 0.5 * std::f64::consts::PI, target + 0.5 * std::f64::consts::PI);
        let (Some(mut flo), Some(_)) = (offset(lo, target), offset(hi, target)) else {
            continue;
        };
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let Some(fm) = offset(mid, target) else {
                break;
            };
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

fn grid_for(m: &Body, n: Option<&Body>, q_body: &Body, config: &GridConfig) -> Result<SphericalGrid> {
    let breaks = n.map(|n| gauss_preimage_breaks(m, n)).unwrap_or_default();
    config.grid_with_breaks(&[m, q_body], &breaks)
}

fn with_error<F>(config: &GridConfig, p: f64, q: f64, j: f64, eval: F) -> Result<QuermassResult>
where
    F: Fn(&GridConfig) -> Result<f64>,
{
    let value = eval(config)?;
    let coarse = eval(&config.coarse())?;
    Ok(QuermassResult { value, error_estimate: (value - coarse).abs(), p, q, j, grid: *config })
}

/// `W̃_{q,j}(M, Q) = (1/n) ∫ ρ_M^q ρ_Q^{n-q-j}` for star bodies.
pub fn dual_quermass(m: &Body, q_body: &Body, q: f64, j: f64, config: &GridConfig) -> Result<QuermassResult> {
    let dim = m.dim();
    check_j(dim, j)?;
    crate::geometry::check_dim(dim, q_body.dim())?;
    let eq = dim as f64 - q - j;
    with_error(config, 0.0, q, j, |cfg| {
        let grid = cfg.grid(&[m, q_body])?;
        Ok(grid.integrate(|u| m.rho(u).powf(q) * q_body.rho(u).powf(eq))? / dim as f64)
    })
}

/// `W̃_j(M) = (1/n) ∫ ρ_M^{n-j}`.
pub fn dual_quermass_single(m: &Body, j: f64, config: &GridConfig) -> Result<QuermassResult> {
    let dim = m.dim();
    check_j(dim, j)?;
    with_error(config, 0.0, dim as f64 - j, j, |cfg| {
        let grid = cfg.grid(&[m])?;
        Ok(grid.integrate(|u| m.rho(u).powf(dim as f64 - j))? / dim as f64)
    })
}

/// `W̃_{p,q,j}(M, N, Q)` as a spherical integral over the radial Gauss map of `M`.
pub fn pq_mixed_quermass(
    m: &Body,
    n: &Body,
    q_body: &Body,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<QuermassResult> {
    with_error(config, p, q, j, |cfg| {
        let grid = grid_for(m, Some(n), q_body, cfg)?;
        QuermassFields::new(m, Some(n), q_body, &grid)?.value(p, q, j)
    })
}

/// The same quantity for polytopal `M` as `Σ_i (h_N(v_i)/h_M(v_i))^p c_i`
/// with `c_i` the atoms of `C̃_{q,j}(M, Q, ·)`.
pub fn pq_mixed_quermass_atoms(
    m: &HPolytope,
    n: &Body,
    q_body: &Body,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<QuermassResult> {
    if !n.is_convex() {
        return Err(Error::NonConvexBody);
    }
    let params = MeasureParams::new(0.0, q, j, q_body.clone());
    let (mu, err) = curvature_measure(m, &params, config)?;
    let weights: Vec<f64> =
        m.normals().iter().zip(m.support_numbers()).map(|(v, h)| (n.h(v) / h).powf(p)).collect();
    let value = compensated_sum(mu.atoms().iter().zip(&weights).map(|(a, w)| a.mass * w));
    let error_estimate = err * weights.iter().sum::<f64>();
    Ok(QuermassResult { value, error_estimate, p, q, j, grid: *config })
}

/// `(1/n) ∫ (h_N/h_M)^p(α_M(u)) ρ_M^{n-j}(u) du`.
pub fn lp_mixed_quermass_spherical(m: &Body, n: &Body, p: f64, j: f64, config: &GridConfig) -> Result<QuermassResult> {
    let dim = m.dim();
    check_j(dim, j)?;
    if !(m.is_convex() && n.is_convex()) {
        return Err(Error::NonConvexBody);
    }
    with_error(config, p, dim as f64, j, |cfg| {
        let breaks = gauss_preimage_breaks(m, n);
        let grid = cfg.grid_with_breaks(&[m], &breaks)?;
        let normals: Vec<(Vector, f64)> = grid.nodes().iter().map(|u| m.gauss_normal(u)).collect::<Result<_>>()?;
        let s = grid.integrate_indexed(|k, u| {
            let (nu, h) = &normals[k];
            (n.h(nu) / h).powf(p) * m.rho(u).powf(dim as f64 - j)
        })?;
        Ok(s / dim as f64)
    })
}

/// Finite-difference check of the first variation of `W̃_{q,j}` along an
/// L_p combination.
#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    /// `(q/p) W̃_{p,q,j}(M, N, Q)`.
    pub predicted: f64,
    /// `(step, central difference, relative gap)`; skipped steps are absent.
    pub steps: Vec<(f64, f64, f64)>,
    pub extrapolated: Option<f64>,
    pub relative_gap: Option<f64>,
}

pub const VARIATION_STEPS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Compares `d/dt W̃_{q,j}(M +_p t·N, Q)` at `t = 0` with
/// `(q/p) W̃_{p,q,j}(M, N, Q)`. Polytopal `M` keeps its own normal set along
/// the path; other bodies use [`NormalSet::Auto`].
pub fn variational_check(
    m: &Body,
    n: &Body,
    q_body: &Body,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<VariationalReport> {
    if p == 0.0 || q == 0.0 {
        return Err(Error::InvalidParameter("variational check needs p, q ≠ 0".into()));
    }
    let predicted = q / p * pq_mixed_quermass(m, n, q_body, p, q, j, config)?.value;
    let normals = match m.as_polytope() {
        Some(poly) => NormalSet::Explicit(poly.normals().to_vec()),
        None => NormalSet::Auto,
    };
    let w = |t: f64| -> Result<f64> {
        let body = lp_combination(m, n, 1.0, t, p, &normals)?;
        dual_quermass_value(&body, q_body, q, j, config)
    };
    let mut steps = Vec::new();
    for &s in &VARIATION_STEPS {
        match (w(s), w(-s)) {
            (Ok(a), Ok(b)) => {
                let d = (a - b) / (2.0 * s);
                steps.push((s, d, (d - predicted).abs() / predicted.abs()));
            }
            (Err(Error::NonPositiveCombination { .. }), _) | (_, Err(Error::NonPositiveCombination { .. })) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let extrapolated = match steps.as_slice() {
        [.., (s1, d1, _), (s2, d2, _)] if (s1 / s2 - 10.0).abs() < 1e-9 => Some((100.0 * d2 - d1) / 99.0),
        [.., (_, d, _)] => Some(*d),
        [] => None,
    };
    let relative_gap = extrapolated.map(|e| (e - predicted).abs() / predicted.abs());
    Ok(VariationalReport { predicted, steps, extrapolated, relative_gap })
}

fn dual_quermass_value(m: &Body, q_body: &Body, q: f64, j: f64, config: &GridConfig) -> Result<f64> {
    let dim = m.dim();
    let grid = config.grid(&[m, q_body])?;
    Ok(grid.integrate(|u| m.rho(u).powf(q) * q_body.rho(u).powf(dim as f64 - q - j))? / dim as f64)
}

/// One identity in [`identity_suite`].
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_residual: f64,
    /// False when the identity is not expected to hold for these parameters;
    /// such rows are reported but excluded from `max_residual`.
    pub applicable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub max_residual: f64,
}

fn check(name: &'static str, lhs: f64, rhs: f64, applicable: bool) -> IdentityCheck {
    IdentityCheck { name, lhs, rhs, relative_residual: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE), applicable }
}

/// Reductions of `W̃_{p,q,j}`, each compared with an independently coded route:
///
/// - `M = N = Q` gives `W̃_j(M)`;
/// - `N = M` gives `W̃_{q,j}(M, Q)`;
/// - `Q = M` gives the L_p mixed quermassintegral integral;
/// - `p = 0` gives `W̃_{q,j}(M, Q)`;
/// - `q = n` gives the L_p mixed quermassintegral integral (only at `j = 0`,
///   since `ρ_Q^{-j}` survives otherwise);
/// - `j = 0` agrees with the boundary-integral form of the (p,q)-mixed volume
///   (polytopal `M`, n ≤ 3), and `M = N = Q` polytopal gives the volume.
pub fn identity_suite(
    m: &Body,
    n: &Body,
    q_body: &Body,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<IdentityReport> {
    let dim = m.dim();
    let nn = dim as f64;
    let w = |a: &Body, b: &Body, c: &Body, p: f64, q: f64, j: f64| pq_mixed_quermass(a, b, c, p, q, j, config).map(|r| r.value);
    let mut checks = vec![
        check("all_equal_bodies", w(m, m, m, p, q, j)?, dual_quermass_single(m, j, config)?.value, true),
        check("n_equals_m", w(m, m, q_body, p, q, j)?, dual_quermass(m, q_body, q, j, config)?.value, true),
        check("q_body_equals_m", w(m, n, m, p, q, j)?, lp_mixed_quermass_spherical(m, n, p, j, config)?.value, true),
        check("p_zero", w(m, n, q_body, 0.0, q, j)?, dual_quermass(m, q_body, q, j, config)?.value, true),
        check("q_equals_n", w(m, n, q_body, p, nn, j)?, lp_mixed_quermass_spherical(m, n, p, j, config)?.value, j == 0.0),
    ];
    if let Some(poly) = m.as_polytope() {
        if dim <= 3 {
            let params = MeasureParams::new(p, q, 0.0, q_body.clone());
            let density = crate::quadrature::triangle_order(config.resolution).max(if dim == 2 { config.resolution } else { 0 });
            let boundary = crate::measure::curvature_boundary_oracle(poly, &params, |v| n.h(v).powf(p), density)?;
            checks.push(check("j_zero_boundary_route", w(m, n, q_body, p, q, 0.0)?, boundary, true));
            checks.push(check("volume", w(m, m, m, p, q, 0.0)?, poly.volume()?, true));
        }
    }
    let max_residual = checks.iter().filter(|c| c.applicable).map(|c| c.relative_residual).fold(0.0, f64::max);
    Ok(IdentityReport { checks, max_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct CovarianceReport {
    /// `W̃_{p,q,j}(φM, φN, φQ)`.
    pub transformed: f64,
    pub original: f64,
    pub abs_det: f64,
    /// `|transformed / (|det φ| original) - 1|`.
    pub ratio_error: f64,
}

/// Compares `W̃_{p,q,j}(φM, φN, φQ)` with `|det φ| W̃_{p,q,j}(M, N, Q)`. The
/// scaling law is exact for `j = 0` and for orthogonal `φ`; for `j ≠ 0` and
/// non-orthogonal `φ` the factor `|x|^{-j}` is not linearly invariant and the
/// ratio is reported as is.
#[allow(clippy::too_many_arguments)]
pub fn gl_covariance_check(
    m: &Body,
    n: &Body,
    q_body: &Body,
    phi: &Matrix,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<CovarianceReport> {
    use crate::geometry::apply_linear;
    let (pm, pn, pq) = (apply_linear(m, phi)?, apply_linear(n, phi)?, apply_linear(q_body, phi)?);
    let transformed = pq_mixed_quermass(&pm, &pn, &pq, p, q, j, config)?.value;
    let original = pq_mixed_quermass(m, n, q_body, p, q, j, config)?.value;
    let abs_det = phi.determinant().abs();
    Ok(CovarianceReport { transformed, original, abs_det, ratio_error: (transformed / (abs_det * original) - 1.0).abs() })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValuationReport {
    /// `W̃(M,N,Q1∪Q2) + W̃(M,N,Q1∩Q2)`.
    pub lhs: f64,
    /// `W̃(M,N,Q1) + W̃(M,N,Q2)`.
    pub rhs: f64,
    pub relative_residual: f64,
}

/// Inclusion–exclusion in the star body slot.
#[allow(clippy::too_many_arguments)]
pub fn valuation_check_starbody(
    m: &Body,
    n: &Body,
    q1: &Body,
    q2: &Body,
    p: f64,
    q: f64,
    j: f64,
    config: &GridConfig,
) -> Result<ValuationReport> {
    let union = Body::star_union(q1.clone(), q2.clone())?;
    let inter = Body::star_intersection(q1.clone(), q2.clone())?;
    let breaks = gauss_preimage_breaks(m, n);
    let grid = config.grid_with_breaks(&[m, &union, &inter], &breaks)?;
    let w = |qb: &Body| QuermassFields::new(m, Some(n), qb, &grid)?.value(p, q, j);
    let lhs = w(&union)? + w(&inter)?;
    let rhs = w(q1)? + w(q2)?;
    Ok(ValuationReport { lhs, rhs, relative_residual: (lhs - rhs).abs() / rhs.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ball_volume;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> GridConfig {
        GridConfig::default()
    }

    #[test]
    fn ball_values() {
        let b = Body::unit_ball(2);
        for (q, j) in [(1.0, 0.0), (2.0, 1.0), (-1.0, 0.0)] {
            assert_relative_eq!(dual_quermass(&b, &b, q, j, &cfg()).unwrap().value, PI, epsilon = 1e-13);
        }
        let b2 = Body::ball(2, 2.0).unwrap();
        assert_relative_eq!(pq_mixed_quermass(&b, &b2, &b, 1.5, 2.0, 0.0, &cfg()).unwrap().value, 2f64.powf(1.5) * PI, epsilon = 1e-12);
        let b3 = Body::unit_ball(3);
        assert_relative_eq!(dual_quermass(&b3, &b3, 3.5, 1.0, &cfg()).unwrap().value, ball_volume(3), epsilon = 1e-12);
    }

    #[test]
    fn square_area() {
        let sq = Body::polytope(HPolytope::cube(2, 1.0).unwrap());
        assert_relative_eq!(dual_quermass(&sq, &sq, 2.0, 0.0, &cfg()).unwrap().value, 4.0, epsilon = 1e-13);
    }

    #[test]
    fn atom_route_matches_integral_route() {
        let m = HPolytope::regular_polygon(5, 1.0, 0.2).unwrap();
        let n = Body::ellipsoid(vec![1.5, 0.7]).unwrap();
        let q = Body::polytope(HPolytope::cross_polytope(2, 1.3).unwrap());
        let a = pq_mixed_quermass(&Body::polytope(m.clone()), &n, &q, 1.7, 2.4, 1.0, &cfg()).unwrap();
        let b = pq_mixed_quermass_atoms(&m, &n, &q, 1.7, 2.4, 1.0, &cfg()).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-12);
    }

    #[test]
    fn identities_on_planar_triple() {
        let m = Body::polytope(HPolytope::cube(2, 1.0).unwrap());
        let n = Body::polytope(HPolytope::cross_polytope(2, 1.0).unwrap());
        let q = Body::unit_ball(2);
        let r = identity_suite(&m, &n, &q, 1.5, 2.5, 0.0, &cfg()).unwrap();
        assert!(r.max_residual < 1e-12, "{r:#?}");
        let r = identity_suite(&m, &n, &q, -0.5, 1.5, 1.0, &cfg()).unwrap();
        assert!(r.max_residual < 1e-12, "{r:#?}");
    }

    #[test]
    fn smooth_m_with_polytope_n() {
        let m = Body::ellipsoid(vec![2.0, 1.0]).unwrap();
        let n = Body::polytope(HPolytope::regular_polygon(3, 1.0, 0.4).unwrap());
        let q = Body::unit_ball(2);
        let r = pq_mixed_quermass(&m, &n, &q, 2.0, 1.0, 0.0, &GridConfig::with_resolution(24)).unwrap();
        assert!(r.error_estimate < 1e-10 * r.value, "{r:?}");
    }

    #[test]
    fn variation_of_ball() {
        let b = Body::unit_ball(2);
        let r = variational_check(&b, &b, &b, 1.0, 2.0, 0.0, &cfg()).unwrap();
        assert_relative_eq!(r.predicted, 2.0 * PI, epsilon = 1e-12);
        assert!(r.relative_gap.unwrap() < 1e-10, "{r:?}");
    }

    #[test]
    fn variation_of_square_towards_disk() {
        let m = Body::polytope(HPolytope::regular_polygon(6, 1.0, 0.1).unwrap());
        let n = Body::ellipsoid(vec![1.0, 0.5]).unwrap();
        let q = Body::unit_ball(2);
        let r = variational_check(&m, &n, &q, 1.5, 2.5, 1.0, &cfg()).unwrap();
        assert!(r.relative_gap.unwrap() < 1e-8, "{r:?}");
    }

    #[test]
    fn covariance_and_valuation() {
        let m = Body::polytope(HPolytope::cube(2, 1.0).unwrap());
        let n = Body::polytope(HPolytope::cross_polytope(2, 1.0).unwrap());
        let q = Body::unit_ball(2);
        let phi = Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]);
        let r = gl_covariance_check(&m, &n, &q, &phi, 1.0, 1.5, 0.0, &cfg()).unwrap();
        assert!(r.ratio_error < 1e-10, "{r:?}");
        let q1 = Body::ellipsoid(vec![2.0, 1.0]).unwrap();
        let q2 = Body::ellipsoid(vec![1.0, 2.0]).unwrap();
        let v = valuation_check_starbody(&m, &n, &q1, &q2, 1.0, 1.5, 0.0, &cfg()).unwrap();
        assert!(v.relative_residual < 1e-12, "{v:?}");
    }
}
