//! Discrete Minkowski problem for `C̃_{p,q,j}(·, Q, ·)`.
//!
//! Given atoms `μ_i` on normals `v_i`, maximize over support vectors `h > 0`
//!
//! ```text
//! Φ(h) = -(1/p) log Σ h_i^p μ_i + (1/q) log W̃_{q,j}([h], Q)
//! ```
//!
//! which is invariant under `h ↦ λh`. Ascent runs in `x = log h` on the
//! hyperplane `Σ x_i = 0`; the maximizer is then rescaled so that
//! `Σ h_i^p μ_i = W̃_{q,j}`, which makes `C̃_{p,q,j}([h], Q, ·) = μ`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{wulff_shape, Body, HPolytope, Matrix, UnitDirection, DUPLICATE_TOL};
use crate::measure::{curvature_measure_polytope, measure_grid, DiscreteSphericalMeasure, MeasureParams};
use crate::par::compensated_sum;
use crate::quadrature::GridConfig;

/// Evenness tolerance on paired masses.
pub const EVEN_TOL: f64 = 1e-12;
/// Minimum eigenvalue of the second-moment matrix relative to its trace.
pub const CONCENTRATION_TOL: f64 = 1e-10;
/// Line-search steps below this size count as failures.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureDiagnostics {
    pub atoms: usize,
    pub total_mass: f64,
    /// First atom without an antipodal partner of equal mass.
    pub odd_atom: Option<usize>,
    /// Eigenvalues of `Σ μ_i v_i v_iᵀ`, ascending.
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
    pub duplicates: Vec<(usize, usize)>,
    pub nonpositive: Vec<usize>,
}

impl MeasureDiagnostics {
    pub fn is_even(&self) -> bool {
        self.odd_atom.is_none()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn is_concentrated(&self) -> bool {
        self.min_eigenvalue() <= CONCENTRATION_TOL * self.trace
    }

    /// Errors for the conditions a solve needs.
    pub fn require(&self, even: bool) -> Result<()> {
        if let Some(&index) = self.nonpositive.first() {
            return Err(Error::InvalidParameter(format!("atom {index} has non-positive mass")));
        }
        if let Some(&(first, second)) = self.duplicates.first() {
            return Err(Error::DuplicateNormals { first, second });
        }
        if even {
            if let Some(index) = self.odd_atom {
                return Err(Error::NotEvenMeasure { index });
            }
        }
        if self.is_concentrated() {
            return Err(Error::ConcentratedMeasure { min_eigenvalue: self.min_eigenvalue(), trace: self.trace });
        }
        Ok(())
    }
}

/// Evenness, second moments, total mass and duplicate directions of `μ`.
pub fn validate_measure(mu: &DiscreteSphericalMeasure) -> MeasureDiagnostics {
    let atoms = mu.atoms();
    let dim = mu.dim();
    let mut moment = Matrix::zeros(dim, dim);
    for a in atoms {
        moment += a.mass * a.normal.as_vector() * a.normal.as_vector().transpose();
    }
    let trace = moment.trace();
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(moment).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let odd_atom = (0..atoms.len()).find(|&i| {
        !atoms.iter().any(|b| {
            b.normal.dot(&atoms[i].normal) <= -1.0 + DUPLICATE_TOL
                && (b.mass - atoms[i].mass).abs() <= EVEN_TOL * b.mass.abs().max(atoms[i].mass.abs())
        })
    });
    let mut duplicates = Vec::new();
    for i in 0..atoms.len() {
        for k in i + 1..atoms.len() {
            if atoms[i].normal.dot(&atoms[k].normal) >= 1.0 - DUPLICATE_TOL {
                duplicates.push((i, k));
            }
        }
    }
    MeasureDiagnostics {
        atoms: atoms.len(),
        total_mass: mu.total(),
        odd_atom,
        eigenvalues,
        trace,
        duplicates,
        nonpositive: atoms.iter().enumerate().filter(|(_, a)| !(a.mass > 0.0)).map(|(i, _)| i).collect(),
    }
}

/// Averages the masses of antipodal atoms. Fails with `NotEvenMeasure` when
/// some atom has no antipode, and leaves unequal masses to the caller: this
/// removes quadrature asymmetry from measures of origin-symmetric bodies.
pub fn even_part(mu: &DiscreteSphericalMeasure) -> Result<DiscreteSphericalMeasure> {
    let atoms = mu.atoms();
    let masses = (0..atoms.len())
        .map(|i| {
            let k = (0..atoms.len())
                .find(|&k| atoms[k].normal.dot(&atoms[i].normal) <= -1.0 + DUPLICATE_TOL)
                .ok_or(Error::NotEvenMeasure { index: i })?;
            Ok(0.5 * (atoms[i].mass + atoms[k].mass))
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteSphericalMeasure::from_parts(&mu.normals(), &masses)
}

/// A target measure checked for the solver's hypotheses.
#[derive(Clone, Debug)]
pub struct TargetMeasure {
    measure: DiscreteSphericalMeasure,
    diagnostics: MeasureDiagnostics,
}

impl TargetMeasure {
    pub fn new(measure: DiscreteSphericalMeasure, require_even: bool) -> Result<Self> {
        let diagnostics = validate_measure(&measure);
        diagnostics.require(require_even)?;
        Ok(TargetMeasure { measure, diagnostics })
    }

    pub fn measure(&self) -> &DiscreteSphericalMeasure {
        &self.measure
    }

    pub fn diagnostics(&self) -> &MeasureDiagnostics {
        &self.diagnostics
    }

    pub fn is_even(&self) -> bool {
        self.diagnostics.is_even()
    }
}

#[derive(Clone, Debug)]
pub enum Init {
    /// `h ≡ 1`.
    Uniform,
    /// Support numbers of a body at the target normals.
    FromBody(Body),
    Custom(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub p: f64,
    pub q: f64,
    pub j: f64,
    pub q_body: Body,
    pub init: Init,
    pub max_iters: usize,
    /// Stop once `‖∇Φ‖_∞` falls below this.
    pub grad_tol: f64,
    pub backtrack: f64,
    pub sufficient_increase: f64,
    /// Largest accepted per-atom relative residual for `converged`, on top
    /// of the quadrature error estimate of the residuals themselves.
    pub verify_tol: f64,
    pub grid: GridConfig,
    /// Require an even measure.
    pub require_even: bool,
    /// Allow parameters outside `p, q > 0`.
    pub unsafe_params: bool,
}

impl SolveConfig {
    pub fn new(p: f64, q: f64, j: f64, q_body: Body) -> Self {
        SolveConfig {
            p,
            q,
            j,
            q_body,
            init: Init::Uniform,
            max_iters: 5000,
            grad_tol: 1e-9,
            backtrack: 0.5,
            sufficient_increase: 1e-4,
            verify_tol: 1e-6,
            grid: GridConfig::default(),
            require_even: true,
            unsafe_params: false,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        crate::geometry::check_dim(dim, self.q_body.dim())?;
        let (p, q, j) = (self.p, self.q, self.j);
        if !(p.is_finite() && q.is_finite() && j.is_finite()) || p == 0.0 || q == 0.0 || j == dim as f64 {
            return Err(Error::InvalidParameter(format!("need finite p, q ≠ 0 and j ≠ {dim}, got ({p}, {q}, {j})")));
        }
        if !self.unsafe_params && !(p > 0.0 && q > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "p = {p}, q = {q} is outside p, q > 0; enable unsafe parameters to try anyway"
            )));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0 && self.sufficient_increase > 0.0) {
            return Err(Error::InvalidParameter("line search needs 0 < backtrack < 1 and a positive increase factor".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    DegenerateFacet,
    /// The line search found no increase although the gradient is above tolerance.
    Stalled,
    /// The gradient converged but the verified residuals exceed `verify_tol`.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub phi: f64,
    pub grad_norm: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    #[serde(serialize_with = "crate::schema::serialize_polytope")]
    pub polytope: HPolytope,
    /// Support numbers at the target normals after rescaling.
    pub support: Vec<f64>,
    pub phi: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
    pub grad_norm: f64,
    /// `(achieved - target) / target` per atom on the refined grid.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Change of the achieved atoms between the refined and the working grid.
    pub residual_error_estimate: f64,
    /// `10 · grad_tol · max_i Σh^pμ / (h_i^p μ_i)`.
    pub residual_bound: f64,
    pub scale: f64,
    /// `|Σ h_i^p μ_i − W̃_{q,j}| / W̃_{q,j}` after rescaling.
    pub scale_residual: f64,
    /// `p = q`: the solution is unique only up to dilation and matches
    /// `measure_scale · μ`.
    pub up_to_scale: bool,
    pub measure_scale: f64,
}

/// One evaluation of `Φ` and its gradient at `x = log h`.
#[derive(Clone, Debug)]
struct Eval {
    x: Vec<f64>,
    phi: f64,
    grad: Vec<f64>,
    polytope: HPolytope,
    pruned: bool,
    sum_hp: f64,
    w: f64,
}

struct Problem<'a> {
    normals: Vec<UnitDirection>,
    masses: Vec<f64>,
    config: &'a SolveConfig,
}

impl Problem<'_> {
    fn eval_h(&self, h: &[f64], grid: &GridConfig) -> Result<Eval> {
        let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
        self.eval(x, grid)
    }

    fn eval(&self, x: Vec<f64>, grid: &GridConfig) -> Result<Eval> {
        let cfg = self.config;
        let h: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let shape = wulff_shape(&self.normals, &h)?;
        let polytope = shape.polytope;
        let params = MeasureParams::new(0.0, cfg.q, cfg.j, cfg.q_body.clone());
        let cones = curvature_measure_polytope(&polytope, &params, &measure_grid(&polytope, &params, grid)?)?;
        let mut c = vec![0.0; h.len()];
        for (k, &src) in polytope.source_indices().iter().enumerate() {
            c[src] = cones.atoms()[k].mass;
        }
        let w = compensated_sum(c.iter().copied());
        let hp: Vec<f64> = h.iter().zip(&self.masses).map(|(h, m)| h.powf(cfg.p) * m).collect();
        let sum_hp = compensated_sum(hp.iter().copied());
        let phi = -sum_hp.ln() / cfg.p + w.ln() / cfg.q;
        if !phi.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        let grad = c.iter().zip(&hp).map(|(c, hp)| c / w - hp / sum_hp).collect();
        Ok(Eval { x, phi, grad, polytope, pruned: !shape.pruned.is_empty(), sum_hp, w })
    }
}

fn problem<'a>(mu: &DiscreteSphericalMeasure, config: &'a SolveConfig) -> Result<Problem<'a>> {
    config.validate(mu.dim())?;
    Ok(Problem { normals: mu.normals(), masses: mu.masses(), config })
}

fn check_h(h: &[f64], mu: &DiscreteSphericalMeasure) -> Result<()> {
    crate::geometry::check_dim(mu.len(), h.len())?;
    for (index, &value) in h.iter().enumerate() {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSupport { index, value });
        }
    }
    Ok(())
}

/// `Φ(h)` with `W̃_{q,j}([h], Q)` on a grid split along the cones of `[h]`.
pub fn phi_objective(h: &[f64], mu: &DiscreteSphericalMeasure, config: &SolveConfig) -> Result<f64> {
    check_h(h, mu)?;
    Ok(problem(mu, config)?.eval_h(h, &config.grid)?.phi)
}

/// `∂Φ/∂(log h_i) = C̃_{q,j}([h], Q, {v_i}) / W̃_{q,j}([h], Q) − h_i^p μ_i / Σ h^p μ`.
pub fn phi_gradient(h: &[f64], mu: &DiscreteSphericalMeasure, config: &SolveConfig) -> Result<Vec<f64>> {
    check_h(h, mu)?;
    Ok(problem(mu, config)?.eval_h(h, &config.grid)?.grad)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn centered(mut x: Vec<f64>) -> Vec<f64> {
    let mean = compensated_sum(x.iter().copied()) / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Gradient ascent on `Φ` with Barzilai–Borwein trial steps and Armijo
/// backtracking, then rescaling and verification at doubled resolution.
pub fn solve(target: &TargetMeasure, config: &SolveConfig) -> Result<SolveReport> {
    let mu = target.measure();
    if config.require_even && !target.is_even() {
        return Err(Error::NotEvenMeasure { index: target.diagnostics().odd_atom.unwrap_or(0) });
    }
    let prob = problem(mu, config)?;
    let h0: Vec<f64> = match &config.init {
        Init::Uniform => vec![1.0; mu.len()],
        Init::FromBody(body) => prob.normals.iter().map(|v| body.support(v.as_vector())).collect::<Result<_>>()?,
        Init::Custom(h) => h.clone(),
    };
    check_h(&h0, mu)?;
    let x0 = centered(h0.iter().map(|v| v.ln()).collect());
    let mut cur = prob.eval(x0, &config.grid)?;
    let mut trace = vec![TraceEntry { iteration: 0, phi: cur.phi, grad_norm: inf_norm(&cur.grad), step: 0.0 }];
    let mut status = None;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    while status.is_none() {
        let gnorm = inf_norm(&cur.grad);
        if gnorm <= config.grad_tol {
            status = Some(SolveStatus::Converged);
            break;
        }
        if iterations >= config.max_iters {
            status = Some(SolveStatus::MaxIters);
            break;
        }
        let g2 = dot(&cur.grad, &cur.grad);
        let mut step = match &prev {
            Some((xp, gp)) => {
                let s: Vec<f64> = cur.x.iter().zip(xp).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = cur.grad.iter().zip(gp).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y).abs();
                if sy > 0.0 { dot(&s, &s) / sy } else { 1.0 }
            }
            None => 1.0,
        };
        // Φ differences below this are rounding noise.
        let noise = 8.0 * f64::EPSILON * (cur.phi.abs() + 1.0);
        let first = step;
        let mut accepted = None;
        let mut only_deaths = true;
        // Steps that prune a facet are rejected first. When nothing else is
        // left the iterate sits against a vanishing facet, and the search is
        // repeated with inactive facets allowed: such a facet has no cone
        // mass, so its gradient pulls it back.
        for allow_inactive in [false, true] {
            step = first;
            while step >= MIN_STEP {
                let x = centered(cur.x.iter().zip(&cur.grad).map(|(x, g)| x + step * g).collect());
                match prob.eval(x, &config.grid) {
                    Ok(next) if allow_inactive || !next.pruned => {
                        if next.phi - cur.phi >= config.sufficient_increase * step * g2 - noise {
                            accepted = Some(next);
                            break;
                        }
                        only_deaths = false;
                    }
                    Ok(_) | Err(Error::UnboundedWulffShape { .. }) => {}
                    Err(e) => return Err(e),
                }
                step *= config.backtrack;
            }
            if accepted.is_some() || !only_deaths {
                break;
            }
        }
        let Some(next) = accepted else {
            status = Some(if only_deaths { SolveStatus::DegenerateFacet } else { SolveStatus::Stalled });
            break;
        };
        iterations += 1;
        prev = Some((cur.x.clone(), cur.grad.clone()));
        cur = next;
        trace.push(TraceEntry { iteration: iterations, phi: cur.phi, grad_norm: inf_norm(&cur.grad), step });
    }
    let mut status = status.expect("loop sets a status");
    if cur.pruned {
        status = SolveStatus::DegenerateFacet;
    }
    finish(&prob, mu, cur, &mut status, trace, iterations)
}

fn finish(
    prob: &Problem<'_>,
    mu: &DiscreteSphericalMeasure,
    cur: Eval,
    status: &mut SolveStatus,
    trace: Vec<TraceEntry>,
    iterations: usize,
) -> Result<SolveReport> {
    let cfg = prob.config;
    let up_to_scale = cfg.p == cfg.q;
    let scale = if up_to_scale { 1.0 } else { (cur.sum_hp / cur.w).powf(1.0 / (cfg.q - cfg.p)) };
    let support: Vec<f64> = cur.x.iter().map(|x| scale * x.exp()).collect();
    let polytope = cur.polytope.scaled(scale);
    // For p = q the stationary body matches (W/Σh^pμ)·μ.
    let measure_scale = if up_to_scale { cur.w / cur.sum_hp } else { 1.0 };
    let params = MeasureParams::new(cfg.p, cfg.q, cfg.j, cfg.q_body.clone());
    let achieved = |grid: &GridConfig| -> Result<Vec<f64>> {
        let atoms = curvature_measure_polytope(&polytope, &params, &measure_grid(&polytope, &params, grid)?)?;
        let mut out = vec![0.0; mu.len()];
        for (k, &src) in polytope.source_indices().iter().enumerate() {
            out[src] = atoms.atoms()[k].mass;
        }
        Ok(out)
    };
    let refined = achieved(&cfg.grid.refined())?;
    let working = achieved(&cfg.grid)?;
    let residuals: Vec<f64> = refined
        .iter()
        .zip(mu.atoms())
        .map(|(a, t)| (a - measure_scale * t.mass) / (measure_scale * t.mass))
        .collect();
    let residual_error_estimate = refined
        .iter()
        .zip(&working)
        .zip(mu.atoms())
        .map(|((a, b), t)| (a - b).abs() / (measure_scale * t.mass))
        .fold(0.0, f64::max);
    let max_residual = inf_norm(&residuals);
    let hp_min = support
        .iter()
        .zip(mu.atoms())
        .map(|(h, a)| h.powf(cfg.p) * a.mass)
        .fold(f64::INFINITY, f64::min);
    let sum_hp = compensated_sum(support.iter().zip(mu.atoms()).map(|(h, a)| h.powf(cfg.p) * a.mass));
    let w = cur.w * scale.powf(cfg.q);
    let scale_residual = if up_to_scale { 0.0 } else { (sum_hp - w).abs() / w };
    if *status == SolveStatus::Converged && max_residual > cfg.verify_tol + residual_error_estimate {
        *status = SolveStatus::Unverified;
    }
    Ok(SolveReport {
        status: *status,
        polytope,
        support,
        phi: cur.phi,
        iterations,
        grad_norm: inf_norm(&cur.grad),
        trace,
        residuals,
        max_residual,
        residual_error_estimate,
        residual_bound: 10.0 * cfg.grad_tol * sum_hp / hp_min,
        scale,
        scale_residual,
        up_to_scale,
        measure_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn four_atoms(mass: f64) -> DiscreteSphericalMeasure {
        let normals = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        DiscreteSphericalMeasure::new(
            normals.iter().map(|c| Atom { normal: UnitDirection::from_slice(c).unwrap(), mass }).collect(),
        )
        .unwrap()
    }

    fn config() -> SolveConfig {
        SolveConfig::new(1.0, 2.0, 0.0, Body::unit_ball(2))
    }

    #[test]
    fn square_objective_value() {
        let phi = phi_objective(&[1.0; 4], &four_atoms(1.0), &config()).unwrap();
        assert!((phi + 0.5 * 4f64.ln()).abs() < 1e-13, "{phi}");
        for l in [0.5, 2.0, 10.0] {
            let scaled = phi_objective(&[l; 4], &four_atoms(1.0), &config()).unwrap();
            assert!((scaled - phi).abs() <= 1e-12);
        }
    }

    #[test]
    fn square_fixture_recovers_unit_square() {
        let target = TargetMeasure::new(four_atoms(1.0), true).unwrap();
        let report = solve(&target, &config()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        for h in &report.support {
            assert!((h - 1.0).abs() < 1e-10, "{h}");
        }
        assert!(report.max_residual < 1e-8);
        assert!(report.scale_residual < 1e-10);
    }

    #[test]
    fn scaled_measure_scales_the_solution() {
        let c: f64 = 3.0;
        let target = TargetMeasure::new(four_atoms(c), true).unwrap();
        let report = solve(&target, &config()).unwrap();
        let expected = c.powf(1.0 / (2.0 - 1.0));
        for h in &report.support {
            assert!((h - expected).abs() < 1e-9 * expected, "{h}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mu = DiscreteSphericalMeasure::from_parts(
            &(0..6).map(|k| UnitDirection::from_angle(k as f64 * 1.047 + 0.1)).collect::<Vec<_>>(),
            &[1.0, 0.5, 2.0, 1.0, 0.5, 2.0],
        )
        .unwrap();
        let cfg = SolveConfig::new(2.0, 3.0, 0.0, Body::ellipsoid(vec![1.5, 0.8]).unwrap());
        let h = [1.0, 1.1, 0.9, 1.05, 0.95, 1.0];
        let g = phi_gradient(&h, &mu, &cfg).unwrap();
        assert!(g.iter().sum::<f64>().abs() < 1e-12);
        let step = 1e-5;
        for i in 0..h.len() {
            let mut hp = h;
            let mut hm = h;
            hp[i] *= f64::exp(step);
            hm[i] *= f64::exp(-step);
            let fd = (phi_objective(&hp, &mu, &cfg).unwrap() - phi_objective(&hm, &mu, &cfg).unwrap()) / (2.0 * step);
            assert!((fd - g[i]).abs() < 1e-7, "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn validation_errors() {
        let diag = validate_measure(&four_atoms(1.0));
        assert!((diag.eigenvalues[0] - 2.0).abs() < 1e-12 && (diag.eigenvalues[1] - 2.0).abs() < 1e-12);
        let axis = DiscreteSphericalMeasure::from_parts(
            &[UnitDirection::from_slice(&[1.0, 0.0]).unwrap(), UnitDirection::from_slice(&[-1.0, 0.0]).unwrap()],
            &[1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(TargetMeasure::new(axis, true), Err(Error::ConcentratedMeasure { .. })));
        let odd = DiscreteSphericalMeasure::from_parts(
            &[UnitDirection::from_slice(&[1.0, 0.0]).unwrap(), UnitDirection::from_slice(&[0.0, 1.0]).unwrap(),
              UnitDirection::from_slice(&[-1.0, -1.0]).unwrap()],
            &[1.0, 1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(TargetMeasure::new(odd.clone(), true), Err(Error::NotEvenMeasure { .. })));
        assert!(TargetMeasure::new(odd.clone(), false).is_ok());
        assert!(matches!(even_part(&odd), Err(Error::NotEvenMeasure { .. })));
        let skewed = DiscreteSphericalMeasure::from_parts(&four_atoms(1.0).normals(), &[1.0, 2.0, 3.0, 2.0]).unwrap();
        assert_eq!(even_part(&skewed).unwrap().masses(), vec![2.0, 2.0, 2.0, 2.0]);
        let bad = SolveConfig::new(-1.0, 2.0, 0.0, Body::unit_ball(2));
        assert!(phi_objective(&[1.0; 4], &four_atoms(1.0), &bad).is_err());
    }
}
