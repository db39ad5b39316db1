//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes and returns JSON strings so the page needs no glue
//! beyond `JSON.parse`.

use pqmix::geometry::{polar, Body, HPolytope, UnitDirection};
use pqmix::measure::{curvature_measure, MeasureParams};
use pqmix::quadrature::GridConfig;
use pqmix::schema::{measure_to_json, parse_body, parse_measure};
use pqmix::solver::{solve, SolveConfig, TargetMeasure};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn boundary(body: &Body, samples: usize) -> Vec<[f64; 2]> {
    (0..samples)
        .map(|k| {
            let u = UnitDirection::from_angle(std::f64::consts::TAU * k as f64 / samples as f64);
            let r = body.rho(u.as_vector());
            [r * u[0], r * u[1]]
        })
        .collect()
}

/// Boundary of a planar body and of its polar, sampled at `samples` angles.
pub fn radial_profile_json(body: &str, samples: usize) -> Result<String, String> {
    let m = parse_body(body, 2).map_err(err)?;
    if m.dim() != 2 {
        return Err(format!("the demo draws planar bodies, got dimension {}", m.dim()));
    }
    let samples = samples.clamp(8, 4096);
    let polar = if m.is_convex() { Some(boundary(&polar(&m).map_err(err)?, samples)) } else { None };
    Ok(json!({ "boundary": boundary(&m, samples), "polar": polar }).to_string())
}

fn ordered_vertices(p: &HPolytope) -> Vec<[f64; 2]> {
    let mut v: Vec<[f64; 2]> = p.vertices().iter().map(|x| [x[0], x[1]]).collect();
    v.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    v
}

/// Atoms of the curvature measure of a polytope with parameters `(p, q, j)`.
pub fn curvature_atoms_json(body: &str, q_body: &str, p: f64, q: f64, j: f64, resolution: usize) -> Result<String, String> {
    let m = parse_body(body, 2).map_err(err)?;
    let poly = m.as_polytope().ok_or("curvature atoms need a polytope")?;
    let q_body = parse_body(q_body, poly.dim()).map_err(err)?;
    let params = MeasureParams::new(p, q, j, q_body);
    let (mu, error) = curvature_measure(poly, &params, &GridConfig::with_resolution(resolution.max(2))).map_err(err)?;
    Ok(json!({
        "measure": measure_to_json(&mu),
        "total": mu.total(),
        "error_estimate": error,
        "vertices": ordered_vertices(poly),
    })
    .to_string())
}

/// Solves the discrete Minkowski problem for a planar measure.
pub fn solve_polygon_json(measure: &str, q_body: &str, p: f64, q: f64, j: f64) -> Result<String, String> {
    let mu = parse_measure(measure).map_err(err)?;
    let q_body = parse_body(q_body, mu.dim()).map_err(err)?;
    let target = TargetMeasure::new(mu, true).map_err(err)?;
    let mut config = SolveConfig::new(p, q, j, q_body);
    config.max_iters = 2000;
    let report = solve(&target, &config).map_err(err)?;
    Ok(json!({
        "status": report.status,
        "iterations": report.iterations,
        "support": report.support,
        "max_residual": report.max_residual,
        "vertices": ordered_vertices(&report.polytope),
        "trace": report.trace.iter().map(|t| [t.phi, t.grad_norm]).collect::<Vec<_>>(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn radial_profile(body: &str, samples: usize) -> Result<String, JsError> {
    radial_profile_json(body, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn curvature_atoms(body: &str, q_body: &str, p: f64, q: f64, j: f64, resolution: usize) -> Result<String, JsError> {
    curvature_atoms_json(body, q_body, p, q, j, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_polygon(measure: &str, q_body: &str, p: f64, q: f64, j: f64) -> Result<String, JsError> {
    solve_polygon_json(measure, q_body, p, q, j).map_err(|e| JsError::new(&e))
}
