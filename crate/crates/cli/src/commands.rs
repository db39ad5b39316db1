//! Subcommand implementations.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use pqmix::geometry::{polar, HPolytope, Vector};
use pqmix::inequality::{fuzz_campaign, CampaignConfig, Theorem};
use pqmix::measure::{curvature_measure, MeasureParams};
use pqmix::quermass::{dual_quermass, pq_mixed_quermass};
use pqmix::schema::{measure_to_json, BodySpec, MeasureSpec};
use pqmix::solver::{even_part, solve, Init, SolveConfig, SolveReport, SolveStatus, TargetMeasure};
use pqmix::{Body, DiscreteSphericalMeasure, UnitDirection};

use crate::output::{csv_table, emit, write_json};
use crate::{Cli, Command, EvalOp, SolveArgs};

pub enum Outcome {
    Ok,
    /// A mathematical finding that should make the run exit with status 1.
    Finding(String),
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Eval { body, op, directions, grid } => eval(cli, body, *op, directions, grid.dimension),
        Command::Measure { body, q_body, exponents, grid } => {
            let m = load_body(body, grid.dimension)?;
            let m = m.as_polytope().ok_or_else(|| anyhow!("{}: the measure needs a polytope", body.display()))?;
            let q_body = load_q_body(q_body.as_deref(), m.dim())?;
            let j = index_j(exponents.j, m.dim())?;
            measure(cli, m, q_body, exponents.p, exponents.q, j, &grid.grid())
        }
        Command::Quermass { body, n_body, q_body, p, q, j, grid } => {
            let m = load_body(body, grid.dimension)?;
            let q_body = load_q_body(q_body.as_deref(), m.dim())?;
            let j = &index_j(*j, m.dim())?;
            let result = match n_body {
                Some(path) => {
                    let n = load_body(path, m.dim())?;
                    pq_mixed_quermass(&m, &n, &q_body, *p, *q, *j, &grid.grid())?
                }
                None if *p != 0.0 => bail!("--p needs --n-body"),
                None => dual_quermass(&m, &q_body, *q, *j, &grid.grid())?,
            };
            emit(cli, &result)?;
            Ok(Outcome::Ok)
        }
        Command::CheckIneq { theorem, cases, symmetric, dump_dir, full, grid } => {
            let theorems = if theorem.is_empty() {
                Theorem::ALL.to_vec()
            } else {
                theorem
                    .iter()
                    .map(|t| Theorem::parse(t).ok_or_else(|| anyhow!("unknown theorem {t:?}")))
                    .collect::<Result<_>>()?
            };
            let config = CampaignConfig {
                theorems,
                cases: *cases,
                seed: grid.seed,
                dimension: grid.dimension,
                grid: grid.grid(),
                symmetric: *symmetric,
                ..Default::default()
            };
            check_ineq(cli, &config, dump_dir.as_deref(), *full)
        }
        Command::Solve { measure, solve } => {
            let text = read(measure)?;
            let spec: MeasureSpec =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", measure.display()))?;
            let mu = spec.to_measure()?;
            let target = TargetMeasure::new(mu, !solve.allow_odd)?;
            let config = solve_config(solve, target.measure().dim())?;
            let report = pqmix::solver::solve(&target, &config)?;
            emit(cli, &json!({ "report": report }))?;
            trace_csv(cli, &report)?;
            Ok(solve_outcome(&report))
        }
        Command::RoundTrip { body, solve } => round_trip(cli, body, solve),
        Command::Fixtures { dir } => fixtures(cli, dir),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_body(path: &Path, dim: usize) -> Result<Body> {
    let spec: BodySpec = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    spec.to_body(dim).with_context(|| format!("building {}", path.display()))
}

fn load_q_body(path: Option<&Path>, dim: usize) -> Result<Body> {
    match path {
        Some(p) => {
            let b = load_body(p, dim)?;
            if b.dim() != dim {
                bail!("{}: dimension {} does not match {dim}", p.display(), b.dim());
            }
            Ok(b)
        }
        None => Ok(Body::unit_ball(dim)),
    }
}

fn eval(cli: &Cli, body: &Path, op: EvalOp, directions: &Path, dim: usize) -> Result<Outcome> {
    let m = load_body(body, dim)?;
    let dirs: Vec<Vec<f64>> =
        serde_json::from_str(&read(directions)?).with_context(|| format!("parsing {}", directions.display()))?;
    let dirs: Vec<Vector> = dirs
        .iter()
        .map(|d| Ok(UnitDirection::from_slice(d)?.into_vector()))
        .collect::<pqmix::Result<_>>()
        .with_context(|| format!("reading directions from {}", directions.display()))?;
    let result = match op {
        EvalOp::Support => json!({ "op": "support", "values": values(&dirs, |x| m.support(x))?, "error_estimate": 0.0 }),
        EvalOp::Radial => json!({ "op": "radial", "values": values(&dirs, |x| m.radial(x))?, "error_estimate": 0.0 }),
        EvalOp::PolarCheck => {
            let star = polar(&m)?;
            let residuals = values(&dirs, |x| {
                Ok(star.radial(x)? * m.support(x)? - 1.0)
            })?;
            json!({ "op": "polar-check", "residuals": residuals, "error_estimate": 0.0 })
        }
        EvalOp::Gauss => match m.as_polytope() {
            Some(p) => {
                let facets = dirs
                    .iter()
                    .map(|x| p.radial_gauss(x))
                    .collect::<Vec<_>>();
                json!({ "op": "gauss", "facets": facets, "error_estimate": 0.0 })
            }
            None => {
                let normals = dirs
                    .iter()
                    .map(|x| Ok(m.gauss_normal(x)?.0.iter().copied().collect::<Vec<f64>>()))
                    .collect::<pqmix::Result<Vec<_>>>()?;
                json!({ "op": "gauss", "normals": normals, "error_estimate": 0.0 })
            }
        },
    };
    emit(cli, &result)?;
    Ok(Outcome::Ok)
}

fn values<F>(dirs: &[Vector], f: F) -> Result<Vec<f64>>
where
    F: Fn(&Vector) -> pqmix::Result<f64>,
{
    Ok(dirs.iter().map(f).collect::<pqmix::Result<Vec<_>>>()?)
}

fn measure(cli: &Cli, m: &HPolytope, q_body: Body, p: f64, q: f64, j: f64, grid: &pqmix::GridConfig) -> Result<Outcome> {
    let params = MeasureParams::new(p, q, j, q_body.clone());
    let (mu, err) = curvature_measure(m, &params, grid)?;
    let total = mu.total();
    eprintln!("total mass: {total}");
    let mut result = json!({
        "measure": measure_to_json(&mu),
        "total": total,
        "error_estimate": err,
        "params": { "p": p, "q": q, "j": j },
        "grid": grid,
    });
    if p == 0.0 {
        let w = dual_quermass(&Body::PolytopeH(m.clone()), &q_body, q, j, grid)?;
        eprintln!("dual quermassintegral: {} (difference {:e})", w.value, total - w.value);
        result["cross_check"] = json!({ "dual_quermass": w, "difference": total - w.value });
    }
    emit(cli, &result)?;
    csv_table(
        cli,
        &["index", "normal", "mass"],
        mu.atoms().iter().enumerate().map(|(i, a)| {
            let normal: Vec<String> = a.normal.iter().map(|c| c.to_string()).collect();
            vec![i.to_string(), normal.join(" "), a.mass.to_string()]
        }),
    )?;
    Ok(Outcome::Ok)
}

fn check_ineq(cli: &Cli, config: &CampaignConfig, dump_dir: Option<&Path>, full: bool) -> Result<Outcome> {
    let summary = fuzz_campaign(config);
    if let Some(dir) = dump_dir {
        std::fs::create_dir_all(dir)?;
        for c in &summary.counterexamples {
            write_json(&dir.join(format!("counterexample-{}-{}.json", c.seed, c.case)), c)?;
        }
    }
    #[derive(Serialize)]
    struct Out<'a> {
        config: &'a CampaignConfig,
        cases: usize,
        persistent_violations: usize,
        max_dilate_slack: f64,
        groups: &'a [pqmix::inequality::GroupSummary],
        counterexamples: &'a [pqmix::inequality::Counterexample],
        errors: &'a [pqmix::inequality::CaseError],
        #[serde(skip_serializing_if = "Option::is_none")]
        reports: Option<&'a [pqmix::inequality::CaseReport]>,
    }
    emit(
        cli,
        &Out {
            config,
            cases: summary.cases,
            persistent_violations: summary.persistent_violations(),
            max_dilate_slack: summary.max_dilate_slack(),
            groups: &summary.groups,
            counterexamples: &summary.counterexamples,
            errors: &summary.errors,
            reports: full.then_some(&summary.reports[..]),
        },
    )?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    csv_table(
        cli,
        &["case", "name", "p", "q", "r", "s", "j", "lhs", "rhs", "slack", "error_bound", "verdict", "dilates"],
        summary.reports.iter().map(|c| {
            let r = &c.report;
            vec![
                c.case.to_string(),
                r.name.clone(),
                r.params.p.to_string(),
                r.params.q.to_string(),
                opt(r.params.r),
                opt(r.params.s),
                r.params.j.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.slack.to_string(),
                r.error_bound.to_string(),
                serde_json::to_value(r.verdict).unwrap().as_str().unwrap_or_default().to_string(),
                r.dilates.to_string(),
            ]
        }),
    )?;
    if summary.persistent_violations() > 0 {
        return Ok(Outcome::Finding(format!("{} persistent violation(s)", summary.persistent_violations())));
    }
    if !summary.errors.is_empty() {
        return Ok(Outcome::Finding(format!("{} case(s) failed to evaluate", summary.errors.len())));
    }
    Ok(Outcome::Ok)
}

fn index_j(j: u32, dim: usize) -> Result<f64> {
    if j as usize >= dim {
        bail!("--j must be an integer in 0..={} in dimension {dim}", dim - 1);
    }
    Ok(f64::from(j))
}

fn solve_config(args: &SolveArgs, dim: usize) -> Result<SolveConfig> {
    let q_body = load_q_body(args.q_body.as_deref(), dim)?;
    let e = &args.exponents;
    let mut config = SolveConfig::new(e.p, e.q, index_j(e.j, dim)?, q_body);
    config.grad_tol = args.tol;
    config.max_iters = args.max_iters;
    config.verify_tol = args.verify_tol;
    config.grid = args.grid.grid();
    config.require_even = !args.allow_odd;
    config.unsafe_params = args.unsafe_params;
    if let Some(path) = &args.init_body {
        config.init = Init::FromBody(load_body(path, dim)?);
    }
    Ok(config)
}

fn solve_outcome(report: &SolveReport) -> Outcome {
    match report.status {
        SolveStatus::Converged => Outcome::Ok,
        status => Outcome::Finding(format!("solve ended with status {status:?}")),
    }
}

fn trace_csv(cli: &Cli, report: &SolveReport) -> Result<()> {
    csv_table(
        cli,
        &["iteration", "phi", "grad_norm", "step"],
        report.trace.iter().map(|t| {
            vec![t.iteration.to_string(), t.phi.to_string(), t.grad_norm.to_string(), t.step.to_string()]
        }),
    )
}

fn round_trip(cli: &Cli, body: &Path, args: &SolveArgs) -> Result<Outcome> {
    let m = load_body(body, args.grid.dimension)?;
    let m0 = m.as_polytope().ok_or_else(|| anyhow!("{}: round-trip needs a polytope", body.display()))?.clone();
    let config = solve_config(args, m0.dim())?;
    let params = MeasureParams::new(config.p, config.q, config.j, config.q_body.clone());
    let (mu, err) = curvature_measure(&m0, &params, &config.grid)?;
    // Quadrature leaves antipodal atoms of symmetric bodies unequal at the
    // rounding level; average them so the evenness check sees the exact case.
    let mu: DiscreteSphericalMeasure = if m0.is_origin_symmetric() { even_part(&mu)? } else { mu };
    let target = TargetMeasure::new(mu.clone(), !args.allow_odd)?;
    let report = solve(&target, &config)?;
    let support_error = report
        .support
        .iter()
        .zip(m0.support_numbers())
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    emit(
        cli,
        &json!({
            "original": BodySpec::from_body(&Body::PolytopeH(m0.clone())),
            "measure": measure_to_json(&mu),
            "measure_error_estimate": err,
            "support_error": support_error,
            "report": report,
        }),
    )?;
    trace_csv(cli, &report)?;
    Ok(solve_outcome(&report))
}

fn fixtures(cli: &Cli, dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(dir)?;
    let body = |b: Body| BodySpec::from_body(&b);
    let files: Vec<(&str, serde_json::Value)> = vec![
        ("disk.json", serde_json::to_value(body(Body::unit_ball(2)))?),
        ("ball3.json", serde_json::to_value(body(Body::unit_ball(3)))?),
        ("square.json", serde_json::to_value(body(Body::PolytopeH(HPolytope::cube(2, 1.0)?)))?),
        ("diamond.json", serde_json::to_value(body(Body::PolytopeH(HPolytope::cross_polytope(2, 1.0)?)))?),
        ("hexagon.json", serde_json::to_value(body(Body::PolytopeH(HPolytope::regular_polygon(6, 1.0, 0.0)?)))?),
        ("cube.json", serde_json::to_value(body(Body::PolytopeH(HPolytope::cube(3, 1.0)?)))?),
        ("octahedron.json", serde_json::to_value(body(Body::PolytopeH(HPolytope::cross_polytope(3, 1.0)?)))?),
        ("ellipse.json", serde_json::to_value(body(Body::ellipsoid(vec![2.0, 1.0])?))?),
        ("square-measure.json", measure_to_json(&square_measure()?)),
        ("directions2.json", json!([[1, 0], [1, 1], [0, 1], [-1, 2], [-1, 0], [-1, -1], [0, -1], [3, -1]])),
        ("directions3.json", json!([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [-1, 2, 0.5], [0, 0, -1]])),
    ];
    let mut written = Vec::new();
    for (name, value) in files {
        let path = dir.join(name);
        write_json(&path, &value)?;
        written.push(path.display().to_string());
    }
    emit(cli, &json!({ "written": written }))?;
    Ok(Outcome::Ok)
}

/// Unit atoms on `±e_1, ±e_2`; the unit square solves it for `p = 1, q = 2`.
fn square_measure() -> pqmix::Result<DiscreteSphericalMeasure> {
    let normals = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
        .iter()
        .map(|c| UnitDirection::from_slice(c))
        .collect::<pqmix::Result<Vec<_>>>()?;
    DiscreteSphericalMeasure::from_parts(&normals, &[1.0; 4])
}
