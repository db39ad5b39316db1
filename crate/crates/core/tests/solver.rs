use pqmix::inequality::BodyGenerator;
use pqmix::measure::curvature_measure;
use pqmix::solver::{even_part, phi_gradient, phi_objective, solve, Init, SolveConfig, SolveReport, SolveStatus, TargetMeasure};
use pqmix::{Body, DiscreteSphericalMeasure, HPolytope, MeasureParams};
use proptest::prelude::*;

fn symmetric_polytope(g: &mut BodyGenerator, facets: usize) -> HPolytope {
    g.symmetric = true;
    g.max_facets = facets;
    g.polytope().unwrap().as_polytope().unwrap().clone()
}

fn target_of(m: &HPolytope, cfg: &SolveConfig) -> TargetMeasure {
    let params = MeasureParams::new(cfg.p, cfg.q, cfg.j, cfg.q_body.clone());
    let (mu, _) = curvature_measure(m, &params, &cfg.grid).unwrap();
    TargetMeasure::new(even_part(&mu).unwrap(), true).unwrap()
}

fn assert_ascent(r: &SolveReport) {
    for w in r.trace.windows(2) {
        let noise = 1e-12 * (w[0].phi.abs() + 1.0);
        assert!(w[1].phi >= w[0].phi - noise, "{:?} then {:?}", w[0], w[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn round_trips_ascend_and_fix_the_scale(seed in any::<u64>(), p in 0.5f64..2.5, gap in 0.3f64..2.0, j in 0.0f64..1.0) {
        let mut g = BodyGenerator::new(seed, 2);
        let m = symmetric_polytope(&mut g, 10);
        let cfg = SolveConfig::new(p, p + gap, j, g.ellipsoid().unwrap());
        let target = target_of(&m, &cfg);
        let r = solve(&target, &cfg).unwrap();
        prop_assert_eq!(r.status, SolveStatus::Converged);
        assert_ascent(&r);
        prop_assert!(r.scale_residual <= 1e-10, "{}", r.scale_residual);
        prop_assert!(r.max_residual <= r.residual_bound + r.residual_error_estimate, "{} > {}", r.max_residual, r.residual_bound);
        // a second start from another smooth body reaches the same polytope
        let other = solve(&target, &SolveConfig { init: Init::FromBody(g.ellipsoid().unwrap()), ..cfg }).unwrap();
        for (a, b) in r.support.iter().zip(&other.support) {
            prop_assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
        }
    }

    #[test]
    fn equal_exponents_fix_the_body_up_to_dilation(seed in any::<u64>(), p in 0.5f64..3.0) {
        let mut g = BodyGenerator::new(seed, 2);
        let m = symmetric_polytope(&mut g, 10);
        let cfg = SolveConfig::new(p, p, 0.0, Body::unit_ball(2));
        let target = target_of(&m, &cfg);
        let normalized = |init: Init| {
            let r = solve(&target, &SolveConfig { init, ..cfg.clone() }).unwrap();
            assert_eq!(r.status, SolveStatus::Converged);
            assert!(r.up_to_scale);
            assert_ascent(&r);
            let mean = r.support.iter().map(|h| h.ln()).sum::<f64>() / r.support.len() as f64;
            r.support.iter().map(|h| h / mean.exp()).collect::<Vec<_>>()
        };
        let a = normalized(Init::Uniform);
        let b = normalized(Init::FromBody(g.ellipsoid().unwrap()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn spatial_gradient_matches_differences(seed in any::<u64>(), p in 0.5f64..3.0, q in 0.5f64..3.0, j in 0usize..=1) {
        let mut g = BodyGenerator::new(seed, 3);
        let m = symmetric_polytope(&mut g, 8);
        let masses: Vec<f64> = (0..m.len()).map(|_| g.uniform(0.5, 2.0)).collect();
        let mu = DiscreteSphericalMeasure::from_parts(m.normals(), &masses).unwrap();
        let cfg = SolveConfig::new(p, q, j as f64, g.body().unwrap());
        let h: Vec<f64> = m.support_numbers().iter().map(|h| h * g.uniform(-0.05, 0.05).exp()).collect();
        let grad = phi_gradient(&h, &mu, &cfg).unwrap();
        prop_assert!(grad.iter().sum::<f64>().abs() <= 1e-10);
        let step: f64 = 1e-5;
        for i in 0..h.len() {
            let (mut hp, mut hm) = (h.clone(), h.clone());
            hp[i] *= step.exp();
            hm[i] *= (-step).exp();
            let fd = (phi_objective(&hp, &mu, &cfg).unwrap() - phi_objective(&hm, &mu, &cfg).unwrap()) / (2.0 * step);
            prop_assert!((fd - grad[i]).abs() <= 1e-3, "{i}: {fd} vs {}", grad[i]);
        }
    }
}

#[test]
fn spatial_round_trip() {
    let cube = HPolytope::cube(3, 1.0).unwrap().scaled(0.8);
    let cfg = SolveConfig::new(2.0, 3.0, 1.0, Body::ellipsoid(vec![1.2, 0.9, 1.0]).unwrap());
    let r = solve(&target_of(&cube, &cfg), &cfg).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert_ascent(&r);
    for (a, b) in r.support.iter().zip(cube.support_numbers()) {
        assert!((a - b).abs() <= 5e-3 * b, "{a} vs {b}");
    }
}
