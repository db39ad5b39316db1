use pqmix::geometry::{apply_linear, convex_hull_of_radial, lp_combination, polar, wulff_shape, NormalSet};
use pqmix::inequality::BodyGenerator;
use pqmix::{Body, Matrix, UnitDirection, Vector};
use proptest::prelude::*;

fn directions(g: &mut BodyGenerator, count: usize) -> Vec<Vector> {
    (0..count).map(|_| g.direction().into_vector()).collect()
}

fn convex_body(g: &mut BodyGenerator) -> Body {
    g.body().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn radial_and_support_are_homogeneous(seed in any::<u64>(), dim in 2usize..=3, lambda in 0.01f64..100.0) {
        let mut g = BodyGenerator::new(seed, dim);
        let m = convex_body(&mut g);
        for u in directions(&mut g, 16) {
            let (r, h) = (m.radial(&u).unwrap(), m.support(&u).unwrap());
            let x = &u * lambda;
            prop_assert!((m.radial(&x).unwrap() * lambda - r).abs() <= 1e-12 * r);
            prop_assert!((m.support(&x).unwrap() / lambda - h).abs() <= 1e-12 * h);
        }
    }

    #[test]
    fn polar_swaps_radial_and_support(seed in any::<u64>(), dim in 2usize..=3) {
        let mut g = BodyGenerator::new(seed, dim);
        let m = convex_body(&mut g);
        let pm = polar(&m).unwrap();
        let ppm = polar(&pm).unwrap();
        for u in directions(&mut g, 256) {
            prop_assert!((pm.radial(&u).unwrap() * m.support(&u).unwrap() - 1.0).abs() <= 1e-10);
            let (a, b) = (ppm.radial(&u).unwrap(), m.radial(&u).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * b);
            let (a, b) = (ppm.support(&u).unwrap(), m.support(&u).unwrap());
            prop_assert!((a - b).abs() <= 1e-10 * b);
        }
    }

    #[test]
    fn polar_of_wulff_shape_is_hull_of_reciprocals(seed in any::<u64>(), dim in 2usize..=3, m in 4usize..=30) {
        let mut g = BodyGenerator::new(seed, dim);
        let normals: Vec<UnitDirection> = (0..m.max(dim + 1)).map(|_| g.direction()).collect();
        let support: Vec<f64> = normals.iter().map(|_| g.uniform(0.5, 2.0)).collect();
        // a bounded Wulff shape needs normals outside any closed hemisphere
        let wulff = match wulff_shape(&normals, &support) {
            Ok(w) => w,
            Err(_) => return Ok(()),
        };
        let lhs = polar(&Body::polytope(wulff.polytope)).unwrap();
        let rhs = convex_hull_of_radial(&normals, &support.iter().map(|h| 1.0 / h).collect::<Vec<_>>()).unwrap();
        for u in directions(&mut g, 256) {
            let (a, b) = (lhs.radial(&u).unwrap(), rhs.radial(&u).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn radial_gauss_picks_the_binding_facet(seed in any::<u64>(), dim in 2usize..=3) {
        let mut g = BodyGenerator::new(seed, dim);
        let body = g.polytope().unwrap();
        let p = body.as_polytope().unwrap();
        let polar_vertices = p.polar_vertices();
        for u in directions(&mut g, 64) {
            let i = p.radial_gauss(&u);
            let r = p.radial(&u);
            let (v, h) = (p.normals(), p.support_numbers());
            prop_assert!((r * u.dot(v[i].as_vector()) - h[i]).abs() <= 1e-12 * h[i].max(1.0));
            for k in 0..p.len() {
                let c = u.dot(v[k].as_vector());
                if c > 0.0 {
                    prop_assert!(r * c <= h[k] + 1e-12);
                }
            }
            // the polar vertex dual to facet i supports the polar body in direction u
            let best = polar_vertices.iter().map(|w| w.dot(&u)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((polar_vertices[i].dot(&u) - best).abs() <= 1e-12 * best.abs().max(1.0));
            prop_assert!((best * r - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn lp_combination_commutes_with_linear_maps(seed in any::<u64>(), dim in 2usize..=3, p in 0.5f64..4.0, k in 0.2f64..2.0, l in 0.2f64..2.0) {
        let mut g = BodyGenerator::new(seed, dim);
        let m = g.polytope().unwrap();
        let n = g.polytope().unwrap();
        let phi = loop {
            let a = Matrix::from_fn(dim, dim, |i, j| f64::from(i == j) + g.uniform(-0.4, 0.4));
            if a.determinant().abs() > 0.3 {
                break a;
            }
        };
        let mut normals: Vec<UnitDirection> = m.as_polytope().unwrap().normals().to_vec();
        normals.extend(n.as_polytope().unwrap().normals().iter().cloned());
        // normals of φK are φ^{-T} v, normalized
        let inv_t = phi.clone().try_inverse().unwrap().transpose();
        let image: Vec<UnitDirection> = normals.iter().map(|v| UnitDirection::new(&inv_t * v.as_vector()).unwrap()).collect();
        let before = apply_linear(&lp_combination(&m, &n, k, l, p, &NormalSet::Explicit(normals)).unwrap(), &phi).unwrap();
        let after = lp_combination(&apply_linear(&m, &phi).unwrap(), &apply_linear(&n, &phi).unwrap(), k, l, p, &NormalSet::Explicit(image.clone())).unwrap();
        for v in image.iter().map(|v| v.as_vector()).chain(&directions(&mut g, 32)) {
            let (a, b) = (before.support(v).unwrap(), after.support(v).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}
