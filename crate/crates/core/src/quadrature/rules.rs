//! One-dimensional and triangle rules.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::{Matrix3, Vector3};

/// Gauss–Legendre nodes and weights on `[a, b]`, nodes in increasing order.
pub(crate) fn gauss_legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order.max(1)).expect("order is at least one");
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut out: Vec<(f64, f64)> = GaussLegendre::new(order)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}

/// Collapsed product rule on the flat triangle `(a, b, c)` pushed radially
/// onto the unit sphere. Returns unit nodes with solid-angle weights.
pub(crate) fn spherical_triangle(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
    rule: &[(f64, f64)],
    out: &mut Vec<(Vector3<f64>, f64)>,
) {
    let ea = a - c;
    let eb = b - c;
    let det = Matrix3::from_columns(&[ea, eb, *c]).determinant().abs();
    for &(s, ws) in rule {
        for &(t, wt) in rule {
            let x = c + ea * s + eb * ((1.0 - s) * t);
            let r = x.norm();
            out.push((x / r, ws * wt * (1.0 - s) * det / (r * r * r)));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre(5, 0.0, 2.0);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(9)).sum();
        assert_relative_eq!(s, 2f64.powi(10) / 10.0, epsilon = 1e-12);
        assert!(rule.windows(2).all(|p| p[0].0 < p[1].0));
    }

    #[test]
    fn octant_solid_angle() {
        let rule = gauss_legendre(12, 0.0, 1.0);
        let mut nodes = Vec::new();
        spherical_triangle(&Vector3::x(), &Vector3::y(), &Vector3::z(), &rule, &mut nodes);
        let area: f64 = nodes.iter().map(|n| n.1).sum();
        assert_relative_eq!(area, std::f64::consts::PI / 2.0, epsilon = 1e-6);
    }
}
