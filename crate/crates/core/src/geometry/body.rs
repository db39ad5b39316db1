use super::polytope::{HPolytope, VPolytope};
use super::vector::{check_dim, check_finite, Matrix, Vector};
use super::UnitDirection;
use crate::error::{Error, Result};

/// A convex body or star body with the origin in its interior.
///
/// Wrapper variants (`Linear`, `Polar`, `RadialScale`) evaluate through the
/// transform rules for support and radial functions. When the wrapped body is
/// polytopal they also cache the explicit H-description, which quadrature uses
/// to split the sphere along facet cones.
#[derive(Clone, Debug)]
pub enum Body {
    Ball { dim: usize, radius: f64 },
    Ellipsoid { semiaxes: Vec<f64> },
    PolytopeH(HPolytope),
    PolytopeV(VPolytope),
    Linear(LinearImage),
    Polar(PolarBody),
    /// Star body with radial function `max(ρ_a, ρ_b)`.
    StarUnion(Box<Body>, Box<Body>),
    /// Star body with radial function `min(ρ_a, ρ_b)`.
    StarIntersection(Box<Body>, Box<Body>),
    RadialScale { factor: f64, inner: Box<Body>, canonical: Option<HPolytope> },
    /// `{x : |x_1| ≤ α, |(x_2, …, x_n)| ≤ 1}`.
    Slab { dim: usize, alpha: f64 },
}

#[derive(Clone, Debug)]
pub struct LinearImage {
    pub(crate) matrix: Matrix,
    pub(crate) inverse: Matrix,
    pub(crate) inner: Box<Body>,
    pub(crate) canonical: Option<HPolytope>,
}

impl LinearImage {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inner(&self) -> &Body {
        &self.inner
    }
}

#[derive(Clone, Debug)]
pub struct PolarBody {
    pub(crate) inner: Box<Body>,
    pub(crate) canonical: Option<HPolytope>,
}

impl PolarBody {
    pub fn inner(&self) -> &Body {
        &self.inner
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
    }
}

impl Body {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        positive("radius", radius)?;
        Ok(Body::Ball { dim, radius })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Body::Ball { dim, radius: 1.0 }
    }

    pub fn ellipsoid(semiaxes: Vec<f64>) -> Result<Self> {
        if semiaxes.len() < 2 {
            return Err(Error::UnsupportedDimension(semiaxes.len()));
        }
        for &a in &semiaxes {
            positive("semiaxis", a)?;
        }
        Ok(Body::Ellipsoid { semiaxes })
    }

    pub fn polytope(p: HPolytope) -> Self {
        Body::PolytopeH(p)
    }

    pub fn polytope_v(points: Vec<Vector>) -> Result<Self> {
        Ok(Body::PolytopeV(VPolytope::new(points)?))
    }

    pub fn slab(dim: usize, alpha: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        positive("alpha", alpha)?;
        Ok(Body::Slab { dim, alpha })
    }

    pub fn star_union(a: Body, b: Body) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        Ok(Body::StarUnion(Box::new(a), Box::new(b)))
    }

    pub fn star_intersection(a: Body, b: Body) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        Ok(Body::StarIntersection(Box::new(a), Box::new(b)))
    }

    /// `λ·K`, collapsing to a closed form where one exists.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("scale factor", factor)?;
        Ok(match self {
            Body::Ball { dim, radius } => Body::Ball { dim: *dim, radius: radius * factor },
            Body::Ellipsoid { semiaxes } => Body::Ellipsoid { semiaxes: semiaxes.iter().map(|a| a * factor).collect() },
            Body::PolytopeH(p) => Body::PolytopeH(p.scaled(factor)),
            Body::RadialScale { factor: f, inner, .. } => inner.scaled(f * factor)?,
            other => Body::RadialScale {
                factor,
                canonical: other.as_polytope().map(|p| p.scaled(factor)),
                inner: Box::new(other.clone()),
            },
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Ball { dim, .. } | Body::Slab { dim, .. } => *dim,
            Body::Ellipsoid { semiaxes } => semiaxes.len(),
            Body::PolytopeH(p) => p.dim(),
            Body::PolytopeV(p) => p.hull().dim(),
            Body::Linear(l) => l.inner.dim(),
            Body::Polar(p) => p.inner.dim(),
            Body::StarUnion(a, _) | Body::StarIntersection(a, _) => a.dim(),
            Body::RadialScale { inner, .. } => inner.dim(),
        }
    }

    /// Convexity flag. Star unions and intersections are treated as star-only.
    pub fn is_convex(&self) -> bool {
        match self {
            Body::StarUnion(..) | Body::StarIntersection(..) => false,
            Body::Linear(l) => l.inner.is_convex(),
            Body::RadialScale { inner, .. } => inner.is_convex(),
            _ => true,
        }
    }

    /// Explicit facet description when the body is a polytope.
    pub fn as_polytope(&self) -> Option<&HPolytope> {
        match self {
            Body::PolytopeH(p) => Some(p),
            Body::PolytopeV(v) => Some(v.hull()),
            Body::Linear(l) => l.canonical.as_ref(),
            Body::Polar(p) => p.canonical.as_ref(),
            Body::RadialScale { canonical, .. } => canonical.as_ref(),
            _ => None,
        }
    }

    /// Support function `h_M(x)`.
    pub fn support(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        if !self.is_convex() {
            return Err(Error::NonConvexBody);
        }
        Ok(self.h(x))
    }

    /// Radial function `ρ_M(x)`, homogeneous of degree -1.
    pub fn radial(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        if x.iter().all(|&c| c == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(self.rho(x))
    }

    /// Gauge `‖x‖_M`: zero at the origin, `1/ρ_M(x)` elsewhere.
    pub fn norm(&self, x: &Vector) -> f64 {
        if x.iter().all(|&c| c == 0.0) {
            0.0
        } else {
            1.0 / self.rho(x)
        }
    }

    /// Unchecked support evaluation for convex bodies.
    pub(crate) fn h(&self, x: &Vector) -> f64 {
        match self {
            Body::Ball { radius, .. } => radius * x.norm(),
            Body::Ellipsoid { semiaxes } => {
                semiaxes.iter().zip(x.iter()).map(|(a, c)| (a * c).powi(2)).sum::<f64>().sqrt()
            }
            Body::PolytopeH(p) => p.support(x),
            Body::PolytopeV(v) => v.support(x),
            Body::Linear(l) => l.inner.h(&(l.matrix.transpose() * x)),
            Body::Polar(p) => {
                if x.iter().all(|&c| c == 0.0) {
                    0.0
                } else {
                    1.0 / p.inner.rho(x)
                }
            }
            Body::RadialScale { factor, inner, .. } => factor * inner.h(x),
            Body::Slab { alpha, .. } => alpha * x[0].abs() + x.rows(1, x.len() - 1).norm(),
            Body::StarUnion(..) | Body::StarIntersection(..) => f64::NAN,
        }
    }

    /// Unchecked radial evaluation; `x` must be nonzero.
    pub fn rho(&self, x: &Vector) -> f64 {
        match self {
            Body::Ball { radius, .. } => radius / x.norm(),
            Body::Ellipsoid { semiaxes } => {
                1.0 / semiaxes.iter().zip(x.iter()).map(|(a, c)| (c / a).powi(2)).sum::<f64>().sqrt()
            }
            Body::PolytopeH(p) => p.radial(x),
            Body::PolytopeV(v) => v.hull().radial(x),
            Body::Linear(l) => l.inner.rho(&(&l.inverse * x)),
            Body::Polar(p) => 1.0 / p.inner.h(x),
            Body::StarUnion(a, b) => a.rho(x).max(b.rho(x)),
            Body::StarIntersection(a, b) => a.rho(x).min(b.rho(x)),
            Body::RadialScale { factor, inner, .. } => factor * inner.rho(x),
            Body::Slab { alpha, .. } => {
                let axial = x[0].abs();
                let lateral = x.rows(1, x.len() - 1).norm();
                let cap = if axial > 0.0 { alpha / axial } else { f64::INFINITY };
                let side = if lateral > 0.0 { 1.0 / lateral } else { f64::INFINITY };
                cap.min(side)
            }
        }
    }

    /// Radial Gauss map: the outer unit normal `α_M(u)` at `ρ_M(u)u` together
    /// with `h_M(α_M(u))`.
    ///
    /// Polytopes use the facet of [`HPolytope::radial_gauss`]; smooth bodies use
    /// closed forms. Star-only bodies have no Gauss map.
    pub fn gauss_normal(&self, u: &Vector) -> Result<(Vector, f64)> {
        if let Some(p) = self.as_polytope() {
            let i = p.radial_gauss(u);
            return Ok((p.normals()[i].as_vector().clone(), p.support_numbers()[i]));
        }
        let x = u * self.rho(u);
        let normal = match self {
            Body::Ball { .. } => u.normalize(),
            Body::Ellipsoid { semiaxes } => {
                Vector::from_iterator(x.len(), x.iter().zip(semiaxes).map(|(c, a)| c / (a * a))).normalize()
            }
            Body::Linear(l) => {
                let y = &l.inverse * &x;
                let (inner_normal, _) = l.inner.gauss_normal(&y.normalize())?;
                (l.inverse.transpose() * inner_normal).normalize()
            }
            Body::Polar(p) => match p.inner.as_ref() {
                Body::Ball { .. } => u.normalize(),
                Body::Ellipsoid { semiaxes } => {
                    Vector::from_iterator(x.len(), x.iter().zip(semiaxes).map(|(c, a)| c * a * a)).normalize()
                }
                _ => return Err(Error::UnsupportedGaussMap),
            },
            Body::RadialScale { inner, .. } => inner.gauss_normal(u)?.0,
            Body::Slab { alpha, .. } => {
                let axial = u[0].abs();
                let lateral = u.rows(1, u.len() - 1).norm();
                if axial > 0.0 && alpha / axial <= 1.0 / lateral.max(f64::MIN_POSITIVE) {
                    let mut e = Vector::zeros(u.len());
                    e[0] = u[0].signum();
                    e
                } else {
                    let mut e = u.clone();
                    e[0] = 0.0;
                    e.normalize()
                }
            }
            _ => return Err(Error::UnsupportedGaussMap),
        };
        let h = x.dot(&normal);
        Ok((normal, h))
    }

    /// `Some(λ)` when `self = λ·other` is evident from the structure.
    pub fn dilation_of(&self, other: &Body) -> Option<f64> {
        if self.dim() != other.dim() {
            return None;
        }
        match (self, other) {
            (Body::RadialScale { factor, inner, .. }, _) => inner.dilation_of(other).map(|l| l * factor),
            (_, Body::RadialScale { factor, inner, .. }) => self.dilation_of(inner).map(|l| l / factor),
            (Body::Ball { radius: a, .. }, Body::Ball { radius: b, .. }) => Some(a / b),
            (Body::Ellipsoid { semiaxes: a }, Body::Ellipsoid { semiaxes: b }) => proportional(a, b),
            (Body::PolytopeH(a), Body::PolytopeH(b)) => {
                if a.len() != b.len()
                    || a.normals().iter().zip(b.normals()).any(|(u, v)| u.dot(v) < 1.0 - 1e-12)
                {
                    return None;
                }
                proportional(a.support_numbers(), b.support_numbers())
            }
            (Body::Linear(a), Body::Linear(b)) if a.matrix == b.matrix => a.inner.dilation_of(&b.inner),
            (Body::Polar(a), Body::Polar(b)) => a.inner.dilation_of(&b.inner).map(|l| 1.0 / l),
            (Body::Slab { alpha: a, .. }, Body::Slab { alpha: b, .. }) if a == b => Some(1.0),
            _ => None,
        }
    }

    /// Angles in `[0, 2π)` where the radial function of a planar body may fail
    /// to be smooth.
    pub fn kink_angles(&self) -> Vec<f64> {
        if self.dim() != 2 {
            return Vec::new();
        }
        if let Some(p) = self.as_polytope() {
            return p
                .vertices()
                .iter()
                .map(|w| UnitDirection::new_unchecked(w.normalize()).angle())
                .collect();
        }
        match self {
            Body::Linear(l) => l
                .inner
                .kink_angles()
                .into_iter()
                .map(|t| {
                    let d = &l.matrix * UnitDirection::from_angle(t).into_vector();
                    UnitDirection::new_unchecked(d.normalize()).angle()
                })
                .collect(),
            Body::RadialScale { inner, .. } => inner.kink_angles(),
            Body::StarUnion(a, b) | Body::StarIntersection(a, b) => {
                let mut out = a.kink_angles();
                out.extend(b.kink_angles());
                out.extend(radial_crossings(a, b));
                out
            }
            _ => Vec::new(),
        }
    }

    /// Polytopes whose facet cones bound the smooth pieces of this body's
    /// radial function (n ≥ 3 partitioning).
    pub fn partition_polytopes<'a>(&'a self, out: &mut Vec<&'a HPolytope>) {
        if let Some(p) = self.as_polytope() {
            out.push(p);
            return;
        }
        match self {
            Body::StarUnion(a, b) | Body::StarIntersection(a, b) => {
                a.partition_polytopes(out);
                b.partition_polytopes(out);
            }
            Body::RadialScale { inner, .. } => inner.partition_polytopes(out),
            _ => {}
        }
    }

    /// Values of the first coordinate of unit vectors where the radial
    /// function has a kink along a latitude circle (cylindrical slabs).
    pub fn latitude_breaks(&self) -> Vec<f64> {
        match self {
            Body::Slab { alpha, .. } => {
                let z = alpha / (1.0 + alpha * alpha).sqrt();
                vec![-z, z]
            }
            Body::RadialScale { inner, .. } => inner.latitude_breaks(),
            Body::StarUnion(a, b) | Body::StarIntersection(a, b) => {
                let mut out = a.latitude_breaks();
                out.extend(b.latitude_breaks());
                out
            }
            _ => Vec::new(),
        }
    }
}

fn proportional(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let ratio = a[0] / b[0];
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - ratio * y).abs() <= 1e-12 * x.abs())
        .then_some(ratio)
}

/// Angles where `ρ_a - ρ_b` changes sign, located by sampling and bisection.
fn radial_crossings(a: &Body, b: &Body) -> Vec<f64> {
    const SAMPLES: usize = 1024;
    let diff = |t: f64| {
        let u = UnitDirection::from_angle(t).into_vector();
        a.rho(&u) - b.rho(&u)
    };
    let step = 2.0 * std::f64::consts::PI / SAMPLES as f64;
    let mut out = Vec::new();
    let mut prev = diff(0.0);
    for k in 1..=SAMPLES {
        let t = k as f64 * step;
        let cur = diff(t);
        if prev == 0.0 {
            out.push(t - step);
        } else if prev * cur < 0.0 {
            let (mut lo, mut hi, mut flo) = (t - step, t, prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = diff(mid);
                if fm * flo > 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}
