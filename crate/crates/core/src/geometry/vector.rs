use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// A point of S^{n-1}. Renormalized on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitDirection(Vector);

impl UnitDirection {
    pub fn new(v: Vector) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteVector);
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self(v / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(Vector::from_column_slice(coords))
    }

    /// `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        Self(Vector::from_vec(vec![theta.cos(), theta.sin()]))
    }

    /// Wraps a vector already known to have unit length.
    pub(crate) fn new_unchecked(v: Vector) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    /// Polar angle in `[0, 2π)`; only meaningful in the plane.
    pub fn angle(&self) -> f64 {
        let a = self.0[1].atan2(self.0[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    pub fn negated(&self) -> Self {
        Self(-&self.0)
    }
}

impl Deref for UnitDirection {
    type Target = Vector;

    fn deref(&self) -> &Vector {
        &self.0
    }
}

/// Volume ω_n of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * ball_volume(n - 2),
    }
}

/// Surface area n·ω_n of S^{n-1}.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

pub(crate) fn check_finite(x: &Vector) -> Result<()> {
    if x.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteVector)
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Unit normal of the hyperplane through the origin spanned by `rows`
/// (n-1 vectors in R^n), via cofactor expansion. `None` if degenerate.
pub(crate) fn orthogonal_complement(rows: &[Vector]) -> Option<Vector> {
    let n = rows.first()?.len();
    debug_assert_eq!(rows.len() + 1, n);
    let mut normal = Vector::zeros(n);
    for col in 0..n {
        let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
            let cc = if c < col { c } else { c + 1 };
            rows[r][cc]
        });
        let sign = if (col + n - 1) % 2 == 0 { 1.0 } else { -1.0 };
        normal[col] = sign * minor.determinant();
    }
    let norm = normal.norm();
    let scale = rows.iter().map(|r| r.norm()).product::<f64>().max(f64::MIN_POSITIVE);
    if norm <= 1e-13 * scale {
        None
    } else {
        Some(normal / norm)
    }
}
