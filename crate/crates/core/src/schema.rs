//! JSON interchange for bodies and discrete measures.
//!
//! Bodies:
//!
//! ```json
//! {"type": "ball", "radius": 1.0}
//! {"type": "ellipsoid", "semiaxes": [2.0, 1.0]}
//! {"type": "polytope-h", "normals": [[1, 0], [0, 1], [-1, 0], [0, -1]], "support": [1, 1, 1, 1]}
//! {"type": "polytope-v", "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}
//! {"type": "linear", "matrix": [[2, 0], [0, 1]], "inner": {...}}
//! {"type": "polar", "inner": {...}}
//! {"type": "star-union", "a": {...}, "b": {...}}
//! {"type": "star-intersection", "a": {...}, "b": {...}}
//! {"type": "radial-scale", "factor": 2.0, "inner": {...}}
//! {"type": "slab", "alpha": 0.5}
//! ```
//!
//! Balls and slabs carry no coordinates, so they take an optional
//! `"dimension"` and otherwise the dimension supplied by the caller. Normals
//! are normalized on load.
//!
//! Measures: `{"dimension": n, "atoms": [{"normal": [...], "mass": m}, ...]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{apply_linear, polar, Body, HPolytope, Matrix, UnitDirection, Vector};
use crate::measure::{Atom, DiscreteSphericalMeasure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
    },
    Ellipsoid {
        semiaxes: Vec<f64>,
    },
    PolytopeH {
        normals: Vec<Vec<f64>>,
        support: Vec<f64>,
    },
    PolytopeV {
        vertices: Vec<Vec<f64>>,
    },
    Linear {
        matrix: Vec<Vec<f64>>,
        inner: Box<BodySpec>,
    },
    Polar {
        inner: Box<BodySpec>,
    },
    StarUnion {
        a: Box<BodySpec>,
        b: Box<BodySpec>,
    },
    StarIntersection {
        a: Box<BodySpec>,
        b: Box<BodySpec>,
    },
    RadialScale {
        factor: f64,
        inner: Box<BodySpec>,
    },
    Slab {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
    },
}

impl BodySpec {
    /// Dimension implied by the description itself, if any.
    pub fn intrinsic_dim(&self) -> Option<usize> {
        match self {
            BodySpec::Ball { dimension, .. } | BodySpec::Slab { dimension, .. } => *dimension,
            BodySpec::Ellipsoid { semiaxes } => Some(semiaxes.len()),
            BodySpec::PolytopeH { normals, .. } => normals.first().map(Vec::len),
            BodySpec::PolytopeV { vertices } => vertices.first().map(Vec::len),
            BodySpec::Linear { matrix, inner } => Some(matrix.len()).filter(|&n| n > 0).or(inner.intrinsic_dim()),
            BodySpec::Polar { inner } | BodySpec::RadialScale { inner, .. } => inner.intrinsic_dim(),
            BodySpec::StarUnion { a, b } | BodySpec::StarIntersection { a, b } => a.intrinsic_dim().or(b.intrinsic_dim()),
        }
    }

    /// Builds the body; `default_dim` applies to balls and slabs without an
    /// explicit dimension.
    pub fn to_body(&self, default_dim: usize) -> Result<Body> {
        let dim = self.intrinsic_dim().unwrap_or(default_dim);
        match self {
            BodySpec::Ball { radius, .. } => Body::ball(dim, *radius),
            BodySpec::Ellipsoid { semiaxes } => Body::ellipsoid(semiaxes.clone()),
            BodySpec::PolytopeH { normals, support } => Ok(Body::PolytopeH(HPolytope::from_raw(normals, support)?)),
            BodySpec::PolytopeV { vertices } => {
                Body::polytope_v(vertices.iter().map(|v| Vector::from_column_slice(v)).collect())
            }
            BodySpec::Linear { matrix, inner } => {
                let inner = inner.to_body(dim)?;
                apply_linear(&inner, &matrix_from_rows(matrix, dim)?)
            }
            BodySpec::Polar { inner } => polar(&inner.to_body(dim)?),
            BodySpec::StarUnion { a, b } => Body::star_union(a.to_body(dim)?, b.to_body(dim)?),
            BodySpec::StarIntersection { a, b } => Body::star_intersection(a.to_body(dim)?, b.to_body(dim)?),
            BodySpec::RadialScale { factor, inner } => inner.to_body(dim)?.scaled(*factor),
            BodySpec::Slab { alpha, .. } => Body::slab(dim, *alpha),
        }
    }

    pub fn from_body(body: &Body) -> Self {
        let rows = |v: &[Vector]| v.iter().map(|x| x.iter().copied().collect()).collect();
        match body {
            Body::Ball { dim, radius } => BodySpec::Ball { radius: *radius, dimension: Some(*dim) },
            Body::Ellipsoid { semiaxes } => BodySpec::Ellipsoid { semiaxes: semiaxes.clone() },
            Body::PolytopeH(p) => BodySpec::PolytopeH {
                normals: p.normals().iter().map(|v| v.iter().copied().collect()).collect(),
                support: p.support_numbers().to_vec(),
            },
            Body::PolytopeV(v) => BodySpec::PolytopeV { vertices: rows(v.points()) },
            Body::Linear(l) => BodySpec::Linear {
                matrix: l.matrix().row_iter().map(|r| r.iter().copied().collect()).collect(),
                inner: Box::new(Self::from_body(l.inner())),
            },
            Body::Polar(p) => BodySpec::Polar { inner: Box::new(Self::from_body(p.inner())) },
            Body::StarUnion(a, b) => {
                BodySpec::StarUnion { a: Box::new(Self::from_body(a)), b: Box::new(Self::from_body(b)) }
            }
            Body::StarIntersection(a, b) => {
                BodySpec::StarIntersection { a: Box::new(Self::from_body(a)), b: Box::new(Self::from_body(b)) }
            }
            Body::RadialScale { factor, inner, .. } => {
                BodySpec::RadialScale { factor: *factor, inner: Box::new(Self::from_body(inner)) }
            }
            Body::Slab { dim, alpha } => BodySpec::Slab { alpha: *alpha, dimension: Some(*dim) },
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize) -> Result<Matrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
    }
    Ok(Matrix::from_fn(dim, dim, |r, c| rows[r][c]))
}

/// Serializes a polytope in the `polytope-h` body schema.
pub fn serialize_polytope<S: serde::Serializer>(p: &HPolytope, s: S) -> std::result::Result<S::Ok, S::Error> {
    BodySpec::from_body(&Body::PolytopeH(p.clone())).serialize(s)
}

pub fn parse_body(text: &str, default_dim: usize) -> Result<Body> {
    let spec: BodySpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_body(default_dim)
}

pub fn body_to_json(body: &Body) -> serde_json::Value {
    serde_json::to_value(BodySpec::from_body(body)).expect("body specs serialize")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub normal: Vec<f64>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub dimension: usize,
    pub atoms: Vec<AtomSpec>,
}

impl MeasureSpec {
    pub fn to_measure(&self) -> Result<DiscreteSphericalMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                if a.normal.len() != self.dimension {
                    return Err(Error::DimensionMismatch { expected: self.dimension, got: a.normal.len() });
                }
                Ok(Atom { normal: UnitDirection::from_slice(&a.normal)?, mass: a.mass })
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteSphericalMeasure::new(atoms)
    }

    pub fn from_measure(mu: &DiscreteSphericalMeasure) -> Self {
        MeasureSpec {
            dimension: mu.dim(),
            atoms: mu
                .atoms()
                .iter()
                .map(|a| AtomSpec { normal: a.normal.iter().copied().collect(), mass: a.mass })
                .collect(),
        }
    }
}

pub fn parse_measure(text: &str) -> Result<DiscreteSphericalMeasure> {
    let spec: MeasureSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    spec.to_measure()
}

pub fn measure_to_json(mu: &DiscreteSphericalMeasure) -> serde_json::Value {
    serde_json::to_value(MeasureSpec::from_measure(mu)).expect("measure specs serialize")
}
