use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("body is not convex; support function and polar are undefined")]
    NonConvexBody,
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("non-finite coordinate in input vector")]
    NonFiniteVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("normals lie in a closed hemisphere (margin {margin:.3e}); the Wulff shape is unbounded")]
    UnboundedWulffShape { margin: f64 },
    #[error("normals {first} and {second} coincide")]
    DuplicateNormals { first: usize, second: usize },
    #[error("support value {value} at index {index} is not a positive finite number")]
    InvalidSupport { index: usize, value: f64 },
    #[error("matrix is singular (|det| = {det:.3e})")]
    SingularMatrix { det: f64 },
    #[error("L_p combination is not strictly positive at normal {index}")]
    NonPositiveCombination { index: usize },
    #[error("scheme {scheme} is not available in dimension {dim}")]
    UnsupportedScheme { scheme: &'static str, dim: usize },
    #[error("integrand is not finite at node {node}")]
    NonFiniteIntegrand { node: usize },
    #[error("radial Gauss map is not available for this body")]
    UnsupportedGaussMap,
    #[error("measure is not even: atom {index} has no antipodal partner of equal mass")]
    NotEvenMeasure { index: usize },
    #[error("measure is concentrated on a great subsphere (min eigenvalue {min_eigenvalue:.3e}, trace {trace:.3e})")]
    ConcentratedMeasure { min_eigenvalue: f64, trace: f64 },
    #[error("objective is not finite")]
    NonFiniteObjective,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}
