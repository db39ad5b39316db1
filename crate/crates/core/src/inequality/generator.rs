//! Seeded random bodies for the inequality campaigns.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{apply_linear, hemisphere_margin, wulff_shape, Body, UnitDirection, Vector};

/// Relative frequencies of the body families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyWeights {
    pub polytope: f64,
    pub ellipsoid: f64,
    pub linear_ball: f64,
}

impl Default for FamilyWeights {
    fn default() -> Self {
        FamilyWeights { polytope: 2.0, ellipsoid: 1.0, linear_ball: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Polytope,
    Ellipsoid,
    LinearBall,
}

/// Support numbers and semiaxes are drawn from this range.
pub const SIZE_RANGE: (f64, f64) = (0.3, 3.0);
pub const MAX_FACETS: usize = 20;
/// Minimum hemisphere margin accepted for random normal sets.
const MIN_MARGIN: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct BodyGenerator {
    pub dim: usize,
    pub weights: FamilyWeights,
    pub symmetric: bool,
    pub max_facets: usize,
    rng: ChaCha8Rng,
}

impl BodyGenerator {
    pub fn new(seed: u64, dim: usize) -> Self {
        BodyGenerator {
            dim,
            weights: FamilyWeights::default(),
            symmetric: false,
            max_facets: MAX_FACETS,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent generator for one case of a campaign.
    pub fn for_case(seed: u64, dim: usize, case: u64) -> Self {
        let mut g = Self::new(seed, dim);
        g.rng.set_stream(case);
        g
    }

    pub fn with_weights(mut self, weights: FamilyWeights) -> Self {
        self.weights = weights;
        self
    }

    pub fn symmetric(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    fn size(&mut self) -> f64 {
        self.uniform(SIZE_RANGE.0, SIZE_RANGE.1)
    }

    pub fn direction(&mut self) -> UnitDirection {
        loop {
            let v = Vector::from_fn(self.dim, |_, _| self.rng.sample::<f64, _>(StandardNormal));
            if let Ok(u) = UnitDirection::new(v) {
                return u;
            }
        }
    }

    pub fn family(&mut self) -> Family {
        let w = self.weights;
        let total = w.polytope + w.ellipsoid + w.linear_ball;
        let x = self.rng.random::<f64>() * total;
        if x < w.polytope {
            Family::Polytope
        } else if x < w.polytope + w.ellipsoid {
            Family::Ellipsoid
        } else {
            Family::LinearBall
        }
    }

    pub fn body(&mut self) -> Result<Body> {
        match self.family() {
            Family::Polytope => self.polytope(),
            Family::Ellipsoid => self.ellipsoid(),
            Family::LinearBall => self.linear_ball(),
        }
    }

    /// Wulff shape of `m ∈ [n+1, max_facets]` random normals, redrawn until
    /// they are not confined to a closed hemisphere.
    pub fn polytope(&mut self) -> Result<Body> {
        let n = self.dim;
        let m = self.rng.random_range(n + 1..=self.max_facets.max(n + 1));
        let (normals, support): (Vec<UnitDirection>, Vec<f64>) = if self.symmetric {
            let pairs = m.div_ceil(2).max(n);
            let normals = self.spread(|g| {
                let half: Vec<UnitDirection> = (0..pairs).map(|_| g.direction()).collect();
                half.iter().cloned().chain(half.iter().map(UnitDirection::negated)).collect()
            });
            let half: Vec<f64> = (0..pairs).map(|_| self.size()).collect();
            let support = half.iter().chain(&half).copied().collect();
            (normals, support)
        } else {
            let normals = self.spread(|g| (0..m).map(|_| g.direction()).collect());
            let support = (0..m).map(|_| self.size()).collect();
            (normals, support)
        };
        Ok(Body::polytope(wulff_shape(&normals, &support)?.polytope))
    }

    fn spread<F>(&mut self, mut draw: F) -> Vec<UnitDirection>
    where
        F: FnMut(&mut Self) -> Vec<UnitDirection>,
    {
        loop {
            let normals = draw(self);
            let distinct = normals.iter().enumerate().all(|(i, a)| {
                normals[..i].iter().all(|b| a.as_vector().dot(b.as_vector()) < 1.0 - 1e-6)
            });
            if distinct && hemisphere_margin(&normals) > MIN_MARGIN {
                return normals;
            }
        }
    }

    pub fn ellipsoid(&mut self) -> Result<Body> {
        let axes = (0..self.dim).map(|_| self.size()).collect();
        Body::ellipsoid(axes)
    }

    /// `A·B` for a random `A` with singular values in the size range.
    pub fn linear_ball(&mut self) -> Result<Body> {
        let n = self.dim;
        let q1 = self.orthogonal();
        let q2 = self.orthogonal();
        let s = DMatrix::from_diagonal(&Vector::from_fn(n, |_, _| self.size()));
        apply_linear(&Body::unit_ball(n), &(q1 * s * q2))
    }

    fn orthogonal(&mut self) -> DMatrix<f64> {
        let n = self.dim;
        loop {
            let g = DMatrix::from_fn(n, n, |_, _| self.rng.sample::<f64, _>(StandardNormal));
            let qr = g.qr();
            let q = qr.q();
            if q.determinant().abs() > 0.5 {
                return q;
            }
        }
    }
}

/// Short name for reports.
pub fn body_label(body: &Body) -> String {
    match body {
        Body::Ball { .. } => "ball".into(),
        Body::Ellipsoid { .. } => "ellipsoid".into(),
        Body::PolytopeH(p) => format!("polytope-h[{}]", p.len()),
        Body::PolytopeV(v) => format!("polytope-v[{}]", v.points().len()),
        Body::Linear(_) => "linear-ball".into(),
        Body::Polar(_) => "polar".into(),
        Body::StarUnion(..) => "star-union".into(),
        Body::StarIntersection(..) => "star-intersection".into(),
        Body::RadialScale { inner, factor, .. } => format!("{factor}·{}", body_label(inner)),
        Body::Slab { .. } => "slab".into(),
    }
}
