//! Individual inequality checks with quadrature-aware verdicts.
//!
//! Every check evaluates both sides on the configured grid and on the
//! half-resolution grid; the change in normalized slack is the error bound.

use serde::{Deserialize, Serialize};

use super::generator::body_label;
use crate::error::Result;
use crate::geometry::Body;
use crate::quadrature::GridConfig;
use crate::quermass::{gauss_preimage_breaks, QuermassFields};

/// Absolute slack tolerance on top of the quadrature error bound.
pub const VERDICT_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    EqualityCase,
}

/// Which side is supposed to be larger.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `lhs ≥ rhs`
    Geq,
    /// `lhs ≤ rhs`
    Leq,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Geq => Direction::Leq,
            Direction::Leq => Direction::Geq,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclicVariant {
    /// The exponent of the support ratio varies.
    FirstSlot,
    /// The exponent of `ρ_M` varies.
    SecondSlot,
    /// First slot with `Q = M`.
    FirstSlotQEqualsM,
    /// Second slot with `N = M`.
    SecondSlotNEqualsM,
}

impl CyclicVariant {
    pub const ALL: [CyclicVariant; 4] = [
        CyclicVariant::FirstSlot,
        CyclicVariant::SecondSlot,
        CyclicVariant::FirstSlotQEqualsM,
        CyclicVariant::SecondSlotNEqualsM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CyclicVariant::FirstSlot => "cyclic-first-slot",
            CyclicVariant::SecondSlot => "cyclic-second-slot",
            CyclicVariant::FirstSlotQEqualsM => "cyclic-first-slot-q-equals-m",
            CyclicVariant::SecondSlotNEqualsM => "cyclic-second-slot-n-equals-m",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub params: Params,
    pub bodies: [String; 3],
    pub lhs: f64,
    pub rhs: f64,
    pub direction: Direction,
    /// `lhs - rhs` in the stated direction over `max(|lhs|, |rhs|)`.
    pub slack: f64,
    pub verdict: Verdict,
    pub error_bound: f64,
    pub in_hypothesis: bool,
    /// Whether the three bodies are programmatic dilates of one body.
    pub dilates: bool,
}

pub fn normalized_slack(lhs: f64, rhs: f64, direction: Direction) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        return 0.0;
    }
    match direction {
        Direction::Geq => (lhs - rhs) / scale,
        Direction::Leq => (rhs - lhs) / scale,
    }
}

pub fn verdict(slack: f64, error_bound: f64) -> Verdict {
    let tol = error_bound + VERDICT_FLOOR;
    if slack < -tol {
        Verdict::Violated
    } else if slack.abs() <= tol {
        Verdict::EqualityCase
    } else {
        Verdict::Holds
    }
}

impl InequalityReport {
    /// The same comparison with the direction reversed.
    pub fn inverted(&self) -> Self {
        let direction = self.direction.flipped();
        let slack = normalized_slack(self.lhs, self.rhs, direction);
        InequalityReport { direction, slack, verdict: verdict(slack, self.error_bound), ..self.clone() }
    }
}

/// Fields for `(M, N, Q)` and for `N` alone on one grid adapted to all three.
pub(crate) struct Triple {
    pub mnq: QuermassFields,
    pub nq: QuermassFields,
}

impl Triple {
    fn new(m: &Body, n: &Body, q_body: &Body, cfg: &GridConfig) -> Result<Self> {
        let breaks = gauss_preimage_breaks(m, n);
        let grid = cfg.grid_with_breaks(&[m, n, q_body], &breaks)?;
        Ok(Triple {
            mnq: QuermassFields::new(m, Some(n), q_body, &grid)?,
            nq: QuermassFields::new(n, None, q_body, &grid)?,
        })
    }

    /// `W̃_{p,q,j}(M, N, Q)`.
    pub fn w(&self, p: f64, q: f64, j: f64) -> Result<f64> {
        self.mnq.value(p, q, j)
    }
}

pub(crate) struct Setup<'a> {
    pub name: String,
    pub params: Params,
    pub direction: Direction,
    pub in_hypothesis: bool,
    pub bodies: [&'a Body; 3],
}

pub(crate) fn run<F>(setup: Setup<'_>, cfg: &GridConfig, sides: F) -> Result<InequalityReport>
where
    F: Fn(&Triple) -> Result<(f64, f64)>,
{
    let [m, n, q_body] = setup.bodies;
    let (lhs, rhs) = sides(&Triple::new(m, n, q_body, cfg)?)?;
    let (cl, cr) = sides(&Triple::new(m, n, q_body, &cfg.coarse())?)?;
    let slack = normalized_slack(lhs, rhs, setup.direction);
    let error_bound = (slack - normalized_slack(cl, cr, setup.direction)).abs();
    Ok(InequalityReport {
        name: setup.name,
        params: setup.params,
        bodies: [body_label(m), body_label(n), body_label(q_body)],
        lhs,
        rhs,
        direction: setup.direction,
        slack,
        verdict: verdict(slack, error_bound),
        error_bound,
        in_hypothesis: setup.in_hypothesis,
        dilates: are_dilates(m, n, q_body),
    })
}

fn are_dilates(m: &Body, n: &Body, q_body: &Body) -> bool {
    m.dilation_of(n).is_some() && m.dilation_of(q_body).is_some()
}

/// Minkowski-type inequality for `W̃_{p,q,j}`, gated on `1 ≤ q/(n-j) ≤ p`.
///
/// At `j = 0` the full lower bound `V(M)^{(q-p)/n} V(N)^{p/n} Ṽ(Q)^{(n-q)/n}`
/// is checked. For `j > 0` only the Hölder step
/// `W̃_{p,q,j} ≥ W̃_{p',n-j,j}(M,N)^{q/(n-j)} W̃_j(Q)^{(n-q-j)/(n-j)}` with
/// `p' = (n-j)p/q` is checked.
pub fn check_minkowski(m: &Body, n: &Body, q_body: &Body, p: f64, q: f64, j: f64, cfg: &GridConfig) -> Result<InequalityReport> {
    let dim = m.dim() as f64;
    let a = q / (dim - j);
    let setup = Setup {
        name: if j == 0.0 { "minkowski".into() } else { "minkowski-holder-step".into() },
        params: Params { p, q, j, ..Default::default() },
        direction: Direction::Geq,
        in_hypothesis: (1.0..=p).contains(&a),
        bodies: [m, n, q_body],
    };
    run(setup, cfg, |t| {
        let lhs = t.w(p, q, j)?;
        let rhs = if j == 0.0 {
            let vm = t.w(0.0, dim, 0.0)?;
            let vn = t.nq.value(0.0, dim, 0.0)?;
            let vq = t.w(0.0, 0.0, 0.0)?;
            vm.powf((q - p) / dim) * vn.powf(p / dim) * vq.powf((dim - q) / dim)
        } else {
            let lp = t.w(p / a, dim - j, j)?;
            let wq = t.w(0.0, 0.0, j)?;
            lp.powf(a) * wq.powf(1.0 - a)
        };
        Ok((lhs, rhs))
    })
}

/// Monotonicity in the first exponent:
/// `(W̃_{p,q,j}/W̃_{q,j})^{1/p} ≥ (W̃_{p-q,q,j}/W̃_{q,j})^{1/(p-q)}`.
///
/// Both `0 < p < q` and `p < 0 < q` count as in hypothesis; they are named
/// differently so campaigns report them separately.
pub fn check_monotonic(m: &Body, n: &Body, q_body: &Body, p: f64, q: f64, j: f64, cfg: &GridConfig) -> Result<InequalityReport> {
    let (name, in_hypothesis) = if 0.0 < p && p < q {
        ("monotonic-positive", true)
    } else if p < 0.0 && 0.0 < q {
        ("monotonic-negative", true)
    } else {
        ("monotonic", false)
    };
    let setup = Setup {
        name: name.into(),
        params: Params { p, q, j, ..Default::default() },
        direction: Direction::Geq,
        in_hypothesis,
        bodies: [m, n, q_body],
    };
    run(setup, cfg, |t| {
        let base = t.w(0.0, q, j)?;
        let lhs = (t.w(p, q, j)? / base).powf(1.0 / p);
        let rhs = (t.w(p - q, q, j)? / base).powf(1.0 / (p - q));
        Ok((lhs, rhs))
    })
}

/// Cyclic inequality `W_q^{r-p} ≤ W_p^{r-q} W_r^{q-p}`, gated on `p < q < r ≤ n`,
/// where `W_t` is `W̃_{t,s,j}` (first slot) or `W̃_{s,t,j}` (second slot).
#[allow(clippy::too_many_arguments)]
pub fn check_cyclic(
    m: &Body,
    n: &Body,
    q_body: &Body,
    (p, q, r, s): (f64, f64, f64, f64),
    j: f64,
    cfg: &GridConfig,
    variant: CyclicVariant,
) -> Result<InequalityReport> {
    let bodies = match variant {
        CyclicVariant::FirstSlot | CyclicVariant::SecondSlot => [m, n, q_body],
        CyclicVariant::FirstSlotQEqualsM => [m, n, m],
        CyclicVariant::SecondSlotNEqualsM => [m, m, q_body],
    };
    let first = matches!(variant, CyclicVariant::FirstSlot | CyclicVariant::FirstSlotQEqualsM);
    let setup = Setup {
        name: variant.name().into(),
        params: Params { p, q, r: Some(r), s: Some(s), j },
        direction: Direction::Leq,
        in_hypothesis: p < q && q < r && r <= m.dim() as f64,
        bodies,
    };
    run(setup, cfg, |t| {
        let w = |x: f64| if first { t.w(x, s, j) } else { t.w(s, x, j) };
        let lhs = w(q)?.powf(r - p);
        let rhs = w(p)?.powf(r - q) * w(r)?.powf(q - p);
        Ok((lhs, rhs))
    })
}

/// Second differences of `t ↦ log W̃_{t,s,j}(M, N, Q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogConvexityReport {
    pub ts: Vec<f64>,
    pub logs: Vec<f64>,
    pub second_differences: Vec<f64>,
    pub min_second_difference: f64,
}

pub const LOG_CONVEXITY_RANGE: (f64, f64) = (-1.0, 3.0);
pub const LOG_CONVEXITY_POINTS: usize = 7;

pub fn log_convexity(m: &Body, n: &Body, q_body: &Body, s: f64, j: f64, cfg: &GridConfig) -> Result<LogConvexityReport> {
    let t = Triple::new(m, n, q_body, cfg)?;
    let (lo, hi) = LOG_CONVEXITY_RANGE;
    let step = (hi - lo) / (LOG_CONVEXITY_POINTS - 1) as f64;
    let ts: Vec<f64> = (0..LOG_CONVEXITY_POINTS).map(|k| lo + step * k as f64).collect();
    let logs = ts.iter().map(|&x| Ok(t.w(x, s, j)?.ln())).collect::<Result<Vec<_>>>()?;
    let second_differences: Vec<f64> = logs.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let min_second_difference = second_differences.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LogConvexityReport { ts, logs, second_differences, min_second_difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HPolytope;

    fn cfg() -> GridConfig {
        GridConfig::with_resolution(24)
    }

    #[test]
    fn balls_give_equality_with_volume_on_both_sides() {
        let b = Body::unit_ball(2);
        let r = check_minkowski(&b, &b, &b, 2.0, 2.0, 0.0, &cfg()).unwrap();
        assert!((r.lhs - std::f64::consts::PI).abs() < 1e-12);
        assert!((r.rhs - std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::EqualityCase);
        assert!(r.dilates && r.in_hypothesis);
    }

    #[test]
    fn dilates_are_equality_cases() {
        let m = Body::ball(2, 2.0).unwrap();
        let n = Body::unit_ball(2);
        let q = Body::ball(2, 3.0).unwrap();
        let square = Body::polytope(HPolytope::cube(2, 1.0).unwrap());
        let (sn, sq) = (square.scaled(0.5).unwrap(), square.scaled(2.5).unwrap());
        for (m, n, q) in [(&m, &n, &q), (&square, &sn, &sq)] {
            let reports = [
                check_minkowski(m, n, q, 2.0, 2.0, 0.0, &cfg()).unwrap(),
                check_minkowski(m, n, q, 1.5, 1.0, 1.0, &cfg()).unwrap(),
                check_monotonic(m, n, q, 1.0, 2.0, 0.0, &cfg()).unwrap(),
                check_monotonic(m, n, q, -1.0, 2.0, 0.0, &cfg()).unwrap(),
            ];
            let cyclic = CyclicVariant::ALL.map(|v| check_cyclic(m, n, q, (0.5, 1.0, 2.0, 1.0), 0.0, &cfg(), v).unwrap());
            for r in reports.iter().chain(&cyclic) {
                assert!(r.slack.abs() <= 1e-8, "{}: {}", r.name, r.slack);
                assert_eq!(r.verdict, Verdict::EqualityCase, "{}", r.name);
            }
        }
    }

    #[test]
    fn strict_cases_hold_and_invert_to_violations() {
        let m = Body::polytope(HPolytope::cube(2, 1.0).unwrap());
        let n = Body::ellipsoid(vec![2.0, 0.5]).unwrap();
        let q = Body::polytope(HPolytope::cross_polytope(2, 1.5).unwrap());
        let r = check_minkowski(&m, &n, &q, 2.0, 2.0, 0.0, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!(r.error_bound < 1e-6, "{r:?}");
        assert_eq!(r.inverted().verdict, Verdict::Violated);
        let r = check_cyclic(&m, &n, &q, (0.5, 1.0, 2.0, 1.0), 0.0, &cfg(), CyclicVariant::SecondSlot).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
    }

    #[test]
    fn hypothesis_gates() {
        let b = Body::unit_ball(2);
        assert!(!check_minkowski(&b, &b, &b, 0.5, 2.0, 0.0, &cfg()).unwrap().in_hypothesis);
        assert!(!check_monotonic(&b, &b, &b, 3.0, 2.0, 0.0, &cfg()).unwrap().in_hypothesis);
        let c = check_cyclic(&b, &b, &b, (0.5, 1.0, 3.0, 1.0), 0.0, &cfg(), CyclicVariant::FirstSlot).unwrap();
        assert!(!c.in_hypothesis);
    }

    #[test]
    fn log_convex_in_first_exponent() {
        let m = Body::polytope(HPolytope::regular_polygon(5, 1.0, 0.2).unwrap());
        let n = Body::ellipsoid(vec![1.5, 0.7]).unwrap();
        let q = Body::unit_ball(2);
        let rep = log_convexity(&m, &n, &q, 1.0, 0.0, &cfg()).unwrap();
        assert_eq!(rep.ts.len(), 7);
        assert!(rep.min_second_difference >= -1e-9, "{rep:?}");
    }
}
