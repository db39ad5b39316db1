//! Randomized campaigns over the inequality checks.

use serde::{Deserialize, Serialize};

use super::checks::{check_cyclic, check_minkowski, check_monotonic, CyclicVariant, InequalityReport, Verdict};
use super::generator::{BodyGenerator, FamilyWeights, MAX_FACETS};
use crate::error::Result;
use crate::geometry::Body;
use crate::par::map_indexed;
use crate::quadrature::GridConfig;
use crate::schema::BodySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    #[serde(alias = "5.1")]
    Minkowski,
    #[serde(alias = "5.2")]
    Monotonic,
    #[serde(alias = "5.3")]
    CyclicFirst,
    #[serde(alias = "5.4")]
    CyclicSecond,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::Minkowski, Theorem::Monotonic, Theorem::CyclicFirst, Theorem::CyclicSecond];

    /// Accepts the kebab-case name or the numeric label used on the command line.
    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    pub theorems: Vec<Theorem>,
    pub cases: usize,
    pub seed: u64,
    pub dimension: usize,
    pub grid: GridConfig,
    pub weights: FamilyWeights,
    pub symmetric: bool,
    pub max_facets: usize,
    /// Every `dilate_every`-th round of theorems uses `M, λM, μM`; 0 disables.
    pub dilate_every: usize,
    /// Harness self-check: reverse every inequality.
    pub invert: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            theorems: Theorem::ALL.to_vec(),
            cases: 0,
            seed: 0,
            dimension: 2,
            grid: GridConfig::default(),
            weights: FamilyWeights::default(),
            symmetric: false,
            max_facets: MAX_FACETS,
            dilate_every: 5,
            invert: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case: usize,
    pub theorem: Theorem,
    pub report: InequalityReport,
}

/// A violation that survived re-evaluation on the refined grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub case: usize,
    pub seed: u64,
    pub theorem: Theorem,
    pub bodies: [BodySpec; 3],
    pub grid: GridConfig,
    pub report: InequalityReport,
    pub refined: InequalityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseError {
    pub case: usize,
    pub theorem: Theorem,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub name: String,
    pub cases: usize,
    pub holds: usize,
    pub violated: usize,
    pub equality_case: usize,
    pub persistent_violations: usize,
    pub outside_hypothesis: usize,
    pub min_slack: f64,
    /// Largest `|slack|` among dilate triples.
    pub max_dilate_slack: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub cases: usize,
    pub groups: Vec<GroupSummary>,
    pub reports: Vec<CaseReport>,
    pub counterexamples: Vec<Counterexample>,
    pub errors: Vec<CaseError>,
}

impl CampaignSummary {
    pub fn persistent_violations(&self) -> usize {
        self.counterexamples.len()
    }

    pub fn max_dilate_slack(&self) -> f64 {
        self.groups.iter().map(|g| g.max_dilate_slack).fold(0.0, f64::max)
    }
}

struct Case {
    theorem: Theorem,
    bodies: [Body; 3],
    kind: Kind,
}

enum Kind {
    Minkowski { p: f64, q: f64, j: f64 },
    Monotonic { p: f64, q: f64, j: f64 },
    Cyclic { pqrs: (f64, f64, f64, f64), j: f64, variant: CyclicVariant },
}

impl Case {
    fn draw(config: &CampaignConfig, index: usize) -> Result<Self> {
        let theorem = config.theorems[index % config.theorems.len()];
        let round = index / config.theorems.len();
        let mut g = BodyGenerator::for_case(config.seed, config.dimension, index as u64)
            .with_weights(config.weights)
            .symmetric(config.symmetric);
        g.max_facets = config.max_facets;
        let dim = config.dimension as f64;
        let dilate = config.dilate_every > 0 && round % config.dilate_every == config.dilate_every - 1;
        let bodies = if dilate {
            let base = g.body()?;
            let (a, b) = (g.uniform(0.3, 3.0), g.uniform(0.3, 3.0));
            [base.clone(), base.scaled(a)?, base.scaled(b)?]
        } else {
            [g.body()?, g.body()?, g.body()?]
        };
        let j = if round.is_multiple_of(2) { 0.0 } else { 1.0 };
        let kind = match theorem {
            Theorem::Minkowski => {
                let a = g.uniform(1.0, 2.0);
                Kind::Minkowski { p: g.uniform(a, a + 2.0), q: a * (dim - j), j }
            }
            Theorem::Monotonic => {
                // Alternate the two admissible regions.
                let (p, q) = if (round / 2).is_multiple_of(2) {
                    let q = g.uniform(0.5, 3.0);
                    (q * g.uniform(0.1, 0.9), q)
                } else {
                    (g.uniform(-2.5, -0.2), g.uniform(0.3, 3.0))
                };
                Kind::Monotonic { p, q, j }
            }
            Theorem::CyclicFirst | Theorem::CyclicSecond => {
                let p = g.uniform(-1.5, dim - 0.4);
                let q = g.uniform(p + 0.1, dim - 0.2);
                let r = g.uniform(q + 0.1, dim);
                let s = g.uniform(-1.0, 2.5);
                let degenerate = (round / 2) % 2 == 1;
                let variant = match (theorem, degenerate) {
                    (Theorem::CyclicFirst, false) => CyclicVariant::FirstSlot,
                    (Theorem::CyclicFirst, true) => CyclicVariant::FirstSlotQEqualsM,
                    (_, false) => CyclicVariant::SecondSlot,
                    (_, true) => CyclicVariant::SecondSlotNEqualsM,
                };
                Kind::Cyclic { pqrs: (p, q, r, s), j, variant }
            }
        };
        Ok(Case { theorem, bodies, kind })
    }

    fn evaluate(&self, grid: &GridConfig, invert: bool) -> Result<InequalityReport> {
        let [m, n, q_body] = &self.bodies;
        let report = match self.kind {
            Kind::Minkowski { p, q, j } => check_minkowski(m, n, q_body, p, q, j, grid)?,
            Kind::Monotonic { p, q, j } => check_monotonic(m, n, q_body, p, q, j, grid)?,
            Kind::Cyclic { pqrs, j, variant } => check_cyclic(m, n, q_body, pqrs, j, grid, variant)?,
        };
        Ok(if invert { report.inverted() } else { report })
    }
}

enum Outcome {
    Report(CaseReport, Option<Box<Counterexample>>),
    Error(CaseError),
}

fn run_case(config: &CampaignConfig, index: usize) -> Outcome {
    let theorem = config.theorems[index % config.theorems.len()];
    let attempt = || -> Result<(CaseReport, Option<Counterexample>)> {
        let case = Case::draw(config, index)?;
        let report = case.evaluate(&config.grid, config.invert)?;
        let mut counterexample = None;
        if report.verdict == Verdict::Violated {
            let refined_grid = config.grid.refined();
            let refined = case.evaluate(&refined_grid, config.invert)?;
            if refined.verdict == Verdict::Violated {
                counterexample = Some(Counterexample {
                    case: index,
                    seed: config.seed,
                    theorem,
                    bodies: case.bodies.each_ref().map(BodySpec::from_body),
                    grid: refined_grid,
                    report: report.clone(),
                    refined,
                });
            }
        }
        Ok((CaseReport { case: index, theorem: case.theorem, report }, counterexample))
    };
    match attempt() {
        Ok((r, c)) => Outcome::Report(r, c.map(Box::new)),
        Err(e) => Outcome::Error(CaseError { case: index, theorem, message: e.to_string() }),
    }
}

/// Runs `config.cases` independent cases, theorems in round-robin order.
/// Cases may run in parallel; results are aggregated in case order.
pub fn fuzz_campaign(config: &CampaignConfig) -> CampaignSummary {
    if config.cases == 0 || config.theorems.is_empty() {
        return CampaignSummary::default();
    }
    let outcomes = map_indexed(config.cases, |i| run_case(config, i));
    let mut summary = CampaignSummary { cases: config.cases, ..Default::default() };
    for outcome in outcomes {
        match outcome {
            Outcome::Report(r, c) => {
                summary.reports.push(r);
                summary.counterexamples.extend(c.map(|b| *b));
            }
            Outcome::Error(e) => summary.errors.push(e),
        }
    }
    summary.groups = group(&summary);
    summary
}

fn group(summary: &CampaignSummary) -> Vec<GroupSummary> {
    let mut groups: Vec<GroupSummary> = Vec::new();
    for CaseReport { case, report, .. } in &summary.reports {
        let idx = match groups.iter().position(|g| g.name == report.name) {
            Some(i) => i,
            None => {
                groups.push(GroupSummary { name: report.name.clone(), min_slack: f64::INFINITY, ..Default::default() });
                groups.len() - 1
            }
        };
        let g = &mut groups[idx];
        g.cases += 1;
        match report.verdict {
            Verdict::Holds => g.holds += 1,
            Verdict::Violated => g.violated += 1,
            Verdict::EqualityCase => g.equality_case += 1,
        }
        if summary.counterexamples.iter().any(|c| c.case == *case) {
            g.persistent_violations += 1;
        }
        if !report.in_hypothesis {
            g.outside_hypothesis += 1;
        }
        g.min_slack = g.min_slack.min(report.slack);
        if report.dilates {
            g.max_dilate_slack = g.max_dilate_slack.max(report.slack.abs());
        }
    }
    groups.sort_by(|a, b| a.name.cmp(&b.name));
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(cases: usize, seed: u64) -> CampaignConfig {
        CampaignConfig { cases, seed, grid: GridConfig::with_resolution(16), max_facets: 10, ..Default::default() }
    }

    #[test]
    fn empty_campaign() {
        let s = fuzz_campaign(&small(0, 1));
        assert_eq!(s, CampaignSummary::default());
    }

    #[test]
    fn small_campaign_is_clean_and_reproducible() {
        let cfg = small(48, 7);
        let a = fuzz_campaign(&cfg);
        assert!(a.errors.is_empty(), "{:?}", a.errors);
        assert_eq!(a.persistent_violations(), 0, "{:?}", a.counterexamples);
        assert!(a.max_dilate_slack() <= 1e-8);
        let with_dilates = a.reports.iter().filter(|r| r.report.dilates).map(|r| r.theorem).collect::<std::collections::BTreeSet<_>>();
        assert_eq!(with_dilates.len(), 4);
        assert!(a.groups.iter().all(|g| g.outside_hypothesis == 0));
        let b = fuzz_campaign(&cfg);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn inverted_campaign_is_flagged() {
        let cfg = CampaignConfig { invert: true, ..small(12, 3) };
        let s = fuzz_campaign(&cfg);
        assert!(s.persistent_violations() > 0);
        assert!(s.counterexamples.iter().all(|c| c.refined.verdict == Verdict::Violated));
    }

    #[test]
    fn theorem_labels() {
        assert_eq!(Theorem::parse("5.3"), Some(Theorem::CyclicFirst));
        assert_eq!(Theorem::parse("monotonic"), Some(Theorem::Monotonic));
        assert_eq!(Theorem::parse("6.1"), None);
    }
}
