//! Randomized and fixed-case verification of the Minkowski-type, monotonic
//! and cyclic inequalities for `W̃_{p,q,j}`.

mod campaign;
mod checks;
mod generator;

pub use campaign::{
    fuzz_campaign, CampaignConfig, CampaignSummary, CaseError, CaseReport, Counterexample, GroupSummary, Theorem,
};
pub use checks::{
    check_cyclic, check_minkowski, check_monotonic, log_convexity, normalized_slack, verdict, CyclicVariant,
    Direction, InequalityReport, LogConvexityReport, Params, Verdict, LOG_CONVEXITY_POINTS, LOG_CONVEXITY_RANGE,
    VERDICT_FLOOR,
};
pub use generator::{body_label, BodyGenerator, Family, FamilyWeights, MAX_FACETS, SIZE_RANGE};
