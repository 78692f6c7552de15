//! Two-sided parking-spot matching: drivers and parking-spot owners rank
//! each other by distance after hard constraints (price cap, reputation
//! thresholds, schedule compatibility) prune the infeasible pairs, and a
//! queue-driven deferred-acceptance matcher produces a stable assignment.
//!
//! The crate also ships the surrounding benchmark kit: three comparison
//! matchers (random, greedy, optimal assignment), a seeded scenario
//! generator and record ingester, blocking-pair verification with an
//! exhaustive oracle for small instances, and a runner that sweeps instance
//! size and edge density while recomputing every reported metric from the
//! returned matchings.
//!
//! Everything is deterministic given a config and seed, so benchmark tables
//! reproduce byte-for-byte apart from wall-clock timings.

pub mod baselines;
pub mod domain;
pub mod matching;
pub mod preferences;
pub mod runner;
pub mod scenario;

#[cfg(test)]
pub(crate) mod testutil;

pub use baselines::{greedy_match, hungarian_match, random_match, AssignmentWeights};
pub use domain::{
    feasible, update_driver_reputation, update_spot_reputation, DomainError, Driver, DriverId,
    ParkingSpot, Point, SpotId, TimeVector, DEFAULT_REPUTATION_WEIGHT, DEFAULT_SLOTS,
    INITIAL_REPUTATION,
};
pub use matching::{
    enumerate_stable_matchings, find_blocking_pairs, is_stable, mm_match, BlockingPair, Matching,
    MatchingError, ProposalTrace, ENUMERATION_CAP,
};
pub use preferences::{
    build_driver_preferences, build_preference_lists, build_spot_preferences, DistanceModel,
    DriverLists, DriverPreferences, Edge, PreferenceError, PreferenceList, SpotLists,
    SpotPreferences,
};
pub use runner::{
    metrics_to_csv, run_matchers, summaries_to_csv, summarize, sweep_density, sweep_size,
    time_matchers, verify_scenario, CellSummary, MatcherKind, RunError, RunMetrics, VerifyCheck,
    VerifyOutcome, CSV_HEADER, SUMMARY_CSV_HEADER,
};
pub use scenario::{
    generate, ingest, ConstraintMode, DriverRecord, RecordsFile, Scenario, ScenarioConfig,
    ScenarioError, SpotRecord,
};
