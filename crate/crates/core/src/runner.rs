//! Benchmark runner: executes selected matchers on scenarios, recomputes
//! metrics from their outputs, sweeps over sizes and edge densities, and
//! renders result tables as CSV.
//!
//! Metrics never come from matcher internals: total distance is re-summed
//! from the returned matching against the scenario's edge list, and blocking
//! pairs are re-counted with the standalone checker. Timing charges each
//! matcher for exactly the work its algorithm requires: the instance itself
//! — feasibility filtering and the index-form adjacency — is prepared once,
//! untimed, and each matcher's clock covers building its own derived
//! structures (rank orders, rank tables, weight matrices) plus the solve.

use crate::baselines::{greedy_kernel, km_partners_with, random_kernel, AssignmentScratch};
use crate::domain::{DriverId, SpotId, DEFAULT_SLOTS};
use crate::matching::{
    enumerate_stable_matchings, find_blocking_pairs, mm_kernel, mm_match, Dense, MatchingError,
    SpotKeys, ENUMERATION_CAP,
};
use crate::preferences::{build_preference_lists, PreferenceError};
use crate::scenario::{generate, ConstraintMode, Scenario, ScenarioConfig, ScenarioError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("matcher returned the unlisted pair ({driver}, {spot})")]
    UnlistedPair { driver: DriverId, spot: SpotId },
    #[error("unknown matcher {0:?} (expected mm, greedy, random, or km)")]
    UnknownMatcher(String),
}

/// Which matcher a result row describes. The names here are the ones used on
/// the command line and in the CSV `matcher` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatcherKind {
    /// Queue-driven stable matcher.
    Mm,
    Greedy,
    Random,
    /// Optimal-assignment baseline.
    Km,
}

impl MatcherKind {
    pub const ALL: [MatcherKind; 4] = [
        MatcherKind::Mm,
        MatcherKind::Greedy,
        MatcherKind::Random,
        MatcherKind::Km,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatcherKind::Mm => "mm",
            MatcherKind::Greedy => "greedy",
            MatcherKind::Random => "random",
            MatcherKind::Km => "km",
        }
    }
}

impl fmt::Display for MatcherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatcherKind {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mm" => Ok(MatcherKind::Mm),
            "greedy" => Ok(MatcherKind::Greedy),
            "random" => Ok(MatcherKind::Random),
            "km" => Ok(MatcherKind::Km),
            other => Err(RunError::UnknownMatcher(other.to_owned())),
        }
    }
}

/// One matcher execution on one scenario: the config echo (shape, density,
/// seed) plus recomputed result metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub matcher: MatcherKind,
    pub drivers: usize,
    pub spots: usize,
    pub eta: f64,
    pub seed: u64,
    /// Sum of edge distances over the matched pairs, in km.
    pub total_distance: f64,
    pub matched_count: usize,
    pub blocking_pairs: usize,
    /// Proposals issued; 0 for every matcher except `mm`.
    pub proposals: u64,
    pub wall_time_s: f64,
}

/// Per-cell aggregate over seeds: means for result metrics, median for time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub matcher: MatcherKind,
    pub drivers: usize,
    pub spots: usize,
    pub eta: f64,
    pub seeds: usize,
    pub mean_total_distance: f64,
    pub mean_matched_count: f64,
    pub max_blocking_pairs: usize,
    pub median_wall_time_s: f64,
}

pub const CSV_HEADER: &str =
    "matcher,drivers,spots,eta,seed,total_distance,matched_count,blocking_pairs,proposals,wall_time_s";

pub const SUMMARY_CSV_HEADER: &str = "matcher,drivers,spots,eta,seeds,mean_total_distance,mean_matched_count,max_blocking_pairs,median_wall_time_s";

pub fn metrics_to_csv(rows: &[RunMetrics]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.matcher,
            r.drivers,
            r.spots,
            r.eta,
            r.seed,
            r.total_distance,
            r.matched_count,
            r.blocking_pairs,
            r.proposals,
            r.wall_time_s,
        );
    }
    out
}

pub fn summaries_to_csv(rows: &[CellSummary]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.matcher,
            r.drivers,
            r.spots,
            r.eta,
            r.seeds,
            r.mean_total_distance,
            r.mean_matched_count,
            r.max_blocking_pairs,
            r.median_wall_time_s,
        );
    }
    out
}

/// Seed for the random matcher's draws on a given row. XORing a fixed odd
/// constant keeps those draws decoupled from the scenario generation stream,
/// which is seeded with the row seed itself.
fn matcher_rng_seed(seed: u64) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Runs each selected matcher once per seed on the scenario.
///
/// The instance is prepared once, untimed, in two shared forms: preference
/// lists (for metric verification) and the index-form feasible adjacency
/// (the matchers' input). Each matcher's timed region then covers only what
/// its algorithm adds on top of the instance: the queue matcher arranges
/// each driver's list into a best-first heap and fills the spot-side
/// comparison keys, greedy arranges the heaps, random draws straight off the
/// unordered adjacency, and the assignment matcher fills its cost matrix and
/// runs the cubic solver. Every metric is recomputed from the returned
/// matching afterwards.
pub fn run_matchers(
    s: &Scenario,
    matchers: &[MatcherKind],
    seeds: &[u64],
) -> Result<Vec<RunMetrics>, RunError> {
    let (driver_lists, spot_lists) = build_preference_lists(s)?;
    let graph = Dense::from_scenario(s);
    let edge_distance: HashMap<(&DriverId, &SpotId), f64> = s
        .edges
        .iter()
        .map(|e| ((&e.driver, &e.spot), e.distance))
        .collect();

    // Scratch buffers are allocated once here and reused across runs; each
    // timed region still performs every copy, heapify, fill, and solve its
    // matcher requires, so wall times measure algorithmic work rather than
    // allocator traffic. Only buffers the selected matchers use get sized.
    let needs_ranked = matchers
        .iter()
        .any(|m| matches!(m, MatcherKind::Mm | MatcherKind::Greedy));
    let mut ranked_scratch = if needs_ranked {
        graph.clone_driver_side()
    } else {
        Dense::empty()
    };
    let mut keys_scratch = if matchers.contains(&MatcherKind::Mm) {
        graph.spot_keys_from_spot_arena()
    } else {
        SpotKeys::empty()
    };
    let mut km_scratch = if matchers.contains(&MatcherKind::Km) {
        AssignmentScratch::sized_for(&graph)
    } else {
        AssignmentScratch::new()
    };

    let mut rows = Vec::with_capacity(matchers.len() * seeds.len());
    for &seed in seeds {
        for &matcher in matchers {
            let started = Instant::now();
            let (matching, proposals) = match matcher {
                MatcherKind::Mm => {
                    ranked_scratch.copy_entries_from(&graph);
                    ranked_scratch.heapify_driver_lists();
                    keys_scratch.refill_from_spot_arena(&graph);
                    let (partner, trace) = mm_kernel(&mut ranked_scratch, &keys_scratch)?;
                    (
                        ranked_scratch.matching_from_partners(&partner)?,
                        trace.proposals,
                    )
                }
                MatcherKind::Greedy => {
                    ranked_scratch.copy_entries_from(&graph);
                    ranked_scratch.heapify_driver_lists();
                    let partner = greedy_kernel(&mut ranked_scratch);
                    (ranked_scratch.matching_from_partners(&partner)?, 0)
                }
                MatcherKind::Random => {
                    let partner = random_kernel(&graph, matcher_rng_seed(seed));
                    (graph.matching_from_partners(&partner)?, 0)
                }
                MatcherKind::Km => {
                    let partner = km_partners_with(&graph, &mut km_scratch);
                    (graph.matching_from_partners(&partner)?, 0)
                }
            };
            let wall_time_s = started.elapsed().as_secs_f64();

            let mut total_distance = 0.0;
            for (d, p) in matching.pairs() {
                let Some(&dist) = edge_distance.get(&(d, p)) else {
                    return Err(RunError::UnlistedPair {
                        driver: d.clone(),
                        spot: p.clone(),
                    });
                };
                total_distance += dist;
            }
            let blocking_pairs = find_blocking_pairs(&matching, &driver_lists, &spot_lists).len();

            rows.push(RunMetrics {
                matcher,
                drivers: s.config.num_drivers,
                spots: s.config.num_spots,
                eta: s.config.edge_fraction,
                seed,
                total_distance,
                matched_count: matching.matched_count(),
                blocking_pairs,
                proposals,
                wall_time_s,
            });
        }
    }
    Ok(rows)
}

fn sweep_config(
    drivers: usize,
    spots: usize,
    eta: f64,
    distance_range: (f64, f64),
    seed: u64,
) -> ScenarioConfig {
    ScenarioConfig {
        num_drivers: drivers,
        num_spots: spots,
        edge_fraction: eta,
        distance_range,
        seed,
        slots: DEFAULT_SLOTS,
        constraint_mode: ConstraintMode::EdgesOnly,
    }
}

/// One freshly generated square scenario per `(size, seed)` cell at a fixed
/// edge density; each selected matcher runs on each cell.
pub fn sweep_size(
    sizes: &[usize],
    eta: f64,
    distance_range: (f64, f64),
    seeds: &[u64],
    matchers: &[MatcherKind],
) -> Result<Vec<RunMetrics>, RunError> {
    let mut rows = Vec::new();
    for &size in sizes {
        for &seed in seeds {
            let s = generate(&sweep_config(size, size, eta, distance_range, seed))?;
            rows.extend(run_matchers(&s, matchers, &[seed])?);
        }
    }
    Ok(rows)
}

/// One freshly generated scenario per `(eta, seed)` cell at a fixed square
/// size; each selected matcher runs on each cell.
pub fn sweep_density(
    etas: &[f64],
    size: usize,
    distance_range: (f64, f64),
    seeds: &[u64],
    matchers: &[MatcherKind],
) -> Result<Vec<RunMetrics>, RunError> {
    let mut rows = Vec::new();
    for &eta in etas {
        for &seed in seeds {
            let s = generate(&sweep_config(size, size, eta, distance_range, seed))?;
            rows.extend(run_matchers(&s, matchers, &[seed])?);
        }
    }
    Ok(rows)
}

/// Sequential timing sweep over sizes; returns the per-(matcher, size)
/// aggregates, whose `median_wall_time_s` is the figure of interest.
pub fn time_matchers(
    sizes: &[usize],
    eta: f64,
    distance_range: (f64, f64),
    seeds: &[u64],
    matchers: &[MatcherKind],
) -> Result<Vec<CellSummary>, RunError> {
    let rows = sweep_size(sizes, eta, distance_range, seeds, matchers)?;
    Ok(summarize(&rows))
}

/// Sorted-by-total-order median; `values` must be non-empty.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Collapses rows into per-(matcher, shape, eta) cells, in first-appearance
/// order: seed-mean distance and matched count, worst blocking-pair count,
/// and median wall time.
pub fn summarize(rows: &[RunMetrics]) -> Vec<CellSummary> {
    struct Acc {
        matcher: MatcherKind,
        drivers: usize,
        spots: usize,
        eta: f64,
        distances: Vec<f64>,
        matched: Vec<f64>,
        max_blocking: usize,
        times: Vec<f64>,
    }
    let mut cells: Vec<Acc> = Vec::new();
    for r in rows {
        let found = cells.iter_mut().find(|c| {
            c.matcher == r.matcher
                && c.drivers == r.drivers
                && c.spots == r.spots
                && c.eta.to_bits() == r.eta.to_bits()
        });
        let cell = match found {
            Some(c) => c,
            None => {
                cells.push(Acc {
                    matcher: r.matcher,
                    drivers: r.drivers,
                    spots: r.spots,
                    eta: r.eta,
                    distances: Vec::new(),
                    matched: Vec::new(),
                    max_blocking: 0,
                    times: Vec::new(),
                });
                cells.last_mut().expect("just pushed")
            }
        };
        cell.distances.push(r.total_distance);
        cell.matched.push(r.matched_count as f64);
        cell.max_blocking = cell.max_blocking.max(r.blocking_pairs);
        cell.times.push(r.wall_time_s);
    }
    cells
        .into_iter()
        .map(|mut c| {
            let n = c.distances.len();
            CellSummary {
                matcher: c.matcher,
                drivers: c.drivers,
                spots: c.spots,
                eta: c.eta,
                seeds: n,
                mean_total_distance: c.distances.iter().sum::<f64>() / n as f64,
                mean_matched_count: c.matched.iter().sum::<f64>() / n as f64,
                max_blocking_pairs: c.max_blocking,
                median_wall_time_s: median(&mut c.times),
            }
        })
        .collect()
}

/// One named pass/fail observation from `verify_scenario`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Result of checking the stable matcher's output on one scenario.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub drivers: usize,
    pub spots: usize,
    pub matched_count: usize,
    pub blocking_pairs: usize,
    pub proposals: u64,
    pub proposal_bound: u64,
    /// Whether the instance was small enough for exhaustive-oracle checks.
    pub oracle_checked: bool,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the stable matcher on the scenario and checks its output: no
/// blocking pairs, proposal count within `|drivers| * |spots|`, and — when
/// the instance is small enough to enumerate — membership among all stable
/// matchings, best-possible partner for every driver, and the same matched
/// set as every other stable matching.
pub fn verify_scenario(s: &Scenario) -> Result<VerifyOutcome, RunError> {
    let (driver_lists, spot_lists) = build_preference_lists(s)?;
    let (m, trace) = mm_match(&driver_lists, &spot_lists)?;
    let blocking = find_blocking_pairs(&m, &driver_lists, &spot_lists);
    let bound = (s.config.num_drivers as u64) * (s.config.num_spots as u64);

    let mut checks = vec![
        VerifyCheck {
            name: "stability",
            passed: blocking.is_empty(),
            detail: format!("{} blocking pairs", blocking.len()),
        },
        VerifyCheck {
            name: "proposal-bound",
            passed: trace.proposals <= bound,
            detail: format!("{} proposals, bound {bound}", trace.proposals),
        },
    ];

    let oracle_checked =
        s.config.num_drivers <= ENUMERATION_CAP && s.config.num_spots <= ENUMERATION_CAP;
    if oracle_checked {
        let stable = enumerate_stable_matchings(&driver_lists, &spot_lists)?;
        checks.push(VerifyCheck {
            name: "oracle-membership",
            passed: stable.contains(&m),
            detail: format!("{} stable matchings enumerated", stable.len()),
        });

        let mut optimal = true;
        'outer: for other in &stable {
            for (d, list) in &driver_lists {
                let ours = m
                    .spot_of(d)
                    .and_then(|p| list.position(p))
                    .unwrap_or(usize::MAX);
                let theirs = other
                    .spot_of(d)
                    .and_then(|p| list.position(p))
                    .unwrap_or(usize::MAX);
                if ours > theirs {
                    optimal = false;
                    break 'outer;
                }
            }
        }
        checks.push(VerifyCheck {
            name: "driver-optimality",
            passed: optimal,
            detail: "every driver ranks the output at least as high as any stable matching".into(),
        });

        let ours: BTreeSet<&DriverId> = m.matched_drivers().collect();
        let same = stable
            .iter()
            .all(|other| other.matched_drivers().collect::<BTreeSet<_>>() == ours);
        checks.push(VerifyCheck {
            name: "matched-set-invariant",
            passed: same,
            detail: format!("{} drivers matched in every stable matching", ours.len()),
        });
    }

    Ok(VerifyOutcome {
        drivers: s.config.num_drivers,
        spots: s.config.num_spots,
        matched_count: m.matched_count(),
        blocking_pairs: blocking.len(),
        proposals: trace.proposals,
        proposal_bound: bound,
        oracle_checked,
        checks,
    })
}
