//! Helpers shared by the integration suites.
#![allow(dead_code)]

use parkmatch_core::{
    ConstraintMode, Driver, DriverId, DriverLists, Edge, Matching, ParkingSpot, Point,
    PreferenceList, Scenario, ScenarioConfig, SpotId, SpotLists, TimeVector, INITIAL_REPUTATION,
};
use std::collections::BTreeMap;

/// Builds mutually consistent preference lists from (driver, spot, distance)
/// edges over the given participant sets.
pub fn lists_from_edges(
    drivers: &[&str],
    spots: &[&str],
    edges: &[(&str, &str, f64)],
) -> (DriverLists, SpotLists) {
    let mut driver_entries: BTreeMap<DriverId, Vec<(SpotId, f64)>> = drivers
        .iter()
        .map(|d| (DriverId::from(*d), Vec::new()))
        .collect();
    let mut spot_entries: BTreeMap<SpotId, Vec<(DriverId, f64)>> = spots
        .iter()
        .map(|s| (SpotId::from(*s), Vec::new()))
        .collect();
    for (d, s, dist) in edges {
        driver_entries
            .get_mut(&DriverId::from(*d))
            .expect("edge names a listed driver")
            .push((SpotId::from(*s), *dist));
        spot_entries
            .get_mut(&SpotId::from(*s))
            .expect("edge names a listed spot")
            .push((DriverId::from(*d), *dist));
    }
    let driver_lists = driver_entries
        .into_iter()
        .map(|(id, entries)| {
            let list = PreferenceList::new(id.clone(), entries).expect("valid test edges");
            (id, list)
        })
        .collect();
    let spot_lists = spot_entries
        .into_iter()
        .map(|(id, entries)| {
            let list = PreferenceList::new(id.clone(), entries).expect("valid test edges");
            (id, list)
        })
        .collect();
    (driver_lists, spot_lists)
}

/// Matched pairs as plain strings, ascending by driver id.
pub fn pair_set(m: &Matching) -> Vec<(String, String)> {
    m.pairs()
        .map(|(d, s)| (d.0.clone(), s.0.clone()))
        .collect()
}

/// Sum of listed distances over the matched pairs.
pub fn total_distance(m: &Matching, driver_lists: &DriverLists) -> f64 {
    m.pairs()
        .map(|(d, s)| {
            driver_lists[d]
                .distance_to(s)
                .expect("matched pair is listed")
        })
        .sum()
}

/// Wraps explicit edges in an edges-only scenario with unconstrained
/// participants, so the edge set alone defines feasibility.
pub fn scenario_from_edges(
    drivers: &[&str],
    spots: &[&str],
    edges: &[(&str, &str, f64)],
    slots: usize,
) -> Scenario {
    assert!(!edges.is_empty(), "edge_fraction must stay positive");
    let max_distance = edges.iter().map(|e| e.2).fold(0.0f64, f64::max);
    let config = ScenarioConfig {
        num_drivers: drivers.len(),
        num_spots: spots.len(),
        edge_fraction: edges.len() as f64 / (drivers.len() * spots.len()) as f64,
        distance_range: (0.0, max_distance + 1.0),
        seed: 0,
        slots,
        constraint_mode: ConstraintMode::EdgesOnly,
    };
    let drivers: Vec<Driver> = drivers
        .iter()
        .map(|id| {
            Driver::new(
                DriverId::from(*id),
                Point::new(0.0, 0.0),
                0.0,
                0.0,
                TimeVector::zeros(slots).expect("positive slot count"),
                INITIAL_REPUTATION,
            )
            .expect("trivial participant fields are valid")
        })
        .collect();
    let spots: Vec<ParkingSpot> = spots
        .iter()
        .map(|id| {
            ParkingSpot::new(
                SpotId::from(*id),
                Point::new(0.0, 0.0),
                0.0,
                0.0,
                TimeVector::zeros(slots).expect("positive slot count"),
                INITIAL_REPUTATION,
            )
            .expect("trivial participant fields are valid")
        })
        .collect();
    let edges: Vec<Edge> = edges
        .iter()
        .map(|(d, s, dist)| Edge {
            driver: DriverId::from(*d),
            spot: SpotId::from(*s),
            distance: *dist,
        })
        .collect();
    Scenario::new(config, drivers, spots, edges).expect("hand-built scenario is consistent")
}

/// Exhaustive best (cardinality, total distance) over all matchings of a
/// small instance: every driver either stays unmatched or takes a free
/// listed spot. Independent of the assignment solver.
pub fn brute_force_best(dl: &DriverLists, sl: &SpotLists) -> (usize, f64) {
    let driver_ids: Vec<&DriverId> = dl.keys().collect();
    let spot_ids: Vec<&SpotId> = sl.keys().collect();
    let spot_index: BTreeMap<&SpotId, usize> = spot_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let lists: Vec<Vec<(usize, f64)>> = driver_ids
        .iter()
        .map(|d| {
            dl[*d]
                .ranked()
                .iter()
                .map(|(s, dist)| (spot_index[s], *dist))
                .collect()
        })
        .collect();

    fn go(
        d: usize,
        lists: &[Vec<(usize, f64)>],
        taken: &mut Vec<bool>,
        count: usize,
        dist: f64,
        best: &mut (usize, f64),
    ) {
        if d == lists.len() {
            if count > best.0 || (count == best.0 && dist < best.1) {
                *best = (count, dist);
            }
            return;
        }
        go(d + 1, lists, taken, count, dist, best);
        for &(s, edge_dist) in &lists[d] {
            if !taken[s] {
                taken[s] = true;
                go(d + 1, lists, taken, count + 1, dist + edge_dist, best);
                taken[s] = false;
            }
        }
    }

    let mut taken = vec![false; spot_ids.len()];
    let mut best = (0usize, f64::INFINITY);
    go(0, &lists, &mut taken, 0, 0.0, &mut best);
    if best.0 == 0 {
        best.1 = 0.0;
    }
    best
}
