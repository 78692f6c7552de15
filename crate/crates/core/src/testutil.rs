//! Helpers shared by the unit-test modules.

use crate::domain::{DriverId, SpotId};
use crate::matching::Matching;
use crate::preferences::{DriverLists, PreferenceList, SpotLists};
use std::collections::BTreeMap;

/// Builds mutually consistent preference lists from (driver, spot, distance)
/// edges over the given participant sets.
pub(crate) fn lists_from_edges(
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
pub(crate) fn pair_set(m: &Matching) -> Vec<(String, String)> {
    m.pairs()
        .map(|(d, s)| (d.0.clone(), s.0.clone()))
        .collect()
}

/// Sum of listed distances over the matched pairs.
pub(crate) fn total_distance(m: &Matching, driver_lists: &DriverLists) -> f64 {
    m.pairs()
        .map(|(d, s)| {
            driver_lists[d]
                .distance_to(s)
                .expect("matched pair is listed")
        })
        .sum()
}
