//! Distance lookup and preference-list construction. Each participant ranks
//! the feasible counterparties that have a defined distance, closest first.

use crate::domain::{feasible, DomainError, Driver, DriverId, ParkingSpot, Point, SpotId};
use crate::scenario::Scenario;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PreferenceError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("duplicate preference entry {id}")]
    DuplicateEntry { id: String },
    #[error("distance for {id} is {distance}, expected finite and non-negative")]
    BadDistance { id: String, distance: f64 },
    #[error("duplicate distance entry for pair ({driver}, {spot})")]
    DuplicateEdge { driver: DriverId, spot: SpotId },
}

/// Where pair distances come from: straight-line geometry between stored
/// locations, or an explicit sparse matrix. A missing matrix entry means the
/// pair has no edge and can never be matched.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceModel {
    Coordinates,
    Matrix(HashMap<DriverId, HashMap<SpotId, f64>>),
}

impl DistanceModel {
    /// Builds a matrix model, rejecting duplicate pairs and bad distances.
    pub fn matrix<I>(entries: I) -> Result<Self, PreferenceError>
    where
        I: IntoIterator<Item = (DriverId, SpotId, f64)>,
    {
        let mut matrix: HashMap<DriverId, HashMap<SpotId, f64>> = HashMap::new();
        for (driver, spot, distance) in entries {
            if !distance.is_finite() || distance < 0.0 {
                return Err(PreferenceError::BadDistance {
                    id: format!("({driver}, {spot})"),
                    distance,
                });
            }
            let row = matrix.entry(driver.clone()).or_default();
            if row.insert(spot.clone(), distance).is_some() {
                return Err(PreferenceError::DuplicateEdge { driver, spot });
            }
        }
        Ok(DistanceModel::Matrix(matrix))
    }

    /// Distance in km for the pair, or `None` when the matrix has no edge.
    pub fn distance(&self, d: &Driver, p: &ParkingSpot) -> Option<f64> {
        match self {
            DistanceModel::Coordinates => Some(d.location.distance(&p.location)),
            DistanceModel::Matrix(matrix) => matrix.get(&d.id)?.get(&p.id).copied(),
        }
    }

    /// Coordinate-mode distance without whole entities, used by ingestion.
    pub fn euclidean(a: Point, b: Point) -> f64 {
        a.distance(&b)
    }
}

/// Ranked counterparties for one participant, closest first. Equal distances
/// fall back to ascending counterparty id so lists are always deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceList<Owner, Other> {
    owner: Owner,
    ranked: Vec<(Other, f64)>,
}

pub type DriverPreferences = PreferenceList<DriverId, SpotId>;
pub type SpotPreferences = PreferenceList<SpotId, DriverId>;

/// All driver lists of an instance, keyed (and iterated) in ascending id order.
pub type DriverLists = BTreeMap<DriverId, DriverPreferences>;
/// All spot lists of an instance.
pub type SpotLists = BTreeMap<SpotId, SpotPreferences>;

impl<Owner, Other> PreferenceList<Owner, Other>
where
    Other: Ord + Clone + fmt::Display,
{
    /// Sorts the entries into rank order and validates them.
    pub fn new(owner: Owner, entries: Vec<(Other, f64)>) -> Result<Self, PreferenceError> {
        let mut ranked = entries;
        for (id, distance) in &ranked {
            if !distance.is_finite() || *distance < 0.0 {
                return Err(PreferenceError::BadDistance {
                    id: id.to_string(),
                    distance: *distance,
                });
            }
        }
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let mut ids: Vec<&Other> = ranked.iter().map(|(id, _)| id).collect();
        ids.sort();
        for pair in ids.windows(2) {
            if pair[0] == pair[1] {
                return Err(PreferenceError::DuplicateEntry {
                    id: pair[0].to_string(),
                });
            }
        }
        Ok(PreferenceList { owner, ranked })
    }

    pub fn owner(&self) -> &Owner {
        &self.owner
    }

    /// Entries in rank order: best (closest) first.
    pub fn ranked(&self) -> &[(Other, f64)] {
        &self.ranked
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn contains(&self, other: &Other) -> bool {
        self.position(other).is_some()
    }

    /// Rank of the counterparty (0 = most preferred).
    pub fn position(&self, other: &Other) -> Option<usize> {
        self.ranked.iter().position(|(id, _)| id == other)
    }

    pub fn distance_to(&self, other: &Other) -> Option<f64> {
        self.ranked
            .iter()
            .find(|(id, _)| id == other)
            .map(|(_, d)| *d)
    }
}

/// Feasible spots for the driver with a defined distance, ranked ascending.
pub fn build_driver_preferences(
    d: &Driver,
    spots: &[ParkingSpot],
    model: &DistanceModel,
) -> Result<DriverPreferences, PreferenceError> {
    let mut entries = Vec::new();
    for p in spots {
        if let Some(distance) = model.distance(d, p) {
            if feasible(d, p)? {
                entries.push((p.id.clone(), distance));
            }
        }
    }
    PreferenceList::new(d.id.clone(), entries)
}

/// Feasible drivers for the spot with a defined distance, ranked ascending.
pub fn build_spot_preferences(
    p: &ParkingSpot,
    drivers: &[Driver],
    model: &DistanceModel,
) -> Result<SpotPreferences, PreferenceError> {
    let mut entries = Vec::new();
    for d in drivers {
        if let Some(distance) = model.distance(d, p) {
            if feasible(d, p)? {
                entries.push((d.id.clone(), distance));
            }
        }
    }
    PreferenceList::new(p.id.clone(), entries)
}

/// Builds both sides' lists for a scenario with one shared distance model.
/// Both sides apply the same feasibility predicate and distances, so the
/// result is mutually consistent by construction.
pub fn build_preference_lists(s: &Scenario) -> Result<(DriverLists, SpotLists), PreferenceError> {
    let model = s.distance_model();
    let mut driver_lists = BTreeMap::new();
    for d in &s.drivers {
        driver_lists.insert(d.id.clone(), build_driver_preferences(d, &s.spots, &model)?);
    }
    let mut spot_lists = BTreeMap::new();
    for p in &s.spots {
        spot_lists.insert(p.id.clone(), build_spot_preferences(p, &s.drivers, &model)?);
    }
    Ok((driver_lists, spot_lists))
}

/// Serialized distance edge: one defined (driver, spot) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub driver: DriverId,
    pub spot: SpotId,
    pub distance: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{TimeVector, INITIAL_REPUTATION};

    fn plain_driver(id: &str, x: f64, y: f64) -> Driver {
        Driver::new(
            DriverId::from(id),
            Point::new(x, y),
            0.0,
            0.0,
            TimeVector::zeros(4).unwrap(),
            INITIAL_REPUTATION,
        )
        .unwrap()
    }

    fn plain_spot(id: &str, x: f64, y: f64) -> ParkingSpot {
        ParkingSpot::new(
            SpotId::from(id),
            Point::new(x, y),
            0.0,
            0.0,
            TimeVector::zeros(4).unwrap(),
            INITIAL_REPUTATION,
        )
        .unwrap()
    }

    #[test]
    fn coordinate_distance_matches_geometry() {
        let d = plain_driver("D1", 0.0, 0.0);
        let p = plain_spot("P1", 3.0, 4.0);
        assert_eq!(DistanceModel::Coordinates.distance(&d, &p), Some(5.0));
        let same = plain_spot("P2", 0.0, 0.0);
        assert_eq!(DistanceModel::Coordinates.distance(&d, &same), Some(0.0));
    }

    #[test]
    fn matrix_mode_missing_entry_is_absent() {
        let model = DistanceModel::matrix(vec![(
            DriverId::from("D1"),
            SpotId::from("P1"),
            2.0,
        )])
        .unwrap();
        let d = plain_driver("D2", 0.0, 0.0);
        let p = plain_spot("P7", 0.0, 0.0);
        assert_eq!(model.distance(&d, &p), None);
        let d1 = plain_driver("D1", 0.0, 0.0);
        let p1 = plain_spot("P1", 9.0, 9.0);
        assert_eq!(model.distance(&d1, &p1), Some(2.0));
    }

    #[test]
    fn matrix_rejects_duplicates_and_bad_distances() {
        let dup = DistanceModel::matrix(vec![
            (DriverId::from("D1"), SpotId::from("P1"), 2.0),
            (DriverId::from("D1"), SpotId::from("P1"), 3.0),
        ]);
        assert!(matches!(dup, Err(PreferenceError::DuplicateEdge { .. })));
        let neg = DistanceModel::matrix(vec![(DriverId::from("D1"), SpotId::from("P1"), -1.0)]);
        assert!(matches!(neg, Err(PreferenceError::BadDistance { .. })));
    }

    #[test]
    fn driver_list_sorts_ascending_by_distance() {
        let d = plain_driver("D1", 0.0, 0.0);
        let spots = vec![
            plain_spot("P1", 2.0, 0.0),
            plain_spot("P2", 1.0, 0.0),
            plain_spot("P3", 3.0, 0.0),
        ];
        let list = build_driver_preferences(&d, &spots, &DistanceModel::Coordinates).unwrap();
        let ids: Vec<&str> = list.ranked().iter().map(|(id, _)| id.0.as_str()).collect();
        assert_eq!(ids, ["P2", "P1", "P3"]);
        assert_eq!(
            list.ranked().iter().map(|e| e.1).collect::<Vec<_>>(),
            [1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn infeasible_spots_are_filtered() {
        let mut d = plain_driver("D1", 0.0, 0.0);
        d.max_price = 5.0;
        let mut cheap = plain_spot("P1", 4.0, 0.0);
        cheap.price = 4.0;
        let mut pricey = plain_spot("P2", 1.0, 0.0);
        pricey.price = 9.0;
        let list =
            build_driver_preferences(&d, &[cheap, pricey], &DistanceModel::Coordinates).unwrap();
        let ids: Vec<&str> = list.ranked().iter().map(|(id, _)| id.0.as_str()).collect();
        assert_eq!(ids, ["P1"]);
        assert_eq!(list.distance_to(&SpotId::from("P1")), Some(4.0));
    }

    #[test]
    fn spot_list_sorts_ascending() {
        let p = plain_spot("P1", 0.0, 0.0);
        let drivers = vec![plain_driver("D1", 0.5, 0.0), plain_driver("D2", 0.2, 0.0)];
        let list = build_spot_preferences(&p, &drivers, &DistanceModel::Coordinates).unwrap();
        let ids: Vec<&str> = list.ranked().iter().map(|(id, _)| id.0.as_str()).collect();
        assert_eq!(ids, ["D2", "D1"]);
    }

    #[test]
    fn no_feasible_drivers_gives_empty_list() {
        let mut p = plain_spot("P1", 0.0, 0.0);
        p.min_driver_reputation = 0.9;
        let mut d = plain_driver("D1", 1.0, 0.0);
        d.reputation = 0.1;
        let list = build_spot_preferences(&p, &[d], &DistanceModel::Coordinates).unwrap();
        assert!(list.is_empty());
        assert_eq!(list.len(), 0);
    }

    #[test]
    fn equal_distances_tie_break_by_ascending_id() {
        let d = plain_driver("D1", 0.0, 0.0);
        let spots = vec![
            plain_spot("P3", 0.0, 1.0),
            plain_spot("P2", 1.0, 0.0),
            plain_spot("P1", 0.0, -1.0),
        ];
        let list = build_driver_preferences(&d, &spots, &DistanceModel::Coordinates).unwrap();
        let ids: Vec<&str> = list.ranked().iter().map(|(id, _)| id.0.as_str()).collect();
        assert_eq!(ids, ["P1", "P2", "P3"]);
    }

    #[test]
    fn list_construction_rejects_duplicates() {
        let err = PreferenceList::new(
            DriverId::from("D1"),
            vec![(SpotId::from("P1"), 1.0), (SpotId::from("P1"), 2.0)],
        );
        assert!(matches!(err, Err(PreferenceError::DuplicateEntry { .. })));

        // Also when another entry sorts between the two occurrences.
        let err = PreferenceList::new(
            DriverId::from("D1"),
            vec![
                (SpotId::from("P1"), 1.0),
                (SpotId::from("P2"), 1.5),
                (SpotId::from("P1"), 2.0),
            ],
        );
        assert!(matches!(err, Err(PreferenceError::DuplicateEntry { .. })));
    }

    #[test]
    fn position_and_rank_accessors() {
        let list = PreferenceList::new(
            DriverId::from("D1"),
            vec![(SpotId::from("P2"), 2.0), (SpotId::from("P1"), 1.0)],
        )
        .unwrap();
        assert_eq!(list.position(&SpotId::from("P1")), Some(0));
        assert_eq!(list.position(&SpotId::from("P2")), Some(1));
        assert_eq!(list.position(&SpotId::from("P9")), None);
        assert!(list.contains(&SpotId::from("P2")));
        assert_eq!(*list.owner(), DriverId::from("D1"));
    }
}
