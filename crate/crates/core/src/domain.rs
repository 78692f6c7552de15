//! Core entity types shared by every other module: drivers, parking spots,
//! binary time vectors, the pair feasibility predicate, and reputation updates.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Default number of binary slots a day is divided into (30-minute slots).
pub const DEFAULT_SLOTS: usize = 48;

/// Reputation assigned to newly registered participants.
pub const INITIAL_REPUTATION: f64 = 1.0;

/// Default weight given to the newest score in a reputation update.
pub const DEFAULT_REPUTATION_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("time vectors have different lengths ({left} vs {right})")]
    TimeVectorLength { left: usize, right: usize },
    #[error("time vector is empty")]
    TimeVectorEmpty,
    #[error("time vector entry {index} is {value}, expected 0 or 1")]
    TimeVectorEntry { index: usize, value: u8 },
    #[error("{name} is {value}, expected a value in [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{name} is {value}, expected a value strictly inside ({min}, {max})")]
    OutOfOpenRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("{name} is {value}, expected a finite non-negative value")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DriverId(pub String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpotId(pub String);

impl fmt::Display for DriverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SpotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DriverId {
    fn from(s: &str) -> Self {
        DriverId(s.to_owned())
    }
}

impl From<&str> for SpotId {
    fn from(s: &str) -> Self {
        SpotId(s.to_owned())
    }
}

/// 2D position in km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Fixed-length sequence of binary slot flags covering one day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeVector(Vec<u8>);

impl TimeVector {
    /// Validates that the vector is non-empty and strictly binary.
    pub fn new(slots: Vec<u8>) -> Result<Self, DomainError> {
        if slots.is_empty() {
            return Err(DomainError::TimeVectorEmpty);
        }
        for (index, &value) in slots.iter().enumerate() {
            if value > 1 {
                return Err(DomainError::TimeVectorEntry { index, value });
            }
        }
        Ok(TimeVector(slots))
    }

    /// All-zero vector of the given length: no demand, or fully free.
    pub fn zeros(len: usize) -> Result<Self, DomainError> {
        Self::new(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn slots(&self) -> &[u8] {
        &self.0
    }

    /// Number of slots set in both vectors; 0 means no time conflict.
    pub fn dot(&self, other: &TimeVector) -> Result<u32, DomainError> {
        if self.0.len() != other.0.len() {
            return Err(DomainError::TimeVectorLength {
                left: self.0.len(),
                right: other.0.len(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(&a, &b)| u32::from(a & b))
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Driver {
    pub id: DriverId,
    pub location: Point,
    /// Highest price per unit time the driver accepts.
    pub max_price: f64,
    /// Lowest spot reputation the driver accepts, in [0,1].
    pub min_spot_reputation: f64,
    /// Slots the driver wants to park in.
    pub demand: TimeVector,
    pub reputation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParkingSpot {
    pub id: SpotId,
    pub location: Point,
    /// Rental fee per unit time.
    pub price: f64,
    /// Lowest driver reputation the owner accepts, in [0,1].
    pub min_driver_reputation: f64,
    /// Slots already committed elsewhere; a 1 blocks that slot.
    pub availability: TimeVector,
    pub reputation: f64,
}

fn check_finite(name: &'static str, value: f64) -> Result<(), DomainError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(DomainError::NotFinite { name, value })
    }
}

fn check_nonnegative(name: &'static str, value: f64) -> Result<(), DomainError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(DomainError::Negative { name, value })
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<(), DomainError> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(DomainError::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}

impl Driver {
    pub fn new(
        id: DriverId,
        location: Point,
        max_price: f64,
        min_spot_reputation: f64,
        demand: TimeVector,
        reputation: f64,
    ) -> Result<Self, DomainError> {
        check_finite("location.x", location.x)?;
        check_finite("location.y", location.y)?;
        check_nonnegative("max_price", max_price)?;
        check_unit("min_spot_reputation", min_spot_reputation)?;
        check_unit("reputation", reputation)?;
        Ok(Driver {
            id,
            location,
            max_price,
            min_spot_reputation,
            demand,
            reputation,
        })
    }
}

impl ParkingSpot {
    pub fn new(
        id: SpotId,
        location: Point,
        price: f64,
        min_driver_reputation: f64,
        availability: TimeVector,
        reputation: f64,
    ) -> Result<Self, DomainError> {
        check_finite("location.x", location.x)?;
        check_finite("location.y", location.y)?;
        check_nonnegative("price", price)?;
        check_unit("min_driver_reputation", min_driver_reputation)?;
        check_unit("reputation", reputation)?;
        Ok(ParkingSpot {
            id,
            location,
            price,
            min_driver_reputation,
            availability,
            reputation,
        })
    }
}

/// A driver and a spot can be paired iff the price cap, both reputation
/// thresholds, and slot disjointness all hold. Ties are feasible.
pub fn feasible(d: &Driver, p: &ParkingSpot) -> Result<bool, DomainError> {
    let conflicts = d.demand.dot(&p.availability)?;
    Ok(d.max_price >= p.price
        && d.min_spot_reputation <= p.reputation
        && p.min_driver_reputation <= d.reputation
        && conflicts == 0)
}

/// Exponential moving average with `weight` on the newest score.
/// `weight` may be 0 (keep prior) or 1 (replace with score).
pub fn update_driver_reputation(prev: f64, weight: f64, score: f64) -> Result<f64, DomainError> {
    if !weight.is_finite() || !(0.0..=1.0).contains(&weight) {
        return Err(DomainError::OutOfRange {
            name: "weight",
            value: weight,
            min: 0.0,
            max: 1.0,
        });
    }
    check_unit("prev", prev)?;
    check_unit("score", score)?;
    Ok(((1.0 - weight) * prev + weight * score).clamp(0.0, 1.0))
}

/// Same smoothing rule for the spot side, but the weight must lie strictly
/// inside (0,1).
pub fn update_spot_reputation(prev: f64, weight: f64, score: f64) -> Result<f64, DomainError> {
    if !weight.is_finite() || weight <= 0.0 || weight >= 1.0 {
        return Err(DomainError::OutOfOpenRange {
            name: "weight",
            value: weight,
            min: 0.0,
            max: 1.0,
        });
    }
    check_unit("prev", prev)?;
    check_unit("score", score)?;
    Ok(((1.0 - weight) * prev + weight * score).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn driver(max_price: f64, min_spot_reputation: f64, reputation: f64, demand: &[u8]) -> Driver {
        Driver::new(
            DriverId::from("D1"),
            Point::new(0.0, 0.0),
            max_price,
            min_spot_reputation,
            TimeVector::new(demand.to_vec()).unwrap(),
            reputation,
        )
        .unwrap()
    }

    fn spot(price: f64, min_driver_reputation: f64, reputation: f64, availability: &[u8]) -> ParkingSpot {
        ParkingSpot::new(
            SpotId::from("P1"),
            Point::new(1.0, 1.0),
            price,
            min_driver_reputation,
            TimeVector::new(availability.to_vec()).unwrap(),
            reputation,
        )
        .unwrap()
    }

    #[test]
    fn feasible_when_all_constraints_hold() {
        let d = driver(10.0, 0.5, 0.6, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1]);
        assert_eq!(feasible(&d, &p), Ok(true));
    }

    #[test]
    fn infeasible_when_price_exceeds_cap() {
        let d = driver(5.0, 0.5, 0.6, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1]);
        assert_eq!(feasible(&d, &p), Ok(false));
    }

    #[test]
    fn infeasible_on_time_conflict() {
        let d = driver(10.0, 0.5, 0.6, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[1, 0]);
        assert_eq!(feasible(&d, &p), Ok(false));
    }

    #[test]
    fn infeasible_when_spot_reputation_below_drivers_bar() {
        let d = driver(10.0, 0.9, 0.6, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1]);
        assert_eq!(feasible(&d, &p), Ok(false));
    }

    #[test]
    fn infeasible_when_driver_reputation_below_spots_bar() {
        let d = driver(10.0, 0.5, 0.3, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1]);
        assert_eq!(feasible(&d, &p), Ok(false));
    }

    #[test]
    fn feasible_treats_exact_ties_as_acceptable() {
        let d = driver(8.0, 0.7, 0.4, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1]);
        assert_eq!(feasible(&d, &p), Ok(true));
    }

    #[test]
    fn feasible_rejects_mismatched_time_vectors() {
        let d = driver(10.0, 0.5, 0.6, &[1, 0]);
        let p = spot(8.0, 0.4, 0.7, &[0, 1, 0]);
        assert_eq!(
            feasible(&d, &p),
            Err(DomainError::TimeVectorLength { left: 2, right: 3 })
        );
    }

    #[test]
    fn time_vector_rejects_non_binary_entries() {
        assert_eq!(
            TimeVector::new(vec![0, 2]),
            Err(DomainError::TimeVectorEntry { index: 1, value: 2 })
        );
        assert_eq!(TimeVector::new(vec![]), Err(DomainError::TimeVectorEmpty));
    }

    #[test]
    fn dot_counts_overlapping_slots() {
        let a = TimeVector::new(vec![1, 1, 0, 1]).unwrap();
        let b = TimeVector::new(vec![1, 0, 1, 1]).unwrap();
        assert_eq!(a.dot(&b), Ok(2));
        assert_eq!(b.dot(&a), Ok(2));
    }

    #[test]
    fn euclidean_distance() {
        assert_eq!(Point::new(0.0, 0.0).distance(&Point::new(3.0, 4.0)), 5.0);
        assert_eq!(Point::new(2.0, 7.0).distance(&Point::new(2.0, 7.0)), 0.0);
    }

    #[test]
    fn driver_reputation_update_examples() {
        assert_eq!(update_driver_reputation(0.8, 0.5, 1.0), Ok(0.9));
        assert_eq!(update_driver_reputation(0.8, 0.0, 0.1), Ok(0.8));
        assert_eq!(update_driver_reputation(0.3, 1.0, 0.7), Ok(0.7));
    }

    #[test]
    fn spot_reputation_update_examples() {
        assert_eq!(update_spot_reputation(1.0, 0.5, 0.0), Ok(0.5));
        assert_eq!(update_spot_reputation(0.6, 0.25, 0.6), Ok(0.6));
        assert_eq!(update_spot_reputation(0.0, 0.5, 1.0), Ok(0.5));
    }

    #[test]
    fn reputation_weight_ranges_differ_between_sides() {
        // Driver side allows the closed interval ends.
        assert!(update_driver_reputation(0.5, 0.0, 0.9).is_ok());
        assert!(update_driver_reputation(0.5, 1.0, 0.9).is_ok());
        assert!(update_driver_reputation(0.5, 1.1, 0.9).is_err());
        assert!(update_driver_reputation(0.5, -0.1, 0.9).is_err());
        // Spot side is strictly open.
        assert!(update_spot_reputation(0.5, 0.0, 0.9).is_err());
        assert!(update_spot_reputation(0.5, 1.0, 0.9).is_err());
        assert!(update_spot_reputation(0.5, 0.999, 0.9).is_ok());
    }

    #[test]
    fn reputation_updates_reject_out_of_range_values() {
        assert!(update_driver_reputation(1.2, 0.5, 0.5).is_err());
        assert!(update_driver_reputation(0.5, 0.5, -0.1).is_err());
        assert!(update_spot_reputation(f64::NAN, 0.5, 0.5).is_err());
    }

    #[test]
    fn constructors_validate_ranges() {
        let demand = TimeVector::new(vec![0, 1]).unwrap();
        assert!(Driver::new(
            DriverId::from("D1"),
            Point::new(0.0, 0.0),
            -1.0,
            0.5,
            demand.clone(),
            0.5
        )
        .is_err());
        assert!(Driver::new(
            DriverId::from("D1"),
            Point::new(f64::INFINITY, 0.0),
            1.0,
            0.5,
            demand.clone(),
            0.5
        )
        .is_err());
        assert!(ParkingSpot::new(
            SpotId::from("P1"),
            Point::new(0.0, 0.0),
            1.0,
            1.5,
            demand,
            0.5
        )
        .is_err());
    }
}
