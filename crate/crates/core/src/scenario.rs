//! Seeded synthetic instances and ingestion of external participant records.
//!
//! `generate` samples an instance from a [`ScenarioConfig`]: a fixed fraction
//! of all driver–spot pairs becomes the edge set, each edge gets a uniform
//! distance, and the participants are either unconstrained (`EdgesOnly`) or
//! get sampled prices, reputation thresholds, and schedules (`Full`). The
//! same config and seed always reproduce the same scenario, byte for byte.
//!
//! `ingest` instead takes externally supplied participant records, derives
//! the complete distance matrix from their coordinates, and applies the full
//! feasibility predicate.

use crate::domain::{
    Driver, DriverId, DomainError, ParkingSpot, Point, SpotId, TimeVector, INITIAL_REPUTATION,
};
use crate::preferences::Edge;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// How pair feasibility is decided in a generated scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    /// Participants carry no binding constraints: the sampled edge set alone
    /// decides which pairs are feasible.
    EdgesOnly,
    /// Prices, reputation thresholds, and schedules are sampled as well, so
    /// the feasibility predicate prunes the edge set further.
    Full,
}

// Full-mode sampling ranges, chosen so each constraint rejects some pairs
// while a clear majority of listed pairs stays feasible.
const MAX_PRICE_RANGE: std::ops::RangeInclusive<f64> = 1.0..=3.0;
const PRICE_RANGE: std::ops::RangeInclusive<f64> = 0.5..=2.0;
const REPUTATION_RANGE: std::ops::RangeInclusive<f64> = 0.5..=1.0;
const THRESHOLD_RANGE: std::ops::RangeInclusive<f64> = 0.0..=0.6;
/// Expected number of set slots in a sampled time vector.
const EXPECTED_BUSY_SLOTS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("num_drivers must be positive")]
    NoDrivers,
    #[error("num_spots must be positive")]
    NoSpots,
    #[error("edge_fraction must be a real in (0, 1], got {0}")]
    EdgeFraction(f64),
    #[error("distance_range must satisfy 0 <= lo < hi with finite bounds, got [{lo}, {hi}]")]
    DistanceRange { lo: f64, hi: f64 },
    #[error("slots must be positive")]
    NoSlots,
    #[error("scenario lists {got} drivers but the config says {expected}")]
    DriverCount { got: usize, expected: usize },
    #[error("scenario lists {got} spots but the config says {expected}")]
    SpotCount { got: usize, expected: usize },
    #[error("duplicate driver id {0}")]
    DuplicateDriver(DriverId),
    #[error("duplicate spot id {0}")]
    DuplicateSpot(SpotId),
    #[error("record {id}: {source}")]
    Record { id: String, source: DomainError },
    #[error("record {id} uses {got} schedule slots, expected {expected}")]
    SlotMismatch {
        id: String,
        got: usize,
        expected: usize,
    },
    #[error("edge ({driver}, {spot}) references an unknown participant")]
    UnknownEdge { driver: DriverId, spot: SpotId },
    #[error("edge ({driver}, {spot}) appears more than once")]
    DuplicateEdge { driver: DriverId, spot: SpotId },
    #[error("scenario has {got} edges but the config calls for {expected}")]
    EdgeCount { got: usize, expected: usize },
    #[error("edge ({driver}, {spot}) distance {distance} falls outside [{lo}, {hi}]")]
    EdgeDistance {
        driver: DriverId,
        spot: SpotId,
        distance: f64,
        lo: f64,
        hi: f64,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn default_slots() -> usize {
    crate::domain::DEFAULT_SLOTS
}

fn default_constraint_mode() -> ConstraintMode {
    ConstraintMode::EdgesOnly
}

/// Everything `generate` needs: instance shape, edge density, distance
/// bounds, schedule length, constraint mode, and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_drivers: usize,
    pub num_spots: usize,
    /// Fraction of all driver–spot pairs that get an edge, in (0, 1].
    pub edge_fraction: f64,
    /// Closed distance interval `[lo, hi]` in km with `0 <= lo < hi`.
    pub distance_range: (f64, f64),
    pub seed: u64,
    /// Schedule slots per day; every time vector uses this length.
    #[serde(default = "default_slots")]
    pub slots: usize,
    #[serde(default = "default_constraint_mode")]
    pub constraint_mode: ConstraintMode,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.num_drivers == 0 {
            return Err(ScenarioError::NoDrivers);
        }
        if self.num_spots == 0 {
            return Err(ScenarioError::NoSpots);
        }
        if !self.edge_fraction.is_finite() || self.edge_fraction <= 0.0 || self.edge_fraction > 1.0
        {
            return Err(ScenarioError::EdgeFraction(self.edge_fraction));
        }
        let (lo, hi) = self.distance_range;
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo >= hi {
            return Err(ScenarioError::DistanceRange { lo, hi });
        }
        if self.slots == 0 {
            return Err(ScenarioError::NoSlots);
        }
        Ok(())
    }

    /// Number of edges a scenario under this config must carry:
    /// `edge_fraction * num_drivers * num_spots`, rounded half-up.
    pub fn expected_edge_count(&self) -> usize {
        let exact = self.edge_fraction * (self.num_drivers as f64) * (self.num_spots as f64);
        (exact + 0.5).floor() as usize
    }
}

/// One driver as carried in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverRecord {
    pub id: String,
    pub location: [f64; 2],
    pub max_price: f64,
    pub min_spot_reputation: f64,
    pub demand: Vec<u8>,
    pub reputation: f64,
}

impl DriverRecord {
    fn into_driver(self, expected_slots: usize) -> Result<Driver, ScenarioError> {
        if self.demand.len() != expected_slots {
            return Err(ScenarioError::SlotMismatch {
                id: self.id,
                got: self.demand.len(),
                expected: expected_slots,
            });
        }
        let id = self.id;
        let wrap = |source: DomainError, id: &str| ScenarioError::Record {
            id: id.to_owned(),
            source,
        };
        let demand = TimeVector::new(self.demand).map_err(|e| wrap(e, &id))?;
        Driver::new(
            DriverId(id.clone()),
            Point::new(self.location[0], self.location[1]),
            self.max_price,
            self.min_spot_reputation,
            demand,
            self.reputation,
        )
        .map_err(|e| wrap(e, &id))
    }

    fn from_driver(d: &Driver) -> Self {
        DriverRecord {
            id: d.id.0.clone(),
            location: [d.location.x, d.location.y],
            max_price: d.max_price,
            min_spot_reputation: d.min_spot_reputation,
            demand: d.demand.slots().to_vec(),
            reputation: d.reputation,
        }
    }
}

/// One parking spot as carried in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotRecord {
    pub id: String,
    pub location: [f64; 2],
    pub price: f64,
    pub min_driver_reputation: f64,
    pub availability: Vec<u8>,
    pub reputation: f64,
}

impl SpotRecord {
    fn into_spot(self, expected_slots: usize) -> Result<ParkingSpot, ScenarioError> {
        if self.availability.len() != expected_slots {
            return Err(ScenarioError::SlotMismatch {
                id: self.id,
                got: self.availability.len(),
                expected: expected_slots,
            });
        }
        let id = self.id;
        let wrap = |source: DomainError, id: &str| ScenarioError::Record {
            id: id.to_owned(),
            source,
        };
        let availability = TimeVector::new(self.availability).map_err(|e| wrap(e, &id))?;
        ParkingSpot::new(
            SpotId(id.clone()),
            Point::new(self.location[0], self.location[1]),
            self.price,
            self.min_driver_reputation,
            availability,
            self.reputation,
        )
        .map_err(|e| wrap(e, &id))
    }

    fn from_spot(p: &ParkingSpot) -> Self {
        SpotRecord {
            id: p.id.0.clone(),
            location: [p.location.x, p.location.y],
            price: p.price,
            min_driver_reputation: p.min_driver_reputation,
            availability: p.availability.slots().to_vec(),
            reputation: p.reputation,
        }
    }
}

/// Participant records supplied from outside, without edges or a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordsFile {
    pub drivers: Vec<DriverRecord>,
    pub spots: Vec<SpotRecord>,
}

/// A full instance: config, participants, and the listed edges with their
/// distances. Construction always validates, so a `Scenario` in hand is
/// internally consistent; treat the fields as read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub drivers: Vec<Driver>,
    pub spots: Vec<ParkingSpot>,
    pub edges: Vec<Edge>,
}

/// On-disk shape of a scenario; conversion to `Scenario` validates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    config: ScenarioConfig,
    drivers: Vec<DriverRecord>,
    spots: Vec<SpotRecord>,
    edges: Vec<Edge>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = ScenarioError;

    fn try_from(f: ScenarioFile) -> Result<Self, ScenarioError> {
        f.config.validate()?;
        let slots = f.config.slots;
        let drivers = f
            .drivers
            .into_iter()
            .map(|r| r.into_driver(slots))
            .collect::<Result<Vec<_>, _>>()?;
        let spots = f
            .spots
            .into_iter()
            .map(|r| r.into_spot(slots))
            .collect::<Result<Vec<_>, _>>()?;
        Scenario::new(f.config, drivers, spots, f.edges)
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        ScenarioFile {
            config: s.config,
            drivers: s.drivers.iter().map(DriverRecord::from_driver).collect(),
            spots: s.spots.iter().map(SpotRecord::from_spot).collect(),
            edges: s.edges,
        }
    }
}

impl Scenario {
    /// Validates the parts against each other and the config: counts match,
    /// ids are unique, time vectors use `config.slots`, and the edge set has
    /// exactly the expected number of distinct known pairs with distances
    /// inside the configured range.
    pub fn new(
        config: ScenarioConfig,
        drivers: Vec<Driver>,
        spots: Vec<ParkingSpot>,
        edges: Vec<Edge>,
    ) -> Result<Self, ScenarioError> {
        config.validate()?;
        if drivers.len() != config.num_drivers {
            return Err(ScenarioError::DriverCount {
                got: drivers.len(),
                expected: config.num_drivers,
            });
        }
        if spots.len() != config.num_spots {
            return Err(ScenarioError::SpotCount {
                got: spots.len(),
                expected: config.num_spots,
            });
        }
        let mut driver_ids = BTreeSet::new();
        for d in &drivers {
            if !driver_ids.insert(&d.id) {
                return Err(ScenarioError::DuplicateDriver(d.id.clone()));
            }
            if d.demand.len() != config.slots {
                return Err(ScenarioError::SlotMismatch {
                    id: d.id.0.clone(),
                    got: d.demand.len(),
                    expected: config.slots,
                });
            }
        }
        let mut spot_ids = BTreeSet::new();
        for p in &spots {
            if !spot_ids.insert(&p.id) {
                return Err(ScenarioError::DuplicateSpot(p.id.clone()));
            }
            if p.availability.len() != config.slots {
                return Err(ScenarioError::SlotMismatch {
                    id: p.id.0.clone(),
                    got: p.availability.len(),
                    expected: config.slots,
                });
            }
        }
        let expected = config.expected_edge_count();
        if edges.len() != expected {
            return Err(ScenarioError::EdgeCount {
                got: edges.len(),
                expected,
            });
        }
        let (lo, hi) = config.distance_range;
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !driver_ids.contains(&e.driver) || !spot_ids.contains(&e.spot) {
                return Err(ScenarioError::UnknownEdge {
                    driver: e.driver.clone(),
                    spot: e.spot.clone(),
                });
            }
            if !seen.insert((&e.driver, &e.spot)) {
                return Err(ScenarioError::DuplicateEdge {
                    driver: e.driver.clone(),
                    spot: e.spot.clone(),
                });
            }
            if !e.distance.is_finite() || e.distance < lo || e.distance > hi {
                return Err(ScenarioError::EdgeDistance {
                    driver: e.driver.clone(),
                    spot: e.spot.clone(),
                    distance: e.distance,
                    lo,
                    hi,
                });
            }
        }
        Ok(Scenario {
            config,
            drivers,
            spots,
            edges,
        })
    }

    /// Matrix distance model over exactly the listed edges.
    pub fn distance_model(&self) -> crate::preferences::DistanceModel {
        crate::preferences::DistanceModel::matrix(
            self.edges
                .iter()
                .map(|e| (e.driver.clone(), e.spot.clone(), e.distance)),
        )
        .expect("scenario edges are validated at construction")
    }
}

/// `D1`..`Dn` / `P1`..`Pm`, zero-padded to one width so lexicographic id
/// order equals numeric order.
fn participant_ids(prefix: &str, count: usize) -> Vec<String> {
    let width = count.to_string().len();
    (1..=count)
        .map(|i| format!("{prefix}{i:0width$}"))
        .collect()
}

fn sample_time_vector(rng: &mut ChaCha8Rng, slots: usize) -> Result<TimeVector, DomainError> {
    let p = (EXPECTED_BUSY_SLOTS / slots as f64).min(1.0);
    let bits: Vec<u8> = (0..slots).map(|_| u8::from(rng.random::<f64>() < p)).collect();
    TimeVector::new(bits)
}

/// Samples a scenario. The draw order is fixed and must stay fixed, because
/// outputs are compared byte for byte across runs: first the edge pairs (one
/// partial shuffle), then each edge's distance in ascending pair order, then
/// — in full mode only — each driver's fields in id order, then each spot's.
pub fn generate(config: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n_drivers = config.num_drivers;
    let n_spots = config.num_spots;

    // Pair selection: partial Fisher–Yates over all pair indices, keeping the
    // first `k`; every k-subset is equally likely.
    let universe = n_drivers * n_spots;
    let k = config.expected_edge_count();
    let mut indices: Vec<u64> = (0..universe as u64).collect();
    for i in 0..k {
        let j = rng.random_range(i..universe);
        indices.swap(i, j);
    }
    let mut selected = indices[..k].to_vec();
    selected.sort_unstable();

    let driver_names = participant_ids("D", n_drivers);
    let spot_names = participant_ids("P", n_spots);

    let (lo, hi) = config.distance_range;
    let edges: Vec<Edge> = selected
        .iter()
        .map(|&pair| {
            let d = (pair / n_spots as u64) as usize;
            let s = (pair % n_spots as u64) as usize;
            Edge {
                driver: DriverId(driver_names[d].clone()),
                spot: SpotId(spot_names[s].clone()),
                distance: rng.random_range(lo..=hi),
            }
        })
        .collect();

    let mut drivers = Vec::with_capacity(n_drivers);
    let mut spots = Vec::with_capacity(n_spots);
    match config.constraint_mode {
        ConstraintMode::EdgesOnly => {
            // Nothing constrains: zero prices and thresholds, empty
            // schedules, full reputation.
            for name in &driver_names {
                drivers.push(Driver::new(
                    DriverId(name.clone()),
                    Point::new(0.0, 0.0),
                    0.0,
                    0.0,
                    TimeVector::zeros(config.slots)?,
                    INITIAL_REPUTATION,
                )?);
            }
            for name in &spot_names {
                spots.push(ParkingSpot::new(
                    SpotId(name.clone()),
                    Point::new(0.0, 0.0),
                    0.0,
                    0.0,
                    TimeVector::zeros(config.slots)?,
                    INITIAL_REPUTATION,
                )?);
            }
        }
        ConstraintMode::Full => {
            for name in &driver_names {
                let max_price = rng.random_range(MAX_PRICE_RANGE);
                let min_spot_reputation = rng.random_range(THRESHOLD_RANGE);
                let reputation = rng.random_range(REPUTATION_RANGE);
                let demand = sample_time_vector(&mut rng, config.slots)?;
                drivers.push(Driver::new(
                    DriverId(name.clone()),
                    Point::new(0.0, 0.0),
                    max_price,
                    min_spot_reputation,
                    demand,
                    reputation,
                )?);
            }
            for name in &spot_names {
                let price = rng.random_range(PRICE_RANGE);
                let min_driver_reputation = rng.random_range(THRESHOLD_RANGE);
                let reputation = rng.random_range(REPUTATION_RANGE);
                let availability = sample_time_vector(&mut rng, config.slots)?;
                spots.push(ParkingSpot::new(
                    SpotId(name.clone()),
                    Point::new(0.0, 0.0),
                    price,
                    min_driver_reputation,
                    availability,
                    reputation,
                )?);
            }
        }
    }

    Scenario::new(config.clone(), drivers, spots, edges)
}

/// Builds a scenario from external records: coordinates give a complete
/// Euclidean distance matrix, and the full feasibility predicate applies.
/// The derived config spans every pair (`edge_fraction` 1.0) with a distance
/// range just covering the observed distances.
pub fn ingest(records: RecordsFile) -> Result<Scenario, ScenarioError> {
    if records.drivers.is_empty() {
        return Err(ScenarioError::NoDrivers);
    }
    if records.spots.is_empty() {
        return Err(ScenarioError::NoSpots);
    }
    let slots = records.drivers[0].demand.len();
    let drivers = records
        .drivers
        .into_iter()
        .map(|r| r.into_driver(slots))
        .collect::<Result<Vec<_>, _>>()?;
    let spots = records
        .spots
        .into_iter()
        .map(|r| r.into_spot(slots))
        .collect::<Result<Vec<_>, _>>()?;

    let mut edges = Vec::with_capacity(drivers.len() * spots.len());
    let mut max_distance = 0.0f64;
    for d in &drivers {
        for p in &spots {
            let distance = d.location.distance(&p.location);
            max_distance = max_distance.max(distance);
            edges.push(Edge {
                driver: d.id.clone(),
                spot: p.id.clone(),
                distance,
            });
        }
    }
    let hi = if max_distance > 0.0 { max_distance } else { 1.0 };
    let config = ScenarioConfig {
        num_drivers: drivers.len(),
        num_spots: spots.len(),
        edge_fraction: 1.0,
        distance_range: (0.0, hi),
        seed: 0,
        slots,
        constraint_mode: ConstraintMode::Full,
    };
    Scenario::new(config, drivers, spots, edges)
}
