//! Stable matching over incomplete preference lists.
//!
//! `mm_match` runs driver-proposing deferred acceptance on a circular queue:
//! each popped driver proposes to the next untried spot on their list, spots
//! keep the best proposer seen so far, and displaced or rejected drivers go to
//! the back of the queue. `find_blocking_pairs` and `is_stable` verify
//! outputs, and `enumerate_stable_matchings` is an exhaustive oracle for
//! instances small enough to enumerate.

use crate::domain::{feasible, DriverId, SpotId};
use crate::preferences::{DriverLists, SpotLists};
use crate::scenario::Scenario;
use rustc_hash::FxHashMap;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Largest side length `enumerate_stable_matchings` accepts.
pub const ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatchingError {
    #[error("driver {driver} lists spot {spot}, but that spot's list omits the driver")]
    MissingFromSpotList { driver: DriverId, spot: SpotId },
    #[error("spot {spot} lists driver {driver}, but that driver's list omits the spot")]
    MissingFromDriverList { driver: DriverId, spot: SpotId },
    #[error("driver {driver} lists unknown spot {spot}")]
    UnknownSpot { driver: DriverId, spot: SpotId },
    #[error("spot {spot} lists unknown driver {driver}")]
    UnknownDriver { spot: SpotId, driver: DriverId },
    #[error("pair ({driver}, {spot}) references a participant outside the instance")]
    UnknownPair { driver: DriverId, spot: SpotId },
    #[error("driver {driver} appears in more than one pair")]
    DriverReused { driver: DriverId },
    #[error("spot {spot} appears in more than one pair")]
    SpotReused { spot: SpotId },
    #[error("instance is {drivers}x{spots}, enumeration is capped at {cap}x{cap}")]
    TooLarge {
        drivers: usize,
        spots: usize,
        cap: usize,
    },
}

/// One-to-one pairing plus the leftover participants on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    driver_to_spot: BTreeMap<DriverId, SpotId>,
    spot_to_driver: BTreeMap<SpotId, DriverId>,
    unmatched_drivers: BTreeSet<DriverId>,
    unmatched_spots: BTreeSet<SpotId>,
}

impl Matching {
    /// Validates that pairs are one-to-one and drawn from the given
    /// participant sets, then fills in the unmatched remainder.
    pub fn new(
        pairs: impl IntoIterator<Item = (DriverId, SpotId)>,
        drivers: impl IntoIterator<Item = DriverId>,
        spots: impl IntoIterator<Item = SpotId>,
    ) -> Result<Self, MatchingError> {
        let all_drivers: BTreeSet<DriverId> = drivers.into_iter().collect();
        let all_spots: BTreeSet<SpotId> = spots.into_iter().collect();
        let mut driver_to_spot = BTreeMap::new();
        let mut spot_to_driver = BTreeMap::new();
        for (d, s) in pairs {
            if !all_drivers.contains(&d) || !all_spots.contains(&s) {
                return Err(MatchingError::UnknownPair { driver: d, spot: s });
            }
            if let Some(previous) = spot_to_driver.insert(s.clone(), d.clone()) {
                let _ = previous;
                return Err(MatchingError::SpotReused { spot: s });
            }
            if driver_to_spot.insert(d.clone(), s).is_some() {
                return Err(MatchingError::DriverReused { driver: d });
            }
        }
        let unmatched_drivers = all_drivers
            .into_iter()
            .filter(|d| !driver_to_spot.contains_key(d))
            .collect();
        let unmatched_spots = all_spots
            .into_iter()
            .filter(|s| !spot_to_driver.contains_key(s))
            .collect();
        Ok(Matching {
            driver_to_spot,
            spot_to_driver,
            unmatched_drivers,
            unmatched_spots,
        })
    }

    /// Matched pairs in ascending driver-id order.
    pub fn pairs(&self) -> impl Iterator<Item = (&DriverId, &SpotId)> + '_ {
        self.driver_to_spot.iter()
    }

    pub fn spot_of(&self, d: &DriverId) -> Option<&SpotId> {
        self.driver_to_spot.get(d)
    }

    pub fn driver_of(&self, s: &SpotId) -> Option<&DriverId> {
        self.spot_to_driver.get(s)
    }

    pub fn contains_pair(&self, d: &DriverId, s: &SpotId) -> bool {
        self.spot_of(d) == Some(s)
    }

    pub fn matched_count(&self) -> usize {
        self.driver_to_spot.len()
    }

    pub fn unmatched_drivers(&self) -> &BTreeSet<DriverId> {
        &self.unmatched_drivers
    }

    pub fn unmatched_spots(&self) -> &BTreeSet<SpotId> {
        &self.unmatched_spots
    }

    /// All matched driver ids, ascending.
    pub fn matched_drivers(&self) -> impl Iterator<Item = &DriverId> + '_ {
        self.driver_to_spot.keys()
    }
}

/// A mutually listed, unmatched pair that would rather have each other than
/// their current assignments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockingPair {
    pub driver: DriverId,
    pub spot: SpotId,
}

/// Work counters from one `mm_match` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProposalTrace {
    /// Total proposals issued; at most |drivers| times |spots|.
    pub proposals: u64,
    /// Times an already matched spot switched to a better proposer.
    pub displacements: u64,
}

/// Spot-side preference comparisons in one flat row-major block. `key(s, d)`
/// is the bit pattern of the pair's distance — for the finite, non-negative
/// distances lists admit, bit order equals value order — and `u64::MAX` (a
/// NaN pattern no distance produces) marks an unlisted pair. Spot `s`
/// strictly prefers `d1` over `d2` iff `(key(s, d1), d1) < (key(s, d2), d2)`:
/// closer first, ties to the smaller index, which is the smaller id. This is
/// exactly the rank order of the spot's preference list, without building it.
pub(crate) struct SpotKeys {
    n_drivers: usize,
    keys: Vec<u64>,
}

impl SpotKeys {
    /// A zero-capacity placeholder for runs that never consult spot keys.
    pub fn empty() -> Self {
        SpotKeys {
            n_drivers: 0,
            keys: Vec::new(),
        }
    }

    #[inline]
    pub fn key(&self, s: u32, d: u32) -> u64 {
        self.keys[s as usize * self.n_drivers + d as usize]
    }

    /// Resets every cell to "unlisted" and refills from the graph's spot
    /// arena, for reusing one allocation across runs on the same instance.
    pub fn refill_from_spot_arena(&mut self, graph: &Dense<'_>) {
        debug_assert_eq!(self.keys.len(), graph.spot_ids.len() * self.n_drivers);
        self.keys.fill(u64::MAX);
        self.fill_rows(graph);
    }

    fn fill_rows(&mut self, graph: &Dense<'_>) {
        for s in 0..graph.spot_ids.len() {
            let row = s * self.n_drivers;
            for &(d, dist) in graph.slist(s as u32) {
                self.keys[row + d as usize] = dist.to_bits();
            }
        }
    }
}

/// Packs one adjacency entry into a single comparable integer: distance bits
/// above, index below. For the non-negative finite distances lists admit,
/// f64 bit order equals value order, so ascending key order is ascending
/// distance with ties broken by ascending index — exactly rank order.
#[inline]
fn entry_key(e: (u32, f64)) -> u128 {
    ((e.1.to_bits() as u128) << 32) | e.0 as u128
}

/// Restores the min-heap property below position `i` of `h`.
fn sift_down(h: &mut [(u32, f64)], mut i: usize) {
    loop {
        let left = 2 * i + 1;
        if left >= h.len() {
            break;
        }
        let right = left + 1;
        let mut child = left;
        if right < h.len() && entry_key(h[right]) < entry_key(h[left]) {
            child = right;
        }
        if entry_key(h[child]) < entry_key(h[i]) {
            h.swap(child, i);
            i = child;
        } else {
            break;
        }
    }
}

/// Arranges `h` into a min-heap ordered by `entry_key`.
fn heapify(h: &mut [(u32, f64)]) {
    for i in (0..h.len() / 2).rev() {
        sift_down(h, i);
    }
}

/// Removes and returns the least entry of the non-empty heap `h`, leaving a
/// valid heap in `h[..len - 1]`. Entry keys are unique, so the pop sequence
/// is the same no matter how the heap is arranged internally.
fn heap_pop(h: &mut [(u32, f64)]) -> (u32, f64) {
    let last = h.len() - 1;
    h.swap(0, last);
    sift_down(&mut h[..last], 0);
    h[last]
}

/// The instance in index form: ascending-id participant indices plus the
/// feasible (driver, spot, distance) edges as flat adjacency arenas, one per
/// side, each sliced by offsets. Built either from preference lists (entries
/// arrive rank-sorted) or straight from a scenario (entries arrive in stored
/// edge order and stay unsorted until a matcher that needs order arranges
/// them).
#[derive(Clone)]
pub(crate) struct Dense<'a> {
    pub driver_ids: Vec<&'a DriverId>,
    pub spot_ids: Vec<&'a SpotId>,
    /// Concatenated (spot index, distance) entries per driver.
    d_entries: Vec<(u32, f64)>,
    /// d_entries[d_offsets[d]..d_offsets[d + 1]] is driver d's list.
    d_offsets: Vec<usize>,
    /// Concatenated (driver index, distance) entries per spot. Empty when
    /// built driver-side only.
    s_entries: Vec<(u32, f64)>,
    s_offsets: Vec<usize>,
}

impl<'a> Dense<'a> {
    /// Converts only the driver side; the spot arena stays empty. Enough for
    /// the matchers that never consult spot preferences.
    pub fn driver_side(
        driver_lists: &'a DriverLists,
        spot_lists: &'a SpotLists,
    ) -> Result<Self, MatchingError> {
        let driver_ids: Vec<&DriverId> = driver_lists.keys().collect();
        let spot_ids: Vec<&SpotId> = spot_lists.keys().collect();
        let spot_index: FxHashMap<&SpotId, u32> = spot_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i as u32))
            .collect();
        let total: usize = driver_lists.values().map(|list| list.len()).sum();
        let mut d_entries = Vec::with_capacity(total);
        let mut d_offsets = Vec::with_capacity(driver_ids.len() + 1);
        d_offsets.push(0);
        for (id, list) in driver_lists {
            for (spot, distance) in list.ranked() {
                let Some(&s) = spot_index.get(spot) else {
                    return Err(MatchingError::UnknownSpot {
                        driver: id.clone(),
                        spot: spot.clone(),
                    });
                };
                d_entries.push((s, *distance));
            }
            d_offsets.push(d_entries.len());
        }
        Ok(Dense {
            driver_ids,
            spot_ids,
            d_entries,
            d_offsets,
            s_entries: Vec::new(),
            s_offsets: vec![0],
        })
    }

    /// Index form of a validated scenario: the feasibility predicate filters
    /// the stored edges, and both arenas keep the surviving edges in stored
    /// order, grouped by participant without any sorting.
    pub fn from_scenario(s: &'a Scenario) -> Dense<'a> {
        let mut drivers: Vec<&crate::domain::Driver> = s.drivers.iter().collect();
        drivers.sort_by(|a, b| a.id.cmp(&b.id));
        let mut spots: Vec<&crate::domain::ParkingSpot> = s.spots.iter().collect();
        spots.sort_by(|a, b| a.id.cmp(&b.id));
        let driver_ids: Vec<&DriverId> = drivers.iter().map(|d| &d.id).collect();
        let spot_ids: Vec<&SpotId> = spots.iter().map(|p| &p.id).collect();
        let driver_index: FxHashMap<&DriverId, u32> = driver_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i as u32))
            .collect();
        let spot_index: FxHashMap<&SpotId, u32> = spot_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i as u32))
            .collect();

        let mut feasible_edges: Vec<(u32, u32, f64)> = Vec::with_capacity(s.edges.len());
        for e in &s.edges {
            let d = *driver_index
                .get(&e.driver)
                .expect("scenario validation rejects edges naming unknown drivers");
            let p = *spot_index
                .get(&e.spot)
                .expect("scenario validation rejects edges naming unknown spots");
            let open = feasible(drivers[d as usize], spots[p as usize])
                .expect("scenario validation fixes one slot count for every time vector");
            if open {
                feasible_edges.push((d, p, e.distance));
            }
        }

        let group = |side: usize, key: fn(&(u32, u32, f64)) -> u32, val: fn(&(u32, u32, f64)) -> (u32, f64)| {
            let mut offsets = vec![0usize; side + 1];
            for e in &feasible_edges {
                offsets[key(e) as usize + 1] += 1;
            }
            for i in 0..side {
                offsets[i + 1] += offsets[i];
            }
            let mut cursor = offsets[..side].to_vec();
            let mut entries = vec![(0u32, 0.0f64); feasible_edges.len()];
            for e in &feasible_edges {
                let k = key(e) as usize;
                entries[cursor[k]] = val(e);
                cursor[k] += 1;
            }
            (entries, offsets)
        };
        let (d_entries, d_offsets) = group(driver_ids.len(), |e| e.0, |e| (e.1, e.2));
        let (s_entries, s_offsets) = group(spot_ids.len(), |e| e.1, |e| (e.0, e.2));

        Dense {
            driver_ids,
            spot_ids,
            d_entries,
            d_offsets,
            s_entries,
            s_offsets,
        }
    }

    /// Copy carrying only the participant ids and the driver arena, for a
    /// matcher that never consults the spot side.
    pub fn clone_driver_side(&self) -> Dense<'a> {
        Dense {
            driver_ids: self.driver_ids.clone(),
            spot_ids: self.spot_ids.clone(),
            d_entries: self.d_entries.clone(),
            d_offsets: self.d_offsets.clone(),
            s_entries: Vec::new(),
            s_offsets: vec![0],
        }
    }

    /// A zero-participant placeholder for runs that never touch this side.
    pub fn empty() -> Dense<'a> {
        Dense {
            driver_ids: Vec::new(),
            spot_ids: Vec::new(),
            d_entries: Vec::new(),
            d_offsets: vec![0],
            s_entries: Vec::new(),
            s_offsets: vec![0],
        }
    }

    /// Driver d's (spot index, distance) entries.
    #[inline]
    pub fn list(&self, d: u32) -> &[(u32, f64)] {
        &self.d_entries[self.d_offsets[d as usize]..self.d_offsets[d as usize + 1]]
    }

    /// Spot s's (driver index, distance) entries. Panics on a driver-side-only
    /// build.
    #[inline]
    pub fn slist(&self, s: u32) -> &[(u32, f64)] {
        &self.s_entries[self.s_offsets[s as usize]..self.s_offsets[s as usize + 1]]
    }

    /// Arranges every driver's entries into a best-first min-heap — the lazy
    /// equivalent of full rank-sorting for matchers that consume only the
    /// front of each list. A rank-sorted list is already a valid heap.
    pub fn heapify_driver_lists(&mut self) {
        for d in 0..self.driver_ids.len() {
            heapify(&mut self.d_entries[self.d_offsets[d]..self.d_offsets[d + 1]]);
        }
    }

    /// Pops the best remaining entry off driver `d`'s heap-ordered list,
    /// given how many entries the caller already consumed. Pop order is
    /// ascending (distance, spot index) — exactly rank order.
    pub fn pop_best(&mut self, d: u32, consumed: usize) -> Option<(u32, f64)> {
        let start = self.d_offsets[d as usize];
        let live = self.d_offsets[d as usize + 1] - start - consumed;
        if live == 0 {
            return None;
        }
        Some(heap_pop(&mut self.d_entries[start..start + live]))
    }

    /// Spot-side comparison keys filled in one row-sequential pass over the
    /// spot arena.
    pub fn spot_keys_from_spot_arena(&self) -> SpotKeys {
        let n_drivers = self.driver_ids.len();
        let mut keys = SpotKeys {
            n_drivers,
            keys: vec![u64::MAX; self.spot_ids.len() * n_drivers],
        };
        keys.fill_rows(self);
        keys
    }

    /// Overwrites this driver-side clone's entries with `other`'s. Both sides
    /// must describe the same instance (identical shape).
    pub fn copy_entries_from(&mut self, other: &Dense<'a>) {
        debug_assert_eq!(self.d_offsets, other.d_offsets);
        self.d_entries.copy_from_slice(&other.d_entries);
    }

    /// Converts both sides from preference lists.
    pub fn full(
        driver_lists: &'a DriverLists,
        spot_lists: &'a SpotLists,
    ) -> Result<Self, MatchingError> {
        let mut dense = Self::driver_side(driver_lists, spot_lists)?;
        let driver_index: FxHashMap<&DriverId, u32> = dense
            .driver_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i as u32))
            .collect();
        let total: usize = spot_lists.values().map(|list| list.len()).sum();
        let mut s_entries = Vec::with_capacity(total);
        let mut s_offsets = Vec::with_capacity(dense.spot_ids.len() + 1);
        s_offsets.push(0);
        for (id, list) in spot_lists {
            for (driver, distance) in list.ranked() {
                let Some(&d) = driver_index.get(driver) else {
                    return Err(MatchingError::UnknownDriver {
                        spot: id.clone(),
                        driver: driver.clone(),
                    });
                };
                s_entries.push((d, *distance));
            }
            s_offsets.push(s_entries.len());
        }
        dense.s_entries = s_entries;
        dense.s_offsets = s_offsets;
        Ok(dense)
    }

    /// Builds the flat spot-side comparison keys straight from the preference
    /// maps, without materializing dense spot lists. Fails on a spot list
    /// entry naming a driver outside the instance.
    pub fn spot_keys(&self, spot_lists: &SpotLists) -> Result<SpotKeys, MatchingError> {
        let n_drivers = self.driver_ids.len();
        let driver_index: FxHashMap<&DriverId, u32> = self
            .driver_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i as u32))
            .collect();
        let mut keys = vec![u64::MAX; spot_lists.len() * n_drivers];
        for (s, (id, list)) in spot_lists.iter().enumerate() {
            let row = s * n_drivers;
            for (driver, distance) in list.ranked() {
                let Some(&d) = driver_index.get(driver) else {
                    return Err(MatchingError::UnknownDriver {
                        spot: id.clone(),
                        driver: driver.clone(),
                    });
                };
                keys[row + d as usize] = distance.to_bits();
            }
        }
        Ok(SpotKeys { n_drivers, keys })
    }

    /// Builds a `Matching` from per-driver partner indices. Equivalent to
    /// `Matching::new` over the same pairs: spot indices are in bounds by
    /// construction of the dense lists and the slice form admits one partner
    /// per driver, so reuse of a spot is the one property left to check.
    pub fn matching_from_partners(
        &self,
        driver_partner: &[Option<u32>],
    ) -> Result<Matching, MatchingError> {
        assert_eq!(driver_partner.len(), self.driver_ids.len());
        let mut spot_partner: Vec<Option<u32>> = vec![None; self.spot_ids.len()];
        for (d, s) in driver_partner.iter().enumerate() {
            if let Some(s) = *s {
                let slot = &mut spot_partner[s as usize];
                if slot.is_some() {
                    return Err(MatchingError::SpotReused {
                        spot: self.spot_ids[s as usize].clone(),
                    });
                }
                *slot = Some(d as u32);
            }
        }
        // Ids are ascending on both sides, so each iterator below runs in
        // ascending key order and the maps and sets bulk-build.
        let driver_to_spot = driver_partner
            .iter()
            .enumerate()
            .filter_map(|(d, s)| {
                s.map(|s| (self.driver_ids[d].clone(), self.spot_ids[s as usize].clone()))
            })
            .collect();
        let spot_to_driver = spot_partner
            .iter()
            .enumerate()
            .filter_map(|(s, d)| {
                d.map(|d| (self.spot_ids[s].clone(), self.driver_ids[d as usize].clone()))
            })
            .collect();
        let unmatched_drivers = driver_partner
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(d, _)| self.driver_ids[d].clone())
            .collect();
        let unmatched_spots = spot_partner
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_none())
            .map(|(s, _)| self.spot_ids[s].clone())
            .collect();
        Ok(Matching {
            driver_to_spot,
            spot_to_driver,
            unmatched_drivers,
            unmatched_spots,
        })
    }
}

/// Driver-proposing deferred acceptance. Drivers enter a queue in ascending
/// id order; each proposal consumes the proposer's next list entry. A free
/// spot accepts; a taken spot switches only for a strictly better-ranked
/// proposer, sending the loser to the back of the queue. Drivers whose lists
/// run out stay unmatched. The result carries no blocking pairs.
pub fn mm_match(
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
) -> Result<(Matching, ProposalTrace), MatchingError> {
    let mut dense = Dense::driver_side(driver_lists, spot_lists)?;
    let spot_keys = dense.spot_keys(spot_lists)?;
    let (driver_partner, trace) = mm_kernel(&mut dense, &spot_keys)?;
    let matching = dense.matching_from_partners(&driver_partner)?;
    Ok((matching, trace))
}

/// The proposal loop of `mm_match`, over heap-ordered driver lists
/// (rank-sorted lists qualify) and the spot-side comparison keys. Consumes
/// the heaps; returns each driver's final partner index.
pub(crate) fn mm_kernel(
    dense: &mut Dense<'_>,
    spot_keys: &SpotKeys,
) -> Result<(Vec<Option<u32>>, ProposalTrace), MatchingError> {
    let n_drivers = dense.driver_ids.len();
    let mut queue: VecDeque<u32> = (0..n_drivers as u32).collect();
    let mut consumed = vec![0usize; n_drivers];
    let mut driver_partner: Vec<Option<u32>> = vec![None; n_drivers];
    let mut spot_partner: Vec<Option<u32>> = vec![None; dense.spot_ids.len()];
    let mut trace = ProposalTrace::default();

    while let Some(d) = queue.pop_front() {
        let Some((s, _)) = dense.pop_best(d, consumed[d as usize]) else {
            // List exhausted: permanently unmatched.
            continue;
        };
        consumed[d as usize] += 1;
        trace.proposals += 1;

        let key_of_d = spot_keys.key(s, d);
        if key_of_d == u64::MAX {
            return Err(MatchingError::MissingFromSpotList {
                driver: dense.driver_ids[d as usize].clone(),
                spot: dense.spot_ids[s as usize].clone(),
            });
        }
        match spot_partner[s as usize] {
            None => {
                spot_partner[s as usize] = Some(d);
                driver_partner[d as usize] = Some(s);
            }
            Some(current) if (key_of_d, d) < (spot_keys.key(s, current), current) => {
                driver_partner[current as usize] = None;
                queue.push_back(current);
                trace.displacements += 1;
                spot_partner[s as usize] = Some(d);
                driver_partner[d as usize] = Some(s);
            }
            Some(_) => queue.push_back(d),
        }
    }

    Ok((driver_partner, trace))
}

/// All mutually listed pairs outside the matching where each side is either
/// unmatched or ranks the other strictly above its current partner.
///
/// The matching must be structurally valid against the lists: every matched
/// pair mutually listed, every id drawn from the instance. Matcher outputs
/// and oracle results always satisfy this.
pub fn find_blocking_pairs(
    m: &Matching,
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
) -> Vec<BlockingPair> {
    let dense = Dense::driver_side(driver_lists, spot_lists)
        .expect("matching was produced against consistent lists");
    let spot_keys = dense
        .spot_keys(spot_lists)
        .expect("matching was produced against consistent lists");
    let n_drivers = dense.driver_ids.len();
    let n_spots = dense.spot_ids.len();

    let spot_index: FxHashMap<&SpotId, u32> = dense
        .spot_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i as u32))
        .collect();

    // Current partner of each driver, as an index into spot_ids.
    let mut partner_of_driver: Vec<Option<u32>> = vec![None; n_drivers];
    for (d, id) in dense.driver_ids.iter().enumerate() {
        if let Some(spot) = m.spot_of(id) {
            let s = *spot_index
                .get(spot)
                .expect("matched spot belongs to the instance");
            partner_of_driver[d] = Some(s);
        }
    }

    // Rank (driver side) or comparison key (spot side) each participant
    // assigns its current partner; MAX sentinels mean unmatched, which any
    // real candidate beats.
    let mut driver_current_rank = vec![u32::MAX; n_drivers];
    for d in 0..n_drivers {
        if let Some(s) = partner_of_driver[d] {
            let rank = dense
                .list(d as u32)
                .iter()
                .position(|&(spot, _)| spot == s)
                .expect("matched spot appears on the driver's list");
            driver_current_rank[d] = rank as u32;
        }
    }
    let mut spot_current: Vec<(u64, u32)> = vec![(u64::MAX, u32::MAX); n_spots];
    for d in 0..n_drivers {
        if let Some(s) = partner_of_driver[d] {
            let key = spot_keys.key(s, d as u32);
            assert_ne!(key, u64::MAX, "matched driver appears on the spot's list");
            spot_current[s as usize] = (key, d as u32);
        }
    }

    let mut blocking = Vec::new();
    for d in 0..n_drivers {
        for (rank_for_driver, &(s, _)) in dense.list(d as u32).iter().enumerate() {
            let key_for_spot = spot_keys.key(s, d as u32);
            if key_for_spot == u64::MAX {
                // Not mutually listed; cannot block.
                continue;
            }
            let driver_prefers = (rank_for_driver as u32) < driver_current_rank[d];
            let spot_prefers = (key_for_spot, d as u32) < spot_current[s as usize];
            if driver_prefers && spot_prefers {
                blocking.push(BlockingPair {
                    driver: dense.driver_ids[d].clone(),
                    spot: dense.spot_ids[s as usize].clone(),
                });
            }
        }
    }
    blocking.sort();
    blocking
}

/// True iff the matching admits no blocking pair.
pub fn is_stable(m: &Matching, driver_lists: &DriverLists, spot_lists: &SpotLists) -> bool {
    find_blocking_pairs(m, driver_lists, spot_lists).is_empty()
}

/// Exhaustively enumerates every stable matching of a small instance by
/// walking all partial matchings over the listed pairs and keeping the stable
/// ones. Each candidate is judged by a direct transliteration of the
/// blocking-pair definition (linear list scans), deliberately sharing no code
/// with `find_blocking_pairs`.
pub fn enumerate_stable_matchings(
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
) -> Result<Vec<Matching>, MatchingError> {
    let n_drivers = driver_lists.len();
    let n_spots = spot_lists.len();
    if n_drivers > ENUMERATION_CAP || n_spots > ENUMERATION_CAP {
        return Err(MatchingError::TooLarge {
            drivers: n_drivers,
            spots: n_spots,
            cap: ENUMERATION_CAP,
        });
    }
    let dense = Dense::full(driver_lists, spot_lists)?;
    // The oracle demands fully mutual lists up front.
    for d in 0..n_drivers {
        for &(s, _) in dense.list(d as u32) {
            if !dense.slist(s).iter().any(|&(x, _)| x == d as u32) {
                return Err(MatchingError::MissingFromSpotList {
                    driver: dense.driver_ids[d].clone(),
                    spot: dense.spot_ids[s as usize].clone(),
                });
            }
        }
    }
    for s in 0..n_spots {
        for &(d, _) in dense.slist(s as u32) {
            if !dense.list(d).iter().any(|&(x, _)| x == s as u32) {
                return Err(MatchingError::MissingFromDriverList {
                    driver: dense.driver_ids[d as usize].clone(),
                    spot: dense.spot_ids[s as usize].clone(),
                });
            }
        }
    }

    let mut assignment: Vec<Option<u32>> = vec![None; n_drivers];
    let mut spot_taken = vec![false; n_spots];
    let mut stable = Vec::new();
    walk(
        0,
        &dense,
        &mut assignment,
        &mut spot_taken,
        &mut stable,
    )?;
    Ok(stable)
}

fn walk(
    d: usize,
    dense: &Dense<'_>,
    assignment: &mut Vec<Option<u32>>,
    spot_taken: &mut Vec<bool>,
    stable: &mut Vec<Matching>,
) -> Result<(), MatchingError> {
    if d == assignment.len() {
        if candidate_is_stable(dense, assignment) {
            stable.push(dense.matching_from_partners(assignment)?);
        }
        return Ok(());
    }
    assignment[d] = None;
    walk(d + 1, dense, assignment, spot_taken, stable)?;
    let list: Vec<(u32, f64)> = dense.list(d as u32).to_vec();
    for (s, _) in list {
        if !spot_taken[s as usize] {
            spot_taken[s as usize] = true;
            assignment[d] = Some(s);
            walk(d + 1, dense, assignment, spot_taken, stable)?;
            assignment[d] = None;
            spot_taken[s as usize] = false;
        }
    }
    Ok(())
}

/// Direct reading of the blocking-pair definition over one candidate.
fn candidate_is_stable(dense: &Dense<'_>, assignment: &[Option<u32>]) -> bool {
    let mut spot_partner: Vec<Option<u32>> = vec![None; dense.spot_ids.len()];
    for (d, s) in assignment.iter().enumerate() {
        if let Some(s) = s {
            spot_partner[*s as usize] = Some(d as u32);
        }
    }
    for d in 0..assignment.len() {
        let list = dense.list(d as u32);
        for &(s, _) in list {
            if assignment[d] == Some(s) {
                continue;
            }
            let driver_prefers = match assignment[d] {
                None => true,
                Some(current) => {
                    let rank_s = list.iter().position(|&(x, _)| x == s);
                    let rank_cur = list.iter().position(|&(x, _)| x == current);
                    rank_s < rank_cur
                }
            };
            if !driver_prefers {
                continue;
            }
            let spot_list = dense.slist(s);
            let spot_prefers = match spot_partner[s as usize] {
                None => true,
                Some(current) => {
                    let rank_d = spot_list.iter().position(|&(x, _)| x == d as u32);
                    let rank_cur = spot_list.iter().position(|&(x, _)| x == current);
                    rank_d < rank_cur
                }
            };
            if spot_prefers {
                return false;
            }
        }
    }
    true
}
