//! Comparison matchers: random pick, greedy pick, and optimal assignment.
//!
//! Random and greedy walk the drivers in a shared order — ascending
//! preference-list length, ties by ascending id — so that the two differ only
//! in how a driver picks from their list. The optimal-assignment matcher
//! turns listed distances into weights that favor cardinality first and low
//! total distance second, then solves the square assignment problem exactly.

use crate::matching::{Dense, Matching, MatchingError};
use crate::preferences::{DriverLists, SpotLists};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distance-to-weight transform for the assignment matcher.
///
/// A listed pair at distance `d` scores `cardinality_base + (upper_bound - d)`;
/// an unlisted pair scores 0. `upper_bound` exceeds every listed distance, so
/// every listed pair scores above `cardinality_base`, and `cardinality_base`
/// exceeds `max(|drivers|, |spots|) * upper_bound`, so matching one more pair
/// always outweighs any distance improvement across the rest of the matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssignmentWeights {
    upper_bound: f64,
    cardinality_base: f64,
}

impl AssignmentWeights {
    /// Derives the bounds from the listed distances and the instance size:
    /// `upper_bound` is the largest listed distance plus 1 (just 1 when
    /// nothing is listed) and `cardinality_base` is
    /// `max(|drivers|, |spots|) * upper_bound + 1`.
    pub fn new(driver_lists: &DriverLists, spot_lists: &SpotLists) -> Self {
        let max_distance = driver_lists
            .values()
            .flat_map(|list| list.ranked().iter().map(|(_, d)| *d))
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |m| m.max(d)))
            });
        Self::from_parts(max_distance, driver_lists.len(), spot_lists.len())
    }

    fn from_parts(max_distance: Option<f64>, n_drivers: usize, n_spots: usize) -> Self {
        let upper_bound = max_distance.map_or(1.0, |m| m + 1.0);
        let side = n_drivers.max(n_spots) as f64;
        AssignmentWeights {
            upper_bound,
            cardinality_base: side * upper_bound + 1.0,
        }
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    pub fn cardinality_base(&self) -> f64 {
        self.cardinality_base
    }

    /// Weight of a pair: present distance → `cardinality_base +
    /// (upper_bound - distance)`, absent (unlisted) → 0.
    pub fn weight(&self, distance: Option<f64>) -> f64 {
        match distance {
            Some(d) => self.cardinality_base + (self.upper_bound - d),
            None => 0.0,
        }
    }
}

/// Driver indices in processing order: ascending list length, ties by
/// ascending id. `dense.driver_ids` is already id-sorted, so the stable sort
/// leaves ties in id order.
fn driver_order(dense: &Dense<'_>) -> Vec<u32> {
    let mut order: Vec<u32> = (0..dense.driver_ids.len() as u32).collect();
    order.sort_by_key(|&d| dense.list(d).len());
    order
}

/// For each driver in the shared order, draws uniformly from their list —
/// with replacement — and keeps the first free spot drawn. The attempt budget
/// per driver equals the list length; a driver whose draws all land on taken
/// spots stays unmatched. A fixed seed fixes the outcome for a fixed input:
/// draws index into the list as stored, so two representations of one
/// instance that order a list differently realize different (equally
/// distributed) outcomes under the same seed.
pub fn random_match(
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
    seed: u64,
) -> Result<Matching, MatchingError> {
    let dense = Dense::driver_side(driver_lists, spot_lists)?;
    let partner = random_kernel(&dense, seed);
    dense.matching_from_partners(&partner)
}

/// The draw loop of `random_match` over lists in whatever order the arena
/// holds them. Needs no rank order and never sorts.
pub(crate) fn random_kernel(dense: &Dense<'_>, seed: u64) -> Vec<Option<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spot_taken = vec![false; dense.spot_ids.len()];
    let mut partner: Vec<Option<u32>> = vec![None; dense.driver_ids.len()];
    for &d in &driver_order(dense) {
        let list = dense.list(d);
        for _ in 0..list.len() {
            let (s, _) = list[rng.random_range(0..list.len())];
            if !spot_taken[s as usize] {
                spot_taken[s as usize] = true;
                partner[d as usize] = Some(s);
                break;
            }
        }
    }
    partner
}

/// For each driver in the shared order, takes the nearest still-free spot on
/// their list. First come, first served; nobody is ever displaced.
pub fn greedy_match(
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
) -> Result<Matching, MatchingError> {
    let mut dense = Dense::driver_side(driver_lists, spot_lists)?;
    let partner = greedy_kernel(&mut dense);
    dense.matching_from_partners(&partner)
}

/// The first-fit loop of `greedy_match`, over heap-ordered driver lists
/// (rank-sorted lists qualify). Consumes each list best-first until a free
/// spot turns up, so the taken spot is always the nearest free one.
pub(crate) fn greedy_kernel(dense: &mut Dense<'_>) -> Vec<Option<u32>> {
    let mut spot_taken = vec![false; dense.spot_ids.len()];
    let mut partner: Vec<Option<u32>> = vec![None; dense.driver_ids.len()];
    for d in driver_order(dense) {
        let mut consumed = 0;
        while let Some((s, _)) = dense.pop_best(d, consumed) {
            consumed += 1;
            if !spot_taken[s as usize] {
                spot_taken[s as usize] = true;
                partner[d as usize] = Some(s);
                break;
            }
        }
    }
    partner
}

/// Exact assignment matcher: among all matchings over listed pairs it
/// maximizes cardinality and, among those, minimizes total distance.
///
/// Listed distances become `AssignmentWeights` scores, the instance is padded
/// square with zero-weight cells, and a cubic-time exact solver maximizes the
/// total score. Drivers assigned to padding or to a zero-weight (unlisted)
/// cell are reported unmatched, so no infeasible pair is ever returned.
pub fn hungarian_match(
    driver_lists: &DriverLists,
    spot_lists: &SpotLists,
) -> Result<Matching, MatchingError> {
    let dense = Dense::driver_side(driver_lists, spot_lists)?;
    let partner = km_partners(&dense);
    dense.matching_from_partners(&partner)
}

/// Reusable cost-matrix buffer for repeated assignment solves on one
/// instance.
pub(crate) struct AssignmentScratch {
    cost: Vec<f64>,
}

impl AssignmentScratch {
    pub fn new() -> Self {
        Self { cost: Vec::new() }
    }

    /// A buffer already sized (and touched) for the given instance.
    pub fn sized_for(dense: &Dense<'_>) -> Self {
        let n = dense.driver_ids.len().max(dense.spot_ids.len());
        Self {
            cost: vec![0.0; n * n],
        }
    }
}

/// The weight-matrix construction and exact solve of `hungarian_match`.
/// Entry order within a list never matters — only which cells hold weight.
pub(crate) fn km_partners(dense: &Dense<'_>) -> Vec<Option<u32>> {
    km_partners_with(dense, &mut AssignmentScratch::new())
}

/// `km_partners` against a caller-owned matrix buffer. The matrix holds
/// negated weights, so a listed pair's cell is negative (every listed weight
/// is at least one) and padding stays at zero.
pub(crate) fn km_partners_with(
    dense: &Dense<'_>,
    scratch: &mut AssignmentScratch,
) -> Vec<Option<u32>> {
    let n_drivers = dense.driver_ids.len();
    let n_spots = dense.spot_ids.len();
    let n = n_drivers.max(n_spots);
    if n == 0 {
        return Vec::new();
    }

    let max_distance = (0..n_drivers as u32)
        .flat_map(|d| dense.list(d).iter().map(|&(_, dist)| dist))
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |m| m.max(d)))
        });
    let weights = AssignmentWeights::from_parts(max_distance, n_drivers, n_spots);

    scratch.cost.clear();
    scratch.cost.resize(n * n, 0.0);
    let cost = &mut scratch.cost;
    for d in 0..n_drivers {
        for &(s, dist) in dense.list(d as u32) {
            cost[d * n + s as usize] = -weights.weight(Some(dist));
        }
    }
    let row_to_col = min_cost_assignment(cost, n);

    let mut partner: Vec<Option<u32>> = vec![None; n_drivers];
    for (d, &j) in row_to_col.iter().enumerate().take(n_drivers) {
        if j < n_spots && cost[d * n + j] < 0.0 {
            partner[d] = Some(j as u32);
        }
    }
    partner
}

/// Exact square assignment: returns, for each row, the column that minimizes
/// total cost. Cubic-time shortest augmenting paths with dual potentials;
/// `cost` is row-major `n * n` and must be finite.
fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays; index 0 is the scratch column/row of the augmenting
    // search. col_row[j] = row currently assigned to column j (0 = free).
    let mut row_potential = vec![0.0f64; n + 1];
    let mut col_potential = vec![0.0f64; n + 1];
    let mut col_row = vec![0usize; n + 1];
    let mut path_col = vec![0usize; n + 1];
    for i in 1..=n {
        col_row[0] = i;
        let mut j0 = 0usize;
        let mut min_reduced = vec![f64::INFINITY; n + 1];
        let mut visited = vec![false; n + 1];
        loop {
            visited[j0] = true;
            let i0 = col_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if visited[j] {
                    continue;
                }
                let reduced =
                    cost[(i0 - 1) * n + (j - 1)] - row_potential[i0] - col_potential[j];
                if reduced < min_reduced[j] {
                    min_reduced[j] = reduced;
                    path_col[j] = j0;
                }
                if min_reduced[j] < delta {
                    delta = min_reduced[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if visited[j] {
                    row_potential[col_row[j]] += delta;
                    col_potential[j] -= delta;
                } else {
                    min_reduced[j] -= delta;
                }
            }
            j0 = j1;
            if col_row[j0] == 0 {
                break;
            }
        }
        // Augment along the found path back to the scratch column.
        loop {
            let j1 = path_col[j0];
            col_row[j0] = col_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[col_row[j] - 1] = j - 1;
    }
    row_to_col
}
