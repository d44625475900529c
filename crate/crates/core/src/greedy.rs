//! Max-coverage seed selection over RR sets and coverage-based influence
//! estimates.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::sampler::RRSet;
use crate::VertexId;

/// RR sets plus the inverted vertex -> set index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRCollection {
    sets: Vec<RRSet>,
    inverted: Vec<Vec<u32>>,
    universe_size: usize,
}

impl RRCollection {
    /// Panics if a member id is outside `universe_size`.
    pub fn new(sets: Vec<RRSet>, universe_size: usize) -> Self {
        let mut inverted = vec![Vec::new(); universe_size];
        for (idx, set) in sets.iter().enumerate() {
            for &v in &set.members {
                assert!(
                    (v as usize) < universe_size,
                    "vertex {v} outside universe of {universe_size}"
                );
                inverted[v as usize].push(idx as u32);
            }
        }
        RRCollection {
            sets,
            inverted,
            universe_size,
        }
    }

    /// Builds a collection from bare member lists (roots set to the first
    /// member). Handy for tests and small examples.
    pub fn from_member_lists(lists: Vec<Vec<VertexId>>, universe_size: usize) -> Self {
        let sets = lists
            .into_iter()
            .map(|members| RRSet {
                root: members.first().copied().unwrap_or(0),
                members,
            })
            .collect();
        RRCollection::new(sets, universe_size)
    }

    /// Appends sets, keeping the inverted index in step.
    pub fn extend(&mut self, sets: impl IntoIterator<Item = RRSet>) {
        for set in sets {
            let idx = self.sets.len() as u32;
            for &v in &set.members {
                assert!(
                    (v as usize) < self.universe_size,
                    "vertex {v} outside universe"
                );
                self.inverted[v as usize].push(idx);
            }
            self.sets.push(set);
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn sets(&self) -> &[RRSet] {
        &self.sets
    }

    /// Indices of the sets containing `v`.
    pub fn sets_containing(&self, v: VertexId) -> &[u32] {
        &self.inverted[v as usize]
    }

    pub fn total_members(&self) -> usize {
        self.sets.iter().map(|s| s.members.len()).sum()
    }

    /// `Λ(S)`: number of sets intersecting `seeds`.
    pub fn coverage(&self, seeds: &[VertexId]) -> usize {
        let mut state = CoverageState::new(self);
        seeds.iter().map(|&v| state.cover(self, v)).sum()
    }
}

/// Which sets the current seed set already covers. Covered sets are flagged,
/// never removed.
#[derive(Debug, Clone)]
pub struct CoverageState {
    covered: Vec<bool>,
    count: usize,
}

impl CoverageState {
    pub fn new(collection: &RRCollection) -> Self {
        CoverageState {
            covered: vec![false; collection.len()],
            count: 0,
        }
    }

    pub fn covered_count(&self) -> usize {
        self.count
    }

    pub fn is_covered(&self, set: usize) -> bool {
        self.covered[set]
    }

    /// Flags every set containing `v`; returns how many were newly covered.
    pub fn cover(&mut self, collection: &RRCollection, v: VertexId) -> usize {
        let mut gained = 0;
        for &s in collection.sets_containing(v) {
            let flag = &mut self.covered[s as usize];
            if !*flag {
                *flag = true;
                gained += 1;
            }
        }
        self.count += gained;
        gained
    }
}

/// `Λ(S ∪ {v}) − Λ(S)`: uncovered sets containing `v`.
pub fn marginal_coverage(collection: &RRCollection, v: VertexId, state: &CoverageState) -> usize {
    collection
        .sets_containing(v)
        .iter()
        .filter(|&&s| !state.is_covered(s as usize))
        .count()
}

/// Lower and upper influence bounds with their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfluenceBounds {
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    /// Seeds in pick order; may hold fewer than `k` when every set is covered.
    pub seeds: Vec<VertexId>,
    /// Marginal coverage of each seed at pick time.
    pub marginals: Vec<usize>,
    pub coverage: usize,
    /// Coverage after each pick.
    pub coverage_trace: Vec<usize>,
    pub influence_estimate: f64,
    pub rr_count: usize,
    pub universe_size: usize,
    /// Doubling rounds (0 for a single fixed-size collection).
    pub iterations: usize,
    pub bounds: Option<InfluenceBounds>,
}

impl SeedResult {
    /// Builds the result for `seeds` picked in order over `collection`.
    pub fn for_seeds(collection: &RRCollection, seeds: Vec<VertexId>) -> Self {
        let mut state = CoverageState::new(collection);
        let mut marginals = Vec::with_capacity(seeds.len());
        let mut trace = Vec::with_capacity(seeds.len());
        for &v in &seeds {
            marginals.push(state.cover(collection, v));
            trace.push(state.covered_count());
        }
        let coverage = state.covered_count();
        SeedResult {
            seeds,
            marginals,
            coverage,
            coverage_trace: trace,
            influence_estimate: scale(collection, coverage),
            rr_count: collection.len(),
            universe_size: collection.universe_size(),
            iterations: 0,
            bounds: None,
        }
    }

    /// `|V| · cumulative coverage / θ` after each pick.
    pub fn cumulative_estimates(&self) -> impl Iterator<Item = f64> + '_ {
        self.coverage_trace
            .iter()
            .map(move |&c| self.universe_size as f64 * c as f64 / self.rr_count as f64)
    }
}

pub const SEEDS_CSV_HEADER: &str =
    "rank,vertex,marginal_coverage,cumulative_coverage,influence_estimate";

/// Seed table rows (without header).
pub fn seed_csv_rows(result: &SeedResult) -> Vec<String> {
    result
        .seeds
        .iter()
        .zip(&result.marginals)
        .zip(&result.coverage_trace)
        .zip(result.cumulative_estimates())
        .enumerate()
        .map(|(i, (((v, m), c), est))| format!("{},{v},{m},{c},{est:.6}", i + 1))
        .collect()
}

fn scale(collection: &RRCollection, coverage: usize) -> f64 {
    collection.universe_size() as f64 * coverage as f64 / collection.len() as f64
}

/// Greedy max coverage: `k` rounds of picking the vertex with the largest
/// marginal coverage, ties broken towards the lowest id. Uses lazy
/// re-evaluation of stale gains; the output equals the plain argmax loop.
pub fn select_seeds(collection: &RRCollection, k: usize) -> Result<SeedResult> {
    assert!(k >= 1, "k must be at least 1");
    if collection.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot select seeds from an empty RR collection".into(),
        ));
    }
    let mut heap: BinaryHeap<(usize, Reverse<VertexId>)> = (0..collection.universe_size()
        as VertexId)
        .filter_map(|v| {
            let g = collection.sets_containing(v).len();
            (g > 0).then_some((g, Reverse(v)))
        })
        .collect();
    let mut state = CoverageState::new(collection);
    let mut seeds = Vec::with_capacity(k);

    while seeds.len() < k && state.covered_count() < collection.len() {
        let Some((bound, Reverse(v))) = heap.pop() else {
            break;
        };
        let gain = marginal_coverage(collection, v, &state);
        if gain == bound {
            // no other entry can beat it: their bounds are <= gain and equal
            // bounds pop in id order
            state.cover(collection, v);
            seeds.push(v);
        } else if gain > 0 {
            heap.push((gain, Reverse(v)));
        }
    }
    Ok(SeedResult::for_seeds(collection, seeds))
}

/// `|V| · Λ(S) / θ`.
pub fn estimate_influence(collection: &RRCollection, seeds: &[VertexId]) -> f64 {
    assert!(
        !collection.is_empty(),
        "influence estimate needs at least one RR set"
    );
    scale(collection, collection.coverage(seeds))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(lists: &[&[u32]], n: usize) -> RRCollection {
        RRCollection::from_member_lists(lists.iter().map(|l| l.to_vec()).collect(), n)
    }

    #[test]
    fn marginal_examples() {
        let c = col(&[&[1, 2], &[2, 3], &[3]], 5);
        let mut st = CoverageState::new(&c);
        assert_eq!(marginal_coverage(&c, 4, &st), 0);
        st.cover(&c, 3);
        assert_eq!(marginal_coverage(&c, 2, &st), 1);

        let all = col(&[&[0, 1], &[1], &[2, 1]], 3);
        assert_eq!(marginal_coverage(&all, 1, &CoverageState::new(&all)), 3);
    }

    #[test]
    fn single_vertex_everywhere() {
        let c = col(&[&[4], &[4], &[4]], 5);
        let r = select_seeds(&c, 3).unwrap();
        assert_eq!(r.seeds, vec![4]);
        assert_eq!(r.coverage, 3);
    }

    #[test]
    fn tie_goes_to_lowest_id() {
        let c = col(&[&[0], &[1], &[0, 1]], 2);
        let r = select_seeds(&c, 1).unwrap();
        assert_eq!(r.seeds, vec![0]);
        assert_eq!(r.coverage, 2);
    }

    #[test]
    fn empty_collection_is_an_error() {
        let c = col(&[], 3);
        assert!(select_seeds(&c, 1).is_err());
    }

    #[test]
    fn estimate_examples() {
        let c = col(&[&[0], &[1], &[2], &[3]], 10);
        assert_eq!(estimate_influence(&c, &[0, 1, 2]), 7.5);
        assert_eq!(estimate_influence(&c, &[]), 0.0);
        assert_eq!(estimate_influence(&c, &[0, 1, 2, 3]), 10.0);
    }

    #[test]
    fn trace_and_rows() {
        let c = col(&[&[0, 1], &[1, 2], &[2], &[3]], 4);
        let r = select_seeds(&c, 3).unwrap();
        assert_eq!(r.seeds, vec![1, 2, 3]);
        assert_eq!(r.marginals, vec![2, 1, 1]);
        assert_eq!(r.coverage_trace, vec![2, 3, 4]);
        let rows = seed_csv_rows(&r);
        assert_eq!(rows[0], "1,1,2,2,2.000000");
        assert_eq!(rows[2], "3,3,1,4,4.000000");
    }
}
