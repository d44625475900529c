//! Random RR-set generation.
//!
//! Three samplers share one breadth-first traversal and differ only in how a
//! popped vertex's layered sample set is expanded:
//!
//! * [`SamplerKind::Stratified`]: per layer, draw a subset size `h`
//!   (binomial for layers of at most 20 members, truncated Poisson above) and
//!   then `h` distinct members by swap-and-shrink position draws.
//! * [`SamplerKind::Naive`]: one Bernoulli flip per neighbour.
//! * [`SamplerKind::Geometric`]: geometric skip lengths within each
//!   equal-probability layer.
//!
//! All three produce the same independent-inclusion distribution over
//! subsets (up to the Poisson approximation on large layers); the counters in
//! [`SamplerCounters`] record how many random draws each needed.

use std::ops::{AddAssign, Range};

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::greedy::RRCollection;
use crate::layering::{LayerProvider, LayeredNeighborhood};
use crate::rng::{stream, DOMAIN_RR};
use crate::VertexId;

/// Layers with at most this many members use the binomial strategy.
pub const DEFAULT_POISSON_CUTOFF: usize = 20;

/// Above this mean the Poisson size draw switches from inversion to
/// `rand_distr`.
const POISSON_INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Stratified,
    Naive,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Ic,
    Lt,
}

/// Instrumented draw counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SamplerCounters {
    /// Subset-size draws (one per layer visited by the stratified sampler).
    pub size_draws: u64,
    /// Position draws used to pick distinct members.
    pub selection_draws: u64,
    /// Per-vertex coin flips.
    pub bernoulli_draws: u64,
    /// Geometric skip-length draws.
    pub geometric_draws: u64,
}

impl SamplerCounters {
    /// Draws that decide *how many* or *which* vertices join, excluding the
    /// positional picks that follow a size draw.
    pub fn sampling_ops(&self) -> u64 {
        self.size_draws + self.bernoulli_draws + self.geometric_draws
    }

    pub fn total(&self) -> u64 {
        self.sampling_ops() + self.selection_draws
    }
}

impl AddAssign for SamplerCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.size_draws += rhs.size_draws;
        self.selection_draws += rhs.selection_draws;
        self.bernoulli_draws += rhs.bernoulli_draws;
        self.geometric_draws += rhs.geometric_draws;
    }
}

/// A reverse-reachable set. `members[0] == root`; no duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSet {
    pub root: VertexId,
    pub members: Vec<VertexId>,
}

/// Subset size for a layer of `n` members included independently with
/// probability `p`, drawn by inverting the binomial CDF (`n <= cutoff`) or a
/// Poisson(`n p`) CDF truncated to `[0, n]` by rejection.
pub fn draw_subset_size<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
    counters: &mut SamplerCounters,
) -> usize {
    draw_subset_size_with_cutoff(n, p, DEFAULT_POISSON_CUTOFF, rng, counters)
}

pub fn draw_subset_size_with_cutoff<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    cutoff: usize,
    rng: &mut R,
    counters: &mut SamplerCounters,
) -> usize {
    debug_assert!(n >= 1 && p > 0.0 && p <= 1.0, "n={n} p={p}");
    counters.size_draws += 1;
    if p >= 1.0 {
        return n;
    }
    if n <= cutoff {
        binomial_inverse(n, p, rng.random())
    } else {
        truncated_poisson(n, n as f64 * p, rng)
    }
}

fn binomial_inverse(n: usize, p: f64, u: f64) -> usize {
    let q = 1.0 - p;
    let ratio = p / q;
    let mut pmf = q.powi(n as i32);
    let mut cdf = pmf;
    let mut h = 0;
    while u >= cdf && h < n {
        pmf *= (n - h) as f64 / (h + 1) as f64 * ratio;
        h += 1;
        cdf += pmf;
    }
    h
}

fn truncated_poisson<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> usize {
    if lambda > POISSON_INVERSION_LIMIT {
        let dist = Poisson::new(lambda).expect("positive finite lambda");
        loop {
            let k = dist.sample(rng);
            if k <= n as f64 {
                return k as usize;
            }
        }
    }
    let p0 = (-lambda).exp();
    loop {
        let u: f64 = rng.random();
        let mut pmf = p0;
        let mut cdf = pmf;
        let mut k = 0usize;
        while u >= cdf && pmf > 0.0 {
            k += 1;
            pmf *= lambda / k as f64;
            cdf += pmf;
        }
        if k <= n && pmf > 0.0 {
            return k;
        }
    }
}

/// Picks `h` distinct members uniformly (partial Fisher-Yates over a virtual
/// permutation), one position draw per pick. Panics if `h > members.len()`.
pub fn select_distinct<R: Rng + ?Sized>(
    members: &[VertexId],
    h: usize,
    rng: &mut R,
    counters: &mut SamplerCounters,
    mut emit: impl FnMut(VertexId),
) {
    let n = members.len();
    assert!(h <= n, "cannot select {h} of {n} members");
    counters.selection_draws += h as u64;
    if h > 32 {
        let mut idx: Vec<usize> = (0..n).collect();
        for r in 0..h {
            let a = rng.random_range(r..n);
            idx.swap(r, a);
            emit(members[idx[r]]);
        }
        return;
    }
    // (position, index stored there) for positions touched so far; later
    // entries shadow earlier ones
    let mut displaced: Vec<(usize, usize)> = Vec::with_capacity(h);
    let lookup =
        |d: &[(usize, usize)], pos: usize| d.iter().rev().find(|e| e.0 == pos).map_or(pos, |e| e.1);
    for r in 0..h {
        let a = rng.random_range(r..n);
        let picked = lookup(&displaced, a);
        let at_r = lookup(&displaced, r);
        displaced.push((a, at_r));
        emit(members[picked]);
    }
}

/// One stratified expansion of `nb`.
pub fn expand_stratified<R: Rng + ?Sized>(
    nb: &LayeredNeighborhood,
    cutoff: usize,
    rng: &mut R,
    counters: &mut SamplerCounters,
    mut emit: impl FnMut(VertexId),
) {
    for layer in &nb.layers {
        let h = draw_subset_size_with_cutoff(layer.len(), layer.member_prob, cutoff, rng, counters);
        if h > 0 {
            select_distinct(&layer.members, h, rng, counters, &mut emit);
        }
    }
}

/// One expansion with an independent coin flip per neighbour.
pub fn expand_naive<R: Rng + ?Sized>(
    nb: &LayeredNeighborhood,
    rng: &mut R,
    counters: &mut SamplerCounters,
    mut emit: impl FnMut(VertexId),
) {
    for layer in &nb.layers {
        for &v in &layer.members {
            counters.bernoulli_draws += 1;
            if rng.random::<f64>() < layer.member_prob {
                emit(v);
            }
        }
    }
}

/// One expansion by geometric skips inside each layer.
pub fn expand_geometric<R: Rng + ?Sized>(
    nb: &LayeredNeighborhood,
    rng: &mut R,
    counters: &mut SamplerCounters,
    mut emit: impl FnMut(VertexId),
) {
    for layer in &nb.layers {
        let n = layer.len();
        let p = layer.member_prob;
        if p >= 1.0 {
            for &v in &layer.members {
                counters.geometric_draws += 1;
                let _: f64 = rng.random();
                emit(v);
            }
            continue;
        }
        let log_q = (1.0 - p).ln();
        let mut pos = 0usize;
        loop {
            counters.geometric_draws += 1;
            // U in (0, 1]
            let u = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / log_q).ceil().max(1.0);
            if skip > (n - pos) as f64 {
                break;
            }
            pos += skip as usize;
            emit(layer.members[pos - 1]);
        }
    }
}

/// Linear-threshold reverse step: at most one activator, chosen with
/// probability equal to its member probability (masses renormalised only when
/// they sum above 1).
pub fn expand_lt<R: Rng + ?Sized>(
    nb: &LayeredNeighborhood,
    rng: &mut R,
    counters: &mut SamplerCounters,
    mut emit: impl FnMut(VertexId),
) {
    if nb.layers.is_empty() {
        return;
    }
    let total = nb.expected_activations();
    let scale = if total > 1.0 { 1.0 / total } else { 1.0 };
    counters.size_draws += 1;
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for layer in &nb.layers {
        cum += layer.len() as f64 * layer.member_prob * scale;
        if u < cum {
            counters.selection_draws += 1;
            let idx = rng.random_range(0..layer.len());
            emit(layer.members[idx]);
            return;
        }
    }
}

/// Reusable visited marks for one worker.
pub struct Visited {
    marks: Vec<u32>,
    epoch: u32,
}

impl Visited {
    pub fn new(n: usize) -> Self {
        Visited {
            marks: vec![0; n],
            epoch: 0,
        }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
    }

    /// Marks `v`; returns false if it was already marked.
    fn insert(&mut self, v: VertexId) -> bool {
        let slot = &mut self.marks[v as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            true
        }
    }
}

/// Sampler configuration: expansion strategy, cascade model and the
/// binomial/Poisson cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub kind: SamplerKind,
    pub model: Model,
    pub poisson_cutoff: usize,
}

impl Sampler {
    pub fn new(kind: SamplerKind, model: Model) -> Self {
        Sampler {
            kind,
            model,
            poisson_cutoff: DEFAULT_POISSON_CUTOFF,
        }
    }

    /// Expands one popped vertex, calling `emit` for each selected neighbour
    /// (already-activated vertices included; the caller filters them).
    pub fn expand<R: Rng + ?Sized>(
        &self,
        nb: &LayeredNeighborhood,
        rng: &mut R,
        counters: &mut SamplerCounters,
        emit: impl FnMut(VertexId),
    ) {
        match (self.model, self.kind) {
            (Model::Lt, _) => expand_lt(nb, rng, counters, emit),
            (Model::Ic, SamplerKind::Stratified) => {
                expand_stratified(nb, self.poisson_cutoff, rng, counters, emit)
            }
            (Model::Ic, SamplerKind::Naive) => expand_naive(nb, rng, counters, emit),
            (Model::Ic, SamplerKind::Geometric) => expand_geometric(nb, rng, counters, emit),
        }
    }

    /// Breadth-first RR set of `root`.
    pub fn generate<P: LayerProvider + ?Sized, R: Rng + ?Sized>(
        &self,
        provider: &P,
        root: VertexId,
        rng: &mut R,
        visited: &mut Visited,
    ) -> (RRSet, SamplerCounters) {
        let mut counters = SamplerCounters::default();
        visited.reset();
        visited.insert(root);
        let mut members = vec![root];
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            self.expand(provider.neighborhood(v), rng, &mut counters, |u| {
                if visited.insert(u) {
                    members.push(u);
                }
            });
        }
        (RRSet { root, members }, counters)
    }

    /// RR sets for task indices `tasks`; task `t` draws its root and its
    /// expansions from stream `t` of `master_seed`, so the output does not
    /// depend on the rayon pool size.
    pub fn generate_sets<P: LayerProvider + ?Sized>(
        &self,
        provider: &P,
        master_seed: u64,
        tasks: Range<u64>,
    ) -> (Vec<RRSet>, SamplerCounters) {
        let n = provider.vertex_count();
        assert!(n > 0, "cannot sample RR sets from an empty graph");
        let results: Vec<(RRSet, SamplerCounters)> = tasks
            .into_par_iter()
            .map_init(
                || Visited::new(n),
                |visited, t| {
                    let mut rng = stream(master_seed, DOMAIN_RR, t);
                    let root = rng.random_range(0..n as VertexId);
                    self.generate(provider, root, &mut rng, visited)
                },
            )
            .collect();
        let mut counters = SamplerCounters::default();
        let sets = results
            .into_iter()
            .map(|(set, c)| {
                counters += c;
                set
            })
            .collect();
        (sets, counters)
    }
}

pub fn generate_rr_stratified<P: LayerProvider + ?Sized, R: Rng + ?Sized>(
    provider: &P,
    root: VertexId,
    rng: &mut R,
    model: Model,
) -> (RRSet, SamplerCounters) {
    let mut visited = Visited::new(provider.vertex_count());
    Sampler::new(SamplerKind::Stratified, model).generate(provider, root, rng, &mut visited)
}

pub fn generate_rr_naive<P: LayerProvider + ?Sized, R: Rng + ?Sized>(
    provider: &P,
    root: VertexId,
    rng: &mut R,
) -> (RRSet, SamplerCounters) {
    let mut visited = Visited::new(provider.vertex_count());
    Sampler::new(SamplerKind::Naive, Model::Ic).generate(provider, root, rng, &mut visited)
}

pub fn generate_rr_subset_geometric<P: LayerProvider + ?Sized, R: Rng + ?Sized>(
    provider: &P,
    root: VertexId,
    rng: &mut R,
) -> (RRSet, SamplerCounters) {
    let mut visited = Visited::new(provider.vertex_count());
    Sampler::new(SamplerKind::Geometric, Model::Ic).generate(provider, root, rng, &mut visited)
}

/// `theta` RR sets with uniformly drawn roots. Panics if `theta == 0`.
pub fn generate_collection<P: LayerProvider + ?Sized>(
    provider: &P,
    theta: u64,
    sampler: &Sampler,
    master_seed: u64,
) -> (RRCollection, SamplerCounters) {
    assert!(theta >= 1, "theta must be at least 1");
    let (sets, counters) = sampler.generate_sets(provider, master_seed, 0..theta);
    (RRCollection::new(sets, provider.vertex_count()), counters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::WeightedGraph;
    use crate::layering::{Layer, LayerCache};
    use crate::rng::stream;

    fn rng(i: u64) -> crate::rng::StreamRng {
        stream(99, 1, i)
    }

    #[test]
    fn size_draw_certain_inclusion() {
        let mut c = SamplerCounters::default();
        let mut r = rng(0);
        for _ in 0..100 {
            assert_eq!(draw_subset_size(5, 1.0, &mut r, &mut c), 5);
        }
        assert_eq!(c.size_draws, 100);
    }

    #[test]
    fn size_draw_tiny_probability() {
        let mut c = SamplerCounters::default();
        let mut r = rng(1);
        let zeros = (0..10_000)
            .filter(|_| draw_subset_size(10, 1e-12, &mut r, &mut c) == 0)
            .count();
        assert_eq!(zeros, 10_000);
        let zeros = (0..10_000)
            .filter(|_| draw_subset_size(50, 1e-12, &mut r, &mut c) == 0)
            .count();
        assert_eq!(zeros, 10_000);
    }

    #[test]
    fn binomial_inverse_extremes() {
        assert_eq!(binomial_inverse(4, 0.5, 0.0), 0);
        assert_eq!(binomial_inverse(4, 0.5, 0.999_999_999), 4);
        // P(0) = 1/16, so u just below 1/16 yields 0 and just above yields 1
        assert_eq!(binomial_inverse(4, 0.5, 0.0624), 0);
        assert_eq!(binomial_inverse(4, 0.5, 0.0626), 1);
    }

    #[test]
    fn select_zero_and_all() {
        let members = [3, 5, 9, 11];
        let mut c = SamplerCounters::default();
        let mut out = Vec::new();
        select_distinct(&members, 0, &mut rng(2), &mut c, |v| out.push(v));
        assert!(out.is_empty());
        assert_eq!(c.selection_draws, 0);
        select_distinct(&members, 4, &mut rng(2), &mut c, |v| out.push(v));
        out.sort_unstable();
        assert_eq!(out, members);
        assert_eq!(c.selection_draws, 4);
    }

    #[test]
    fn select_is_distinct() {
        let members: Vec<u32> = (0..15).collect();
        let mut r = rng(3);
        for h in 0..=15 {
            let mut c = SamplerCounters::default();
            let mut out = Vec::new();
            select_distinct(&members, h, &mut r, &mut c, |v| out.push(v));
            assert_eq!(c.selection_draws, h as u64);
            out.sort_unstable();
            out.dedup();
            assert_eq!(out.len(), h);
        }
    }

    #[test]
    #[should_panic]
    fn select_too_many() {
        select_distinct(
            &[1, 2],
            3,
            &mut rng(4),
            &mut SamplerCounters::default(),
            |_| {},
        );
    }

    fn star(leaves: u32) -> WeightedGraph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v, 1)).collect();
        WeightedGraph::from_edges(leaves as usize + 1, &edges).unwrap()
    }

    #[test]
    fn isolated_root() {
        let g = WeightedGraph::from_edges(3, &[(1, 2, 1)]).unwrap();
        let cache = LayerCache::new(&g);
        let (set, c) = generate_rr_stratified(&cache, 0, &mut rng(5), Model::Ic);
        assert_eq!(set.members, vec![0]);
        assert_eq!(c, SamplerCounters::default());
        let (set, c) = generate_rr_naive(&cache, 0, &mut rng(5));
        assert_eq!(set.members, vec![0]);
        assert_eq!(c.bernoulli_draws, 0);
        let (set, _) = generate_rr_subset_geometric(&cache, 0, &mut rng(5));
        assert_eq!(set.members, vec![0]);
    }

    #[test]
    fn certain_activation_reaches_component() {
        // path 0-1-2-3 plus isolated 4; every vertex's layers have member_prob 1
        let cells = (0..5u32)
            .map(|v| {
                let nbrs: Vec<u32> = match v {
                    0 => vec![1],
                    1 => vec![0, 2],
                    2 => vec![1, 3],
                    3 => vec![2],
                    _ => vec![],
                };
                let layers = if nbrs.is_empty() {
                    vec![]
                } else {
                    vec![Layer {
                        weight: 1,
                        members: nbrs,
                        layer_prob: 1.0,
                        member_prob: 1.0,
                    }]
                };
                LayeredNeighborhood { root: v, layers }
            })
            .collect();
        let fixed = crate::layering::FixedLayers::new(cells);
        for kind in [
            SamplerKind::Stratified,
            SamplerKind::Naive,
            SamplerKind::Geometric,
        ] {
            let s = Sampler::new(kind, Model::Ic);
            let (mut set, _) = s.generate(&fixed, 2, &mut rng(6), &mut Visited::new(5));
            set.members.sort_unstable();
            assert_eq!(set.members, vec![0, 1, 2, 3], "{kind:?}");
        }
    }

    #[test]
    fn naive_flips_once_per_neighbor() {
        let g = star(7);
        let cache = LayerCache::new(&g);
        let mut c = SamplerCounters::default();
        expand_naive(cache.neighborhood(0), &mut rng(7), &mut c, |_| {});
        assert_eq!(c.bernoulli_draws, 7);
        assert_eq!(c.size_draws, 0);
    }

    #[test]
    fn stratified_one_size_draw_per_layer() {
        let g =
            WeightedGraph::from_edges(5, &[(0, 1, 3), (0, 2, 2), (0, 3, 2), (0, 4, 1)]).unwrap();
        let cache = LayerCache::new(&g);
        let mut c = SamplerCounters::default();
        expand_stratified(
            cache.neighborhood(0),
            DEFAULT_POISSON_CUTOFF,
            &mut rng(8),
            &mut c,
            |_| {},
        );
        assert_eq!(c.size_draws, 3);
    }

    #[test]
    fn geometric_overshoot_adds_nothing() {
        // member_prob tiny: the first skip always lands past the layer
        let nb = LayeredNeighborhood {
            root: 0,
            layers: vec![Layer {
                weight: 1,
                members: vec![1, 2, 3],
                layer_prob: 3e-9,
                member_prob: 1e-9,
            }],
        };
        let mut c = SamplerCounters::default();
        let mut added = 0;
        let mut r = rng(9);
        for _ in 0..1000 {
            expand_geometric(&nb, &mut r, &mut c, |_| added += 1);
        }
        assert_eq!(added, 0);
        assert_eq!(c.geometric_draws, 1000);
    }

    #[test]
    fn lt_picks_at_most_one() {
        let g = star(6);
        let cache = LayerCache::new(&g);
        let mut r = rng(10);
        for _ in 0..200 {
            let mut picked = 0;
            expand_lt(
                cache.neighborhood(0),
                &mut r,
                &mut SamplerCounters::default(),
                |_| picked += 1,
            );
            assert!(picked <= 1);
        }
    }

    #[test]
    fn collection_is_worker_independent() {
        let g = star(9);
        let cache = LayerCache::new(&g);
        let s = Sampler::new(SamplerKind::Stratified, Model::Ic);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let (a, ca) = one.install(|| generate_collection(&cache, 500, &s, 11));
        let (b, cb) = four.install(|| generate_collection(&cache, 500, &s, 11));
        assert_eq!(a.sets(), b.sets());
        assert_eq!(ca, cb);
        let (one_set, _) = generate_collection(&cache, 1, &s, 11);
        assert_eq!(one_set.len(), 1);
    }

    #[test]
    #[should_panic]
    fn collection_needs_theta() {
        let g = star(2);
        let cache = LayerCache::new(&g);
        generate_collection(&cache, 0, &Sampler::new(SamplerKind::Naive, Model::Ic), 0);
    }
}
