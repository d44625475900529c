//! Random hypergraph generators for tests and benchmarks.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::hypergraph::Hypergraph;
use crate::VertexId;

/// `m` hyperedges with sizes uniform in `sizes` and uniformly chosen
/// distinct members.
pub fn uniform_hypergraph<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    sizes: std::ops::RangeInclusive<usize>,
    rng: &mut R,
) -> Hypergraph {
    assert!(
        *sizes.start() >= 1 && *sizes.end() <= n,
        "hyperedge sizes must lie in 1..=n"
    );
    let edges = (0..m)
        .map(|_| {
            let s = rng.random_range(sizes.clone());
            rand::seq::index::sample(rng, n, s)
                .into_iter()
                .map(|v| v as VertexId)
                .collect()
        })
        .collect();
    Hypergraph::new(n, edges).expect("generated hyperedges are valid")
}

/// Chung-Lu style hypergraph: vertex `i` joins hyperedges with weight
/// `(i + 1)^(-1 / (gamma - 1))`, giving a power-law degree tail with
/// exponent about `gamma`.
pub fn power_law_hypergraph<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    gamma: f64,
    sizes: std::ops::RangeInclusive<usize>,
    rng: &mut R,
) -> Hypergraph {
    assert!(gamma > 1.0, "gamma must exceed 1");
    assert!(
        *sizes.start() >= 1 && *sizes.end() <= n,
        "hyperedge sizes must lie in 1..=n"
    );
    let exponent = -1.0 / (gamma - 1.0);
    let weights: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(exponent)).collect();
    let pick = WeightedIndex::new(&weights).expect("weights are positive");
    let edges = (0..m)
        .map(|_| {
            let s = rng.random_range(sizes.clone());
            let mut e: Vec<VertexId> = Vec::with_capacity(s);
            while e.len() < s {
                let v = pick.sample(rng) as VertexId;
                if !e.contains(&v) {
                    e.push(v);
                }
            }
            e
        })
        .collect();
    Hypergraph::new(n, edges).expect("generated hyperedges are valid")
}
