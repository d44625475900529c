//! End-to-end seed selection for each algorithm.

use std::fmt;
use std::str::FromStr;

use crate::bounds::{run_brr, theta_max, BrrConfig, BrrIteration};
use crate::error::{Error, Result};
use crate::greedy::{select_seeds, SeedResult};
use crate::layering::{LayerCache, LayerProvider, UniformLayers};
use crate::sampler::{generate_collection, Model, Sampler, SamplerCounters, SamplerKind};
use crate::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Stratified sampling on layered probabilities, fixed RR count.
    HyperIm,
    /// Stratified sampling inside the bound-driven doubling loop.
    HyperImBrr,
    /// Geometric-skip sampling with uniform `1/deg` probabilities.
    Subsim,
    /// One coin flip per neighbour on layered probabilities.
    Naive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::HyperIm,
        Algorithm::HyperImBrr,
        Algorithm::Subsim,
        Algorithm::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::HyperIm => "hyperim",
            Algorithm::HyperImBrr => "hyperim-brr",
            Algorithm::Subsim => "subsim",
            Algorithm::Naive => "naive",
        }
    }

    pub fn sampler_kind(self) -> SamplerKind {
        match self {
            Algorithm::HyperIm | Algorithm::HyperImBrr => SamplerKind::Stratified,
            Algorithm::Subsim => SamplerKind::Geometric,
            Algorithm::Naive => SamplerKind::Naive,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedParams {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub model: Model,
    pub seed: u64,
    /// Fixed RR count for the non-doubling algorithms (default `theta_max`),
    /// or the RR-count cap for the doubling one.
    pub theta: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub algorithm: Algorithm,
    pub result: SeedResult,
    pub counters: SamplerCounters,
    /// Per-round log of the doubling loop.
    pub iterations: Vec<BrrIteration>,
}

pub fn run_seeds(
    graph: &WeightedGraph,
    algorithm: Algorithm,
    params: &SeedParams,
) -> Result<SeedRun> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(Error::DegenerateGraph("graph has no vertices"));
    }
    if params.k == 0 || params.k > n {
        return Err(Error::InvalidArgument(format!(
            "k must be in 1..={n}, got {}",
            params.k
        )));
    }
    if !(params.epsilon > 0.0 && params.epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be in (0,1), got {}",
            params.epsilon
        )));
    }
    if params.theta == Some(0) {
        return Err(Error::InvalidArgument("theta must be at least 1".into()));
    }
    match algorithm {
        Algorithm::HyperImBrr => {
            let mut cfg = BrrConfig::new(params.k, params.epsilon, params.delta);
            cfg.theta_max = params.theta;
            let run = run_brr(&LayerCache::new(graph), &cfg, params.seed, params.model)?;
            Ok(SeedRun {
                algorithm,
                result: run.result,
                counters: run.counters,
                iterations: run.log,
            })
        }
        Algorithm::Subsim => fixed_theta(&UniformLayers::new(graph), algorithm, params),
        Algorithm::HyperIm | Algorithm::Naive => {
            fixed_theta(&LayerCache::new(graph), algorithm, params)
        }
    }
}

fn fixed_theta<P: LayerProvider>(
    provider: &P,
    algorithm: Algorithm,
    params: &SeedParams,
) -> Result<SeedRun> {
    let n = provider.vertex_count();
    let theta = params
        .theta
        .unwrap_or_else(|| theta_max(n, params.k, params.epsilon));
    let sampler = Sampler::new(algorithm.sampler_kind(), params.model);
    let (collection, counters) = generate_collection(provider, theta, &sampler, params.seed);
    let result = select_seeds(&collection, params.k)?;
    Ok(SeedRun {
        algorithm,
        result,
        counters,
        iterations: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{clique_expand, Hypergraph};

    fn params(k: usize) -> SeedParams {
        SeedParams {
            k,
            epsilon: 0.3,
            delta: 0.1,
            model: Model::Ic,
            seed: 11,
            theta: Some(500),
        }
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("imm".parse::<Algorithm>().is_err());
    }

    #[test]
    fn single_hyperedge_picks_a_member() {
        let hg = Hypergraph::new(4, vec![vec![1, 2, 3]]).unwrap();
        let g = clique_expand(&hg);
        for a in [Algorithm::HyperIm, Algorithm::Naive, Algorithm::Subsim] {
            let r = run_seeds(&g, a, &params(1)).unwrap();
            assert!([1, 2, 3].contains(&r.result.seeds[0]), "{a}");
        }
    }

    #[test]
    fn k_out_of_range() {
        let hg = Hypergraph::new(3, vec![vec![0, 1]]).unwrap();
        let g = clique_expand(&hg);
        assert!(run_seeds(&g, Algorithm::HyperIm, &params(4)).is_err());
        assert!(run_seeds(&g, Algorithm::HyperIm, &params(0)).is_err());
    }

    #[test]
    fn brr_reports_bounds() {
        let hg = Hypergraph::new(
            6,
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0, 5]],
        )
        .unwrap();
        let g = clique_expand(&hg);
        let mut p = params(2);
        p.theta = None;
        let r = run_seeds(&g, Algorithm::HyperImBrr, &p).unwrap();
        assert!(r.result.bounds.is_some());
        assert!(!r.iterations.is_empty());
    }
}
