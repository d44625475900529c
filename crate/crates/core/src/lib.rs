//! Influence maximization on hypergraphs.
//!
//! A hypergraph is clique-expanded into a weighted graph whose edge weights
//! count shared hyperedges. Each vertex's neighbourhood is split into weight
//! layers with decreasing activation probability, and reverse-reachable (RR)
//! sets are drawn by stratified sampling: one subset-size draw per layer
//! instead of one coin flip per neighbour. Seeds are picked greedily by RR
//! coverage, optionally inside a bound-driven doubling loop that stops once
//! the lower/upper influence ratio reaches `1 - 1/e - eps`.

pub mod bounds;
pub mod cascade;
pub mod error;
pub mod greedy;
pub mod hypergraph;
pub mod layering;
pub mod pipeline;
pub mod rng;
pub mod sampler;
pub mod synthetic;

pub use error::{Error, Result};
pub use hypergraph::{GraphStats, Hypergraph, WeightedGraph};
pub use layering::{Layer, LayerCache, LayerProvider, LayeredNeighborhood, UniformLayers};

/// Vertex identifier. Ids are dense and 0-based.
pub type VertexId = u32;
