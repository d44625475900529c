//! Weight layers of a vertex's sample set and their activation probabilities.
//!
//! The neighbours of `root` (the vertices able to activate it) are grouped by
//! edge weight, heaviest first. Layer `i` (1-based) of `l` receives total
//! probability `1 / (i ln(l + 1))`, shared equally by its members.

use std::io::Write;
use std::sync::OnceLock;

use crate::hypergraph::WeightedGraph;
use crate::VertexId;

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: u32,
    /// Ascending vertex ids.
    pub members: Vec<VertexId>,
    /// Total probability mass of the layer, unclamped.
    pub layer_prob: f64,
    /// Per-member activation probability, clamped to 1.
    pub member_prob: f64,
}

impl Layer {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNeighborhood {
    pub root: VertexId,
    /// Strictly decreasing weight.
    pub layers: Vec<Layer>,
}

impl LayeredNeighborhood {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// `|A(root)|`, the number of neighbours.
    pub fn sample_size(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    /// Probability that a neighbour joined to `root` by an edge of weight `w`
    /// activates `root`, or `None` if no layer has that weight.
    pub fn member_prob_for_weight(&self, w: u32) -> Option<f64> {
        self.layers
            .binary_search_by(|l| w.cmp(&l.weight))
            .ok()
            .map(|i| self.layers[i].member_prob)
    }

    /// Expected number of neighbours activated in one expansion.
    pub fn expected_activations(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| l.len() as f64 * l.member_prob)
            .sum()
    }

    /// Single-layer neighbourhood where every neighbour activates `root` with
    /// probability `1 / deg(root)`: the uniform (weighted-cascade) setting used
    /// by classic RR samplers.
    pub fn uniform(root: VertexId, mut neighbors: Vec<VertexId>) -> Self {
        if neighbors.is_empty() {
            return LayeredNeighborhood {
                root,
                layers: Vec::new(),
            };
        }
        neighbors.sort_unstable();
        let p = 1.0 / neighbors.len() as f64;
        LayeredNeighborhood {
            root,
            layers: vec![Layer {
                weight: 0,
                members: neighbors,
                layer_prob: 1.0,
                member_prob: p,
            }],
        }
    }
}

/// `P(L_i) = 1 / (i ln(l + 1))`.
///
/// Panics unless `1 <= i <= l`.
pub fn layer_probability(i: usize, l: usize) -> f64 {
    assert!(i >= 1 && i <= l, "layer index {i} outside 1..={l}");
    1.0 / (i as f64 * (l as f64 + 1.0).ln())
}

/// `min(1, layer_prob / n)`. Panics if `n == 0`.
pub fn member_probability(layer_prob: f64, n: usize) -> f64 {
    assert!(n >= 1, "member_probability on an empty layer");
    (layer_prob / n as f64).min(1.0)
}

pub fn build_layers(graph: &WeightedGraph, root: VertexId) -> LayeredNeighborhood {
    let mut by_weight: Vec<(u32, VertexId)> =
        graph.neighbors(root).iter().map(|&(v, w)| (w, v)).collect();
    // heaviest first, ascending id within a weight
    by_weight.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut groups: Vec<(u32, Vec<VertexId>)> = Vec::new();
    for (w, v) in by_weight {
        match groups.last_mut() {
            Some((gw, members)) if *gw == w => members.push(v),
            _ => groups.push((w, vec![v])),
        }
    }

    let l = groups.len();
    let layers = groups
        .into_iter()
        .enumerate()
        .map(|(idx, (weight, members))| {
            let layer_prob = layer_probability(idx + 1, l);
            let member_prob = member_probability(layer_prob, members.len());
            Layer {
                weight,
                members,
                layer_prob,
                member_prob,
            }
        })
        .collect();
    LayeredNeighborhood { root, layers }
}

/// Source of per-vertex layered neighbourhoods.
pub trait LayerProvider: Sync {
    fn vertex_count(&self) -> usize;
    fn neighborhood(&self, v: VertexId) -> &LayeredNeighborhood;
}

/// Lazily built, memoised layers of a graph. Safe for concurrent readers;
/// two threads racing on the same vertex compute identical values.
pub struct LayerCache<'g> {
    graph: &'g WeightedGraph,
    cells: Vec<OnceLock<LayeredNeighborhood>>,
}

impl<'g> LayerCache<'g> {
    pub fn new(graph: &'g WeightedGraph) -> Self {
        LayerCache {
            graph,
            cells: (0..graph.vertex_count()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn graph(&self) -> &'g WeightedGraph {
        self.graph
    }

    /// Largest clamped member probability over the whole graph.
    pub fn max_member_prob(&self) -> f64 {
        (0..self.vertex_count() as VertexId)
            .flat_map(|v| self.neighborhood(v).layers.iter().map(|l| l.member_prob))
            .fold(0.0, f64::max)
    }
}

impl LayerProvider for LayerCache<'_> {
    fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    fn neighborhood(&self, v: VertexId) -> &LayeredNeighborhood {
        self.cells[v as usize].get_or_init(|| build_layers(self.graph, v))
    }
}

/// Uniform-probability neighbourhoods (see [`LayeredNeighborhood::uniform`]).
pub struct UniformLayers {
    cells: Vec<LayeredNeighborhood>,
}

impl UniformLayers {
    pub fn new(graph: &WeightedGraph) -> Self {
        let cells = (0..graph.vertex_count() as VertexId)
            .map(|v| {
                LayeredNeighborhood::uniform(
                    v,
                    graph.neighbors(v).iter().map(|&(u, _)| u).collect(),
                )
            })
            .collect();
        UniformLayers { cells }
    }
}

impl LayerProvider for UniformLayers {
    fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    fn neighborhood(&self, v: VertexId) -> &LayeredNeighborhood {
        &self.cells[v as usize]
    }
}

/// Explicit neighbourhoods, mostly for tests and fixed sample sets.
pub struct FixedLayers {
    cells: Vec<LayeredNeighborhood>,
}

impl FixedLayers {
    /// `cells[v].root` must equal `v`.
    pub fn new(cells: Vec<LayeredNeighborhood>) -> Self {
        for (v, c) in cells.iter().enumerate() {
            assert_eq!(
                c.root as usize, v,
                "neighbourhood stored under the wrong vertex"
            );
        }
        FixedLayers { cells }
    }
}

impl LayerProvider for FixedLayers {
    fn vertex_count(&self) -> usize {
        self.cells.len()
    }

    fn neighborhood(&self, v: VertexId) -> &LayeredNeighborhood {
        &self.cells[v as usize]
    }
}

pub const LAYER_CSV_HEADER: &str = "vertex,layer_index,weight,size,layer_prob,member_prob";

/// Debug dump of the layers of `vertices`, one row per layer.
pub fn write_layer_csv<P: LayerProvider, W: Write>(
    provider: &P,
    vertices: impl IntoIterator<Item = VertexId>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "{LAYER_CSV_HEADER}")?;
    for v in vertices {
        for (i, layer) in provider.neighborhood(v).layers.iter().enumerate() {
            writeln!(
                out,
                "{v},{},{},{},{:.9},{:.9}",
                i + 1,
                layer.weight,
                layer.len(),
                layer.layer_prob,
                layer.member_prob
            )?;
        }
    }
    Ok(())
}
