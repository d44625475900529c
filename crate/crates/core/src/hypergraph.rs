//! Hypergraph loading, clique expansion and dataset statistics.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::layering::build_layers;
use crate::VertexId;

/// A vertex universe plus a list of hyperedges.
///
/// Hyperedges are stored sorted and free of duplicate ids. Size-1 and
/// repeated hyperedges are kept as given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    hyperedges: Vec<Vec<VertexId>>,
}

impl Hypergraph {
    /// Builds a hypergraph, normalising each hyperedge (sort + dedup).
    pub fn new(vertex_count: usize, hyperedges: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut normalised = Vec::with_capacity(hyperedges.len());
        for (idx, mut he) in hyperedges.into_iter().enumerate() {
            if he.is_empty() {
                return Err(Error::InvalidArgument(format!("hyperedge {idx} is empty")));
            }
            he.sort_unstable();
            he.dedup();
            if let Some(&max) = he.last() {
                if max as usize >= vertex_count {
                    return Err(Error::InvalidArgument(format!(
                        "hyperedge {idx} references vertex {max} but only {vertex_count} vertices exist"
                    )));
                }
            }
            normalised.push(he);
        }
        Ok(Hypergraph {
            vertex_count,
            hyperedges: normalised,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn hyperedge_count(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<VertexId>] {
        &self.hyperedges
    }

    /// Per-vertex list of incident hyperedge indices.
    pub fn incidence(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (idx, he) in self.hyperedges.iter().enumerate() {
            for &v in he {
                inc[v as usize].push(idx as u32);
            }
        }
        inc
    }
}

/// Parses the edge-list format: one hyperedge per line, whitespace-separated
/// ids, `#` comments, blank lines skipped. A `# vertices: N` comment fixes the
/// vertex count; otherwise it is the largest id plus one.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Hypergraph> {
    let mut hyperedges = Vec::new();
    let mut max_id: Option<VertexId> = None;
    let mut declared: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if let Some(rest) = trimmed.strip_prefix(VERTEX_COUNT_TAG) {
            let n = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad vertex count `{}`", rest.trim())))?;
            declared = Some(n);
            continue;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut he = Vec::new();
        for tok in trimmed.split_whitespace() {
            let id: VertexId = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("`{tok}` is not a vertex id")))?;
            max_id = Some(max_id.map_or(id, |m| m.max(id)));
            he.push(id);
        }
        hyperedges.push(he);
    }
    match (declared, max_id) {
        (Some(n), _) if n > 0 => Hypergraph::new(n, hyperedges),
        (_, Some(m)) => Hypergraph::new(m as usize + 1, hyperedges),
        _ => Err(Error::EmptyInput),
    }
}

const VERTEX_COUNT_TAG: &str = "# vertices:";

/// Imports the `-nverts.txt` / `-simplices.txt` pair of the Benson et al.
/// simplicial dataset format. Source ids are 1-based.
pub fn import_benson<A: BufRead, B: BufRead>(nverts: A, simplices: B) -> Result<Hypergraph> {
    let sizes = read_ints(nverts)?;
    let ids = read_ints(simplices)?;
    if sizes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let expected: usize = sizes.iter().map(|&(_, n)| n as usize).sum();
    if ids.len() < expected {
        return Err(Error::Truncated {
            expected,
            found: ids.len(),
        });
    }
    if ids.len() > expected {
        let (line, _) = ids[expected];
        return Err(Error::parse(
            line,
            format!(
                "simplices file has {} ids beyond the {expected} declared",
                ids.len() - expected
            ),
        ));
    }

    let mut hyperedges = Vec::with_capacity(sizes.len());
    let mut max_id = 0u64;
    let mut cursor = ids.iter();
    for &(line, n) in &sizes {
        if n == 0 {
            return Err(Error::parse(line, "hyperedge of size 0"));
        }
        let mut he = Vec::with_capacity(n as usize);
        for &(id_line, id) in cursor.by_ref().take(n as usize) {
            if id == 0 || id > u64::from(VertexId::MAX) {
                return Err(Error::parse(
                    id_line,
                    format!("vertex id {id} out of range (ids are 1-based)"),
                ));
            }
            max_id = max_id.max(id);
            he.push((id - 1) as VertexId);
        }
        hyperedges.push(he);
    }
    Hypergraph::new(max_id as usize, hyperedges)
}

fn read_ints<R: BufRead>(reader: R) -> Result<Vec<(usize, u64)>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        for tok in line.split_whitespace() {
            let v = tok.parse().map_err(|_| {
                Error::parse(lineno, format!("`{tok}` is not a non-negative integer"))
            })?;
            out.push((lineno, v));
        }
    }
    Ok(out)
}

/// Writes the canonical edge-list form: one line per hyperedge.
pub fn write_edge_list<W: Write>(hg: &Hypergraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{VERTEX_COUNT_TAG} {}", hg.vertex_count())?;
    let mut line = String::new();
    for he in &hg.hyperedges {
        line.clear();
        for (i, v) in he.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Undirected clique expansion. `w(u, v)` is the number of hyperedges that
/// contain both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(VertexId, u32)>>,
    edge_count: usize,
}

impl WeightedGraph {
    /// Builds a graph from undirected weighted edges. Parallel entries for the
    /// same pair are summed.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId, u32)]) -> Result<Self> {
        let mut adjacency: Vec<Vec<(VertexId, u32)>> = vec![Vec::new(); vertex_count];
        for &(a, b, w) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on {a}")));
            }
            if a as usize >= vertex_count || b as usize >= vertex_count {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a},{b}) out of range"
                )));
            }
            if w == 0 {
                return Err(Error::InvalidArgument(format!(
                    "edge ({a},{b}) has weight 0"
                )));
            }
            adjacency[a as usize].push((b, w));
            adjacency[b as usize].push((a, w));
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(v, _)| v);
            let mut merged: Vec<(VertexId, u32)> = Vec::with_capacity(list.len());
            for &(v, w) in list.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == v => last.1 += w,
                    _ => merged.push((v, w)),
                }
            }
            edge_count += merged.len();
            *list = merged;
        }
        Ok(WeightedGraph {
            adjacency,
            edge_count: edge_count / 2,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted `(neighbour, weight)` pairs of `v`.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, u32)] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn weight(&self, a: VertexId, b: VertexId) -> Option<u32> {
        let list = &self.adjacency[a as usize];
        list.binary_search_by_key(&b, |&(v, _)| v)
            .ok()
            .map(|i| list[i].1)
    }
}

/// Clique-expands `hg`. Size-1 hyperedges contribute no edges.
pub fn clique_expand(hg: &Hypergraph) -> WeightedGraph {
    let n = hg.vertex_count();
    let incidence = hg.incidence();
    let mut counts = vec![0u32; n];
    let mut touched: Vec<VertexId> = Vec::new();
    let mut adjacency = Vec::with_capacity(n);
    let mut directed = 0usize;

    for (u, hes) in incidence.iter().enumerate() {
        for &he in hes {
            for &v in &hg.hyperedges[he as usize] {
                if v as usize == u {
                    continue;
                }
                if counts[v as usize] == 0 {
                    touched.push(v);
                }
                counts[v as usize] += 1;
            }
        }
        touched.sort_unstable();
        let list: Vec<(VertexId, u32)> = touched
            .iter()
            .map(|&v| {
                let w = counts[v as usize];
                counts[v as usize] = 0;
                (v, w)
            })
            .collect();
        touched.clear();
        directed += list.len();
        adjacency.push(list);
    }

    WeightedGraph {
        adjacency,
        edge_count: directed / 2,
    }
}

/// Dataset summary in the shape of the usual hypergraph benchmark tables.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub vertex_count: usize,
    pub hyperedge_count: usize,
    pub edge_count: usize,
    /// `2|E| / |V|`.
    pub avg_degree: f64,
    /// `|HE| / |V|`, the AVGSize column of the published dataset table.
    pub avg_hyperedges_per_vertex: f64,
    /// Mean of `l / ln(l + 1)` over vertices; isolated vertices count as 0.
    pub theta_lstar: f64,
}

pub fn stats(hg: &Hypergraph, graph: &WeightedGraph) -> Result<GraphStats> {
    let n = graph.vertex_count();
    if n == 0 || hg.vertex_count() == 0 {
        return Err(Error::EmptyInput);
    }
    if hg.vertex_count() != n {
        return Err(Error::InvalidArgument(format!(
            "hypergraph has {} vertices but graph has {n}",
            hg.vertex_count()
        )));
    }
    let lstar_sum: f64 = (0..n as VertexId)
        .map(|v| {
            let l = build_layers(graph, v).layer_count();
            if l == 0 {
                0.0
            } else {
                l as f64 / (l as f64 + 1.0).ln()
            }
        })
        .sum();
    Ok(GraphStats {
        vertex_count: n,
        hyperedge_count: hg.hyperedge_count(),
        edge_count: graph.edge_count(),
        avg_degree: 2.0 * graph.edge_count() as f64 / n as f64,
        avg_hyperedges_per_vertex: hg.hyperedge_count() as f64 / n as f64,
        theta_lstar: lstar_sum / n as f64,
    })
}

pub const STATS_CSV_HEADER: &str = "dataset,vertices,hyperedges,edges,avg_deg,avg_size,theta_lstar";

impl GraphStats {
    pub fn csv_row(&self, dataset: &str) -> String {
        format!(
            "{dataset},{},{},{},{:.2},{:.2},{:.6}",
            self.vertex_count,
            self.hyperedge_count,
            self.edge_count,
            self.avg_degree,
            self.avg_hyperedges_per_vertex,
            self.theta_lstar
        )
    }
}
