//! Forward Monte-Carlo IC and LT cascades.
//!
//! The probability that an active `v` activates `u` is `v`'s member
//! probability inside `u`'s layered neighbourhood, the same number the RR
//! samplers use when expanding `u`. This keeps forward spreads and RR
//! coverage estimates of the same quantity.

use rand::Rng;
use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::layering::LayerProvider;
use crate::rng::{stream, DOMAIN_CASCADE};
use crate::sampler::Model;
use crate::VertexId;

/// Out-going activation probabilities in CSR form: `targets(v)` lists every
/// `(u, p(v -> u))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTable {
    offsets: Vec<usize>,
    edges: Vec<(VertexId, f64)>,
}

impl ForwardTable {
    pub fn new<P: LayerProvider + ?Sized>(provider: &P) -> Self {
        let n = provider.vertex_count();
        let mut counts = vec![0usize; n + 1];
        for u in 0..n as VertexId {
            for layer in &provider.neighborhood(u).layers {
                for &v in &layer.members {
                    counts[v as usize + 1] += 1;
                }
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut edges = vec![(0, 0.0); offsets[n]];
        for u in 0..n as VertexId {
            for layer in &provider.neighborhood(u).layers {
                for &v in &layer.members {
                    edges[fill[v as usize]] = (u, layer.member_prob);
                    fill[v as usize] += 1;
                }
            }
        }
        ForwardTable { offsets, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn targets(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.edges[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    /// `p(v -> u)`, or 0 if `u` is not a neighbour of `v`.
    pub fn probability(&self, v: VertexId, u: VertexId) -> f64 {
        self.targets(v)
            .iter()
            .find(|e| e.0 == u)
            .map_or(0.0, |e| e.1)
    }
}

/// Per-worker scratch space reused across runs.
pub struct CascadeWorkspace {
    active: Vec<u32>,
    touched: Vec<u32>,
    acc: Vec<f64>,
    threshold: Vec<f64>,
    epoch: u32,
    frontier: Vec<VertexId>,
}

impl CascadeWorkspace {
    pub fn new(n: usize) -> Self {
        CascadeWorkspace {
            active: vec![0; n],
            touched: vec![0; n],
            acc: vec![0.0; n],
            threshold: vec![0.0; n],
            epoch: 0,
            frontier: Vec::new(),
        }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.active.iter_mut().for_each(|m| *m = 0);
            self.touched.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.frontier.clear();
    }

    fn activate(&mut self, v: VertexId) -> bool {
        let slot = &mut self.active[v as usize];
        if *slot == self.epoch {
            false
        } else {
            *slot = self.epoch;
            self.frontier.push(v);
            true
        }
    }

    fn is_active(&self, v: VertexId) -> bool {
        self.active[v as usize] == self.epoch
    }

    fn seed(&mut self, table: &ForwardTable, seeds: &[VertexId]) {
        assert!(!seeds.is_empty(), "seed set is empty");
        self.reset();
        for &s in seeds {
            assert!((s as usize) < table.vertex_count(), "seed {s} out of range");
            self.activate(s);
        }
    }
}

/// One IC run: each newly active vertex tries each inactive neighbour once.
/// Returns the number of active vertices at the fixpoint.
pub fn simulate_ic<R: Rng + ?Sized>(
    table: &ForwardTable,
    seeds: &[VertexId],
    rng: &mut R,
    ws: &mut CascadeWorkspace,
) -> usize {
    ws.seed(table, seeds);
    let mut head = 0;
    while head < ws.frontier.len() {
        let v = ws.frontier[head];
        head += 1;
        for &(u, p) in table.targets(v) {
            if !ws.is_active(u) && rng.random::<f64>() < p {
                ws.activate(u);
            }
        }
    }
    ws.frontier.len()
}

/// One LT run with `Uniform[0,1)` thresholds drawn the first time a vertex
/// receives influence.
pub fn simulate_lt<R: Rng + ?Sized>(
    table: &ForwardTable,
    seeds: &[VertexId],
    rng: &mut R,
    ws: &mut CascadeWorkspace,
) -> usize {
    run_lt(table, seeds, ws, |_| rng.random::<f64>())
}

/// LT run with fixed thresholds `thresholds[u]`.
pub fn simulate_lt_with_thresholds(
    table: &ForwardTable,
    seeds: &[VertexId],
    thresholds: &[f64],
    ws: &mut CascadeWorkspace,
) -> usize {
    assert_eq!(thresholds.len(), table.vertex_count());
    run_lt(table, seeds, ws, |u| thresholds[u as usize])
}

fn run_lt(
    table: &ForwardTable,
    seeds: &[VertexId],
    ws: &mut CascadeWorkspace,
    mut threshold_of: impl FnMut(VertexId) -> f64,
) -> usize {
    ws.seed(table, seeds);
    let mut head = 0;
    while head < ws.frontier.len() {
        let v = ws.frontier[head];
        head += 1;
        for &(u, p) in table.targets(v) {
            if ws.is_active(u) {
                continue;
            }
            let i = u as usize;
            if ws.touched[i] != ws.epoch {
                ws.touched[i] = ws.epoch;
                ws.acc[i] = 0.0;
                ws.threshold[i] = threshold_of(u);
            }
            ws.acc[i] += p;
            if ws.acc[i] >= ws.threshold[i] {
                ws.activate(u);
            }
        }
    }
    ws.frontier.len()
}

/// Rng whose every output is zero, so each uniform draw is 0. Every IC
/// attempt with positive probability succeeds.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroRng;

impl RngCore for ZeroRng {
    fn next_u32(&mut self) -> u32 {
        0
    }
    fn next_u64(&mut self) -> u64 {
        0
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        dst.fill(0);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeConfig {
    pub model: Model,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(runs)`; 0 for a single run.
    pub stderr: f64,
    pub runs: usize,
}

/// Mean spread over `config.runs` independent runs. Run `r` uses stream `r`
/// of the master seed, so the result is independent of the worker count.
pub fn estimate_spread(
    table: &ForwardTable,
    seeds: &[VertexId],
    config: &CascadeConfig,
) -> Result<SpreadEstimate> {
    let n = table.vertex_count();
    if config.runs == 0 {
        return Err(Error::InvalidArgument("runs must be at least 1".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("seed set is empty".into()));
    }
    if let Some(&bad) = seeds.iter().find(|&&s| s as usize >= n) {
        return Err(Error::InvalidArgument(format!(
            "seed {bad} out of range for {n} vertices"
        )));
    }
    let spreads: Vec<usize> = (0..config.runs as u64)
        .into_par_iter()
        .map_init(
            || CascadeWorkspace::new(n),
            |ws, r| {
                let mut rng = stream(config.seed, DOMAIN_CASCADE, r);
                match config.model {
                    Model::Ic => simulate_ic(table, seeds, &mut rng, ws),
                    Model::Lt => simulate_lt(table, seeds, &mut rng, ws),
                }
            },
        )
        .collect();
    Ok(summarize(&spreads))
}

fn summarize(spreads: &[usize]) -> SpreadEstimate {
    let runs = spreads.len();
    let mean = spreads.iter().sum::<usize>() as f64 / runs as f64;
    let stderr = if runs > 1 {
        let ss: f64 = spreads.iter().map(|&x| (x as f64 - mean).powi(2)).sum();
        (ss / (runs - 1) as f64).sqrt() / (runs as f64).sqrt()
    } else {
        0.0
    };
    SpreadEstimate { mean, stderr, runs }
}

pub const EVALUATE_CSV_HEADER: &str = "model,k,runs,mean_spread,stderr,wall_ms";
