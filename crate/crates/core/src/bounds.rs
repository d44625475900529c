//! Bound-driven RR-set doubling (HyperIM_BRR).
//!
//! RR sets are split by their root's layer profile into `R1` (roots whose
//! leading layers are small relative to their neighbourhood) and `R2`. Greedy
//! runs on `R1`, which also yields an upper bound on the optimal coverage;
//! `R2` yields a martingale lower bound on the chosen seeds. The collection
//! doubles until `lower / upper >= 1 - 1/e - eps` or the RR-count cap is hit.

use crate::error::{Error, Result};
use crate::greedy::{select_seeds, CoverageState, InfluenceBounds, RRCollection, SeedResult};
use crate::layering::{LayerProvider, LayeredNeighborhood};
use crate::sampler::{Model, RRSet, Sampler, SamplerCounters, SamplerKind};
use crate::VertexId;

#[derive(Debug, Clone, PartialEq)]
pub struct BrrConfig {
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Largest probability of a vertex entering an `R1` set. Defaults to the
    /// largest clamped member probability of the graph.
    pub p_max: Option<f64>,
    /// Initial RR count. Defaults to `ceil(theta_max · eps² · k / |V|)`.
    pub theta_0: Option<u64>,
    /// RR-count cap. Defaults to [`theta_max`].
    pub theta_max: Option<u64>,
}

impl BrrConfig {
    pub fn new(k: usize, epsilon: f64, delta: f64) -> Self {
        BrrConfig {
            k,
            epsilon,
            delta,
            p_max: None,
            theta_0: None,
            theta_max: None,
        }
    }

    /// Target approximation ratio `1 - 1/e - eps`.
    pub fn target_ratio(&self) -> f64 {
        1.0 - (-1.0f64).exp() - self.epsilon
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.k == 0 || self.k > n {
            return bad(format!("k must be in 1..={n}, got {}", self.k));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must be in (0,1), got {}", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must be in (0,1), got {}", self.delta));
        }
        let t = self.target_ratio();
        if !(t > 0.0 && t < 1.0) {
            return bad(format!("target ratio 1-1/e-eps = {t} is not in (0,1)"));
        }
        if let Some(p) = self.p_max {
            if !(p > 0.0 && p <= 1.0) {
                return bad(format!("p_max must be in (0,1], got {p}"));
            }
        }
        if self.theta_0 == Some(0) {
            return bad("theta_0 must be at least 1".into());
        }
        if let (Some(t0), Some(tm)) = (self.theta_0, self.theta_max) {
            if tm < t0 {
                return bad(format!("theta_max {tm} below theta_0 {t0}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Partition {
    pub r1: RRCollection,
    pub r2: RRCollection,
    /// `F_cnt / T_cnt`: share of neighbours sitting in first layers.
    pub alpha: f64,
    /// `L_cnt / |V|`: mean layer count.
    pub beta: f64,
}

/// `(first-layer size, degree, layer count)` of one neighbourhood.
pub fn division_counts(nb: &LayeredNeighborhood) -> (usize, usize, usize) {
    let first = nb.layers.first().map_or(0, |l| l.len());
    (first, nb.sample_size(), nb.layer_count())
}

/// `(alpha, beta)` over all vertices.
pub fn compute_division_stats<P: LayerProvider + ?Sized>(provider: &P) -> Result<(f64, f64)> {
    let n = provider.vertex_count();
    if n == 0 {
        return Err(Error::DegenerateGraph("graph has no vertices"));
    }
    let (mut f, mut t, mut l) = (0usize, 0usize, 0usize);
    for v in 0..n as VertexId {
        let (a, b, c) = division_counts(provider.neighborhood(v));
        f += a;
        t += b;
        l += c;
    }
    if t == 0 {
        return Err(Error::DegenerateGraph("graph has no edges"));
    }
    Ok((f as f64 / t as f64, l as f64 / n as f64))
}

/// Partition rule: the set rooted at `nb.root` goes to `R1` iff every
/// existing layer `i <= ceil(beta)` satisfies `n(L_i) < alpha · |A(root)|`.
/// A root without layers goes to `R2`.
pub fn belongs_to_r1(nb: &LayeredNeighborhood, alpha: f64, beta: f64) -> bool {
    let depth = (beta.ceil() as usize).max(1);
    let threshold = alpha * nb.sample_size() as f64;
    !nb.layers.is_empty()
        && nb
            .layers
            .iter()
            .take(depth)
            .all(|l| (l.len() as f64) < threshold)
}

pub fn partition_rr<P: LayerProvider + ?Sized>(
    sets: Vec<RRSet>,
    provider: &P,
    alpha: f64,
    beta: f64,
) -> Partition {
    let (r1, r2): (Vec<RRSet>, Vec<RRSet>) = sets
        .into_iter()
        .partition(|s| belongs_to_r1(provider.neighborhood(s.root), alpha, beta));
    let n = provider.vertex_count();
    Partition {
        r1: RRCollection::new(r1, n),
        r2: RRCollection::new(r2, n),
        alpha,
        beta,
    }
}

/// Min over the greedy prefixes `S_0 .. S_k` of
/// `Λ(S_i) + p_max · (sum of the k largest marginals w.r.t. S_i)`, tightened
/// by the greedy cap `Λ(S_k) / (1 - (1 - 1/(k p_max))^k)` when `k p_max >= 1`.
/// Coverage units.
pub fn upper_bound_coverage(r1: &RRCollection, k: usize, p_max: f64) -> f64 {
    assert!(p_max > 0.0, "p_max must be positive");
    assert!(k >= 1, "k must be at least 1");
    let n = r1.universe_size();
    let mut gains: Vec<usize> = (0..n as VertexId)
        .map(|v| r1.sets_containing(v).len())
        .collect();
    let mut state = CoverageState::new(r1);
    let mut scratch = Vec::with_capacity(n);
    let mut best = f64::INFINITY;

    for i in 0..=k {
        scratch.clear();
        scratch.extend_from_slice(&gains);
        let top = top_k_sum(&mut scratch, k);
        best = best.min(state.covered_count() as f64 + p_max * top as f64);
        if i == k {
            break;
        }
        // argmax, lowest id on ties
        let (v, g) = gains
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (v, &g)| if g > acc.1 { (v, g) } else { acc });
        if g == 0 {
            break;
        }
        for &s in r1.sets_containing(v as VertexId) {
            if !state.is_covered(s as usize) {
                for &u in &r1.sets()[s as usize].members {
                    gains[u as usize] -= 1;
                }
            }
        }
        state.cover(r1, v as VertexId);
    }

    let kp = k as f64 * p_max;
    if kp >= 1.0 {
        let denom = 1.0 - (1.0 - 1.0 / kp).powi(k as i32);
        best = best.min(state.covered_count() as f64 / denom);
    }
    best
}

fn top_k_sum(values: &mut [usize], k: usize) -> usize {
    if values.len() > k {
        let pivot = values.len() - k;
        values.select_nth_unstable(pivot);
        values[pivot..].iter().sum()
    } else {
        values.iter().sum()
    }
}

/// Upper bound in influence units (`coverage · |V| / |R1|`).
pub fn upper_bound(r1: &RRCollection, k: usize, p_max: f64) -> f64 {
    assert!(!r1.is_empty(), "upper bound needs a non-empty R1");
    upper_bound_coverage(r1, k, p_max) * r1.universe_size() as f64 / r1.len() as f64
}

/// Martingale lower bound from a coverage count, floored at 0.
pub fn lower_bound_from_coverage(coverage: usize, delta: f64, n: usize, r2_len: usize) -> f64 {
    let log_term = (1.0 / delta).ln();
    let a = (coverage as f64 + 2.0 * log_term / 9.0).sqrt();
    let b = (log_term / 2.0).sqrt();
    if a <= b {
        return 0.0;
    }
    let value = ((a - b).powi(2) - log_term / 18.0) * n as f64 / r2_len as f64;
    value.max(0.0)
}

/// Lower bound on the influence of `seeds` estimated from `R2`.
pub fn lower_bound(r2: &RRCollection, seeds: &[VertexId], delta: f64) -> f64 {
    assert!(!r2.is_empty(), "lower bound needs a non-empty R2");
    lower_bound_from_coverage(r2.coverage(seeds), delta, r2.universe_size(), r2.len())
}

/// `ln C(n, k)` as a sum of logs.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// `ceil(2n (sqrt(ln(2/eps)) + sqrt(ln C(n,k) + ln(6/eps)))² / (eps² k))`.
pub fn theta_max(n: usize, k: usize, epsilon: f64) -> u64 {
    assert!(n >= k && k >= 1, "need n >= k >= 1");
    assert!(epsilon > 0.0 && epsilon < 1.0);
    let root = (2.0 / epsilon).ln().sqrt() + (ln_binomial(n, k) + (6.0 / epsilon).ln()).sqrt();
    (2.0 * n as f64 * root * root / (epsilon * epsilon * k as f64)).ceil() as u64
}

/// `ceil(theta_max · eps² · k / n)`, at least 1.
pub fn initial_theta(theta_max: u64, n: usize, k: usize, epsilon: f64) -> u64 {
    ((theta_max as f64 * epsilon * epsilon * k as f64 / n as f64).ceil() as u64).max(1)
}

/// `ceil(log2(theta_max / theta_0))`, at least 1.
pub fn doubling_cap(theta_0: u64, theta_max: u64) -> usize {
    ((theta_max as f64 / theta_0 as f64).log2().ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrrIteration {
    pub iter: usize,
    pub theta: usize,
    /// Coverage of the greedy seeds on `R1`.
    pub coverage: usize,
    pub lower: f64,
    pub upper: f64,
    pub ratio: f64,
    pub stopped: bool,
}

pub const BRR_CSV_HEADER: &str = "iter,theta,coverage,lower,upper,ratio,stopped";

impl BrrIteration {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{}",
            self.iter, self.theta, self.coverage, self.lower, self.upper, self.ratio, self.stopped
        )
    }
}

#[derive(Debug, Clone)]
pub struct BrrRun {
    /// Seeds with coverage over `R1 ∪ R2` and the final bounds.
    pub result: SeedResult,
    pub log: Vec<BrrIteration>,
    /// The partition the returned seeds were computed on.
    pub partition: Partition,
    pub stopped_by_ratio: bool,
    pub theta_0: u64,
    pub theta_max: u64,
    pub p_max: f64,
    pub counters: SamplerCounters,
}

/// Runs the doubling loop with the stratified sampler.
pub fn run_brr<P: LayerProvider + ?Sized>(
    provider: &P,
    config: &BrrConfig,
    master_seed: u64,
    model: Model,
) -> Result<BrrRun> {
    run_brr_with(
        provider,
        config,
        master_seed,
        &Sampler::new(SamplerKind::Stratified, model),
    )
}

pub fn run_brr_with<P: LayerProvider + ?Sized>(
    provider: &P,
    config: &BrrConfig,
    master_seed: u64,
    sampler: &Sampler,
) -> Result<BrrRun> {
    let n = provider.vertex_count();
    config.validate(n)?;
    let k = config.k;
    let (alpha, beta) = compute_division_stats(provider)?;
    let theta_max = config
        .theta_max
        .unwrap_or_else(|| theta_max(n, k, config.epsilon));
    let theta_0 = config
        .theta_0
        .unwrap_or_else(|| initial_theta(theta_max, n, k, config.epsilon))
        .min(theta_max);
    let rounds = doubling_cap(theta_0, theta_max);
    let delta_i = config.delta / rounds as f64;
    let p_max = config.p_max.unwrap_or_else(|| max_member_prob(provider));
    let target = config.target_ratio();

    let mut r1 = RRCollection::new(Vec::new(), n);
    let mut r2 = RRCollection::new(Vec::new(), n);
    let mut generated = 0u64;
    let mut counters = SamplerCounters::default();
    let mut log = Vec::with_capacity(rounds);

    for iter in 1..=rounds {
        let want = theta_0
            .saturating_mul(1u64 << (iter - 1).min(62))
            .min(theta_max);
        let (fresh, c) = sampler.generate_sets(provider, master_seed, generated..want);
        counters += c;
        generated = want;
        let (a, b): (Vec<RRSet>, Vec<RRSet>) = fresh
            .into_iter()
            .partition(|s| belongs_to_r1(provider.neighborhood(s.root), alpha, beta));
        r1.extend(a);
        r2.extend(b);

        let split;
        let (g1, g2) = if r1.is_empty() || r2.is_empty() {
            split = even_split(&r1, &r2);
            (&split.0, &split.1)
        } else {
            (&r1, &r2)
        };

        let greedy = select_seeds(g1, k)?;
        let upper = upper_bound(g1, k, p_max);
        let lower = lower_bound(g2, &greedy.seeds, delta_i);
        let ratio = if upper > 0.0 { lower / upper } else { 0.0 };
        let stopped = ratio >= target;
        log.push(BrrIteration {
            iter,
            theta: generated as usize,
            coverage: greedy.coverage,
            lower,
            upper,
            ratio,
            stopped,
        });

        if stopped || iter == rounds {
            let mut result = seeds_over(&[g1, g2], greedy.seeds);
            result.iterations = iter;
            result.bounds = Some(InfluenceBounds {
                lower,
                upper,
                ratio,
            });
            let partition = Partition {
                r1: g1.clone(),
                r2: g2.clone(),
                alpha,
                beta,
            };
            return Ok(BrrRun {
                result,
                log,
                partition,
                stopped_by_ratio: stopped,
                theta_0,
                theta_max,
                p_max,
                counters,
            });
        }
    }
    unreachable!("doubling loop returns on its last round")
}

fn max_member_prob<P: LayerProvider + ?Sized>(provider: &P) -> f64 {
    (0..provider.vertex_count() as VertexId)
        .flat_map(|v| {
            provider
                .neighborhood(v)
                .layers
                .iter()
                .map(|l| l.member_prob)
        })
        .fold(0.0, f64::max)
}

/// Alternating split of every set, used when the layer rule leaves a group
/// empty.
fn even_split(r1: &RRCollection, r2: &RRCollection) -> (RRCollection, RRCollection) {
    let n = r1.universe_size();
    let all = || r1.sets().iter().chain(r2.sets());
    let even = all().step_by(2).cloned().collect();
    let odd = all().skip(1).step_by(2).cloned().collect();
    (RRCollection::new(even, n), RRCollection::new(odd, n))
}

fn seeds_over(parts: &[&RRCollection], seeds: Vec<VertexId>) -> SeedResult {
    let per: Vec<SeedResult> = parts
        .iter()
        .map(|c| SeedResult::for_seeds(c, seeds.clone()))
        .collect();
    let total: usize = parts.iter().map(|c| c.len()).sum();
    let n = parts[0].universe_size();
    let sum_at = |f: &dyn Fn(&SeedResult) -> &Vec<usize>, i: usize| {
        per.iter().map(|r| f(r)[i]).sum::<usize>()
    };
    let marginals = (0..seeds.len())
        .map(|i| sum_at(&|r| &r.marginals, i))
        .collect();
    let trace: Vec<usize> = (0..seeds.len())
        .map(|i| sum_at(&|r| &r.coverage_trace, i))
        .collect();
    let coverage = per.iter().map(|r| r.coverage).sum();
    SeedResult {
        seeds,
        marginals,
        coverage,
        coverage_trace: trace,
        influence_estimate: n as f64 * coverage as f64 / total as f64,
        rr_count: total,
        universe_size: n,
        iterations: 0,
        bounds: None,
    }
}
