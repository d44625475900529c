//! Subcommands of the `hyperim` binary.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperim::bounds::{theta_max, BRR_CSV_HEADER};
use hyperim::cascade::{estimate_spread, CascadeConfig, ForwardTable, EVALUATE_CSV_HEADER};
use hyperim::greedy::{seed_csv_rows, SEEDS_CSV_HEADER};
use hyperim::hypergraph::{
    clique_expand, import_benson, load_edge_list, stats, write_edge_list, STATS_CSV_HEADER,
};
use hyperim::layering::write_layer_csv;
use hyperim::pipeline::{run_seeds, Algorithm, SeedParams};
use hyperim::sampler::{generate_collection, Model, Sampler, SamplerCounters};
use hyperim::{Hypergraph, LayerCache, UniformLayers, VertexId, WeightedGraph};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(hyperim::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<hyperim::Error> for CliError {
    fn from(e: hyperim::Error) -> Self {
        match e {
            hyperim::Error::InvalidArgument(m) => CliError::Usage(m),
            hyperim::Error::Invariant(m) => CliError::Internal(m),
            other => CliError::Data(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hyperim",
    version,
    about = "Influence maximization on hypergraphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite an input hypergraph as a canonical edge list.
    Convert(ConvertArgs),
    /// Dataset statistics.
    Stats(StatsArgs),
    /// Generate RR sets and report sampler counters.
    GenRr(GenRrArgs),
    /// Select seeds.
    Seeds(SeedsArgs),
    /// Monte-Carlo spread of a seed set.
    Evaluate(EvaluateArgs),
    /// Compare algorithms over a k sweep.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    EdgeList,
    Benson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ic,
    Lt,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ic => Model::Ic,
            ModelArg::Lt => Model::Lt,
        }
    }
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Edge-list file, or for `benson` either a dataset prefix or the
    /// nverts and simplices files in that order.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::EdgeList)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Ic)]
    pub model: ModelArg,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Defaults to 1/|V|.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fixed RR count (RR cap for hyperim-brr).
    #[arg(long)]
    pub theta: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Also write every vertex's layers to this CSV.
    #[arg(long)]
    pub dump_layers: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenRrArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, value_parser = parse_algo, default_value = "hyperim")]
    pub algo: Vec<Algorithm>,
    /// Seed-set size used for the default RR count when --theta is absent.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub k: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SeedsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, value_parser = parse_algo, default_value = "hyperim")]
    pub algo: Algorithm,
    #[arg(long)]
    pub k: usize,
    /// Round log of hyperim-brr. Defaults to `<output>.iterations.csv`, or
    /// standard error when writing seeds to standard output.
    #[arg(long)]
    pub iterations: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
    /// Comma-separated seed vertices.
    #[arg(long, value_delimiter = ',', conflicts_with = "seeds_csv")]
    pub vertices: Vec<VertexId>,
    /// Seeds CSV written by `seeds`.
    #[arg(long)]
    pub seeds_csv: Option<PathBuf>,
    /// Evaluate the first k seeds, for each listed k.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, value_parser = parse_algo, required = true)]
    pub algo: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub runs: usize,
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: hyperim::Error| e.to_string())
}

pub const GEN_RR_CSV_HEADER: &str =
    "algo,theta,total_members,size_draws,selection_draws,bernoulli_draws,geometric_draws,wall_ms";

pub const BENCH_CSV_HEADER: &str = "algo,k,rr_count,mean_spread,stderr,size_draws,selection_draws,bernoulli_draws,geometric_draws,sampling_ops,wall_ms";

/// Runs a parsed command inside a pool of `cli.workers` threads.
pub fn run(cli: Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers as usize)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Convert(a) => convert(a),
        Command::Stats(a) => cmd_stats(a),
        Command::GenRr(a) => gen_rr(a),
        Command::Seeds(a) => seeds(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Bench(a) => bench(a),
    })
}

pub fn load_input(args: &InputArgs) -> CliResult<Hypergraph> {
    match (args.format, args.input.as_slice()) {
        (Format::EdgeList, [path]) => Ok(load_edge_list(open(path)?)?),
        (Format::EdgeList, _) => Err(CliError::Usage(
            "edge-list input takes exactly one --input".into(),
        )),
        (Format::Benson, [prefix]) => {
            let with = |suffix: &str| PathBuf::from(format!("{}-{suffix}.txt", prefix.display()));
            Ok(import_benson(
                open(&with("nverts"))?,
                open(&with("simplices"))?,
            )?)
        }
        (Format::Benson, [nverts, simplices]) => {
            Ok(import_benson(open(nverts)?, open(simplices)?)?)
        }
        (Format::Benson, _) => Err(CliError::Usage(
            "benson input takes a prefix or two files".into(),
        )),
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| hyperim::Error::io(path, e).into())
}

fn create(path: &Path) -> CliResult<Box<dyn Write>> {
    let f = File::create(path).map_err(|e| hyperim::Error::io(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

fn sink(out: &OutputArgs) -> CliResult<Box<dyn Write>> {
    match &out.output {
        Some(p) => create(p),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_io(r: io::Result<()>, what: &Option<PathBuf>) -> CliResult<()> {
    r.map_err(|e| match what {
        Some(p) => hyperim::Error::io(p, e).into(),
        None => hyperim::Error::io("<stdout>", e).into(),
    })
}

fn dataset_name(args: &InputArgs) -> String {
    let p = &args.input[0];
    let name = p.file_name().map_or_else(
        || p.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    match args.format {
        Format::Benson if args.input.len() == 2 => name.trim_end_matches("-nverts.txt").to_string(),
        _ => name.trim_end_matches(".txt").to_string(),
    }
}

fn convert(a: ConvertArgs) -> CliResult<()> {
    let hg = load_input(&a.input)?;
    let mut out = sink(&a.output)?;
    write_io(
        write_edge_list(&hg, &mut out).and_then(|_| out.flush()),
        &a.output.output,
    )
}

fn cmd_stats(a: StatsArgs) -> CliResult<()> {
    let hg = load_input(&a.input)?;
    let g = clique_expand(&hg);
    let st = stats(&hg, &g)?;
    let mut out = sink(&a.output)?;
    let row = st.csv_row(&dataset_name(&a.input));
    write_io(
        writeln!(out, "{STATS_CSV_HEADER}\n{row}").and_then(|_| out.flush()),
        &a.output.output,
    )?;
    if let Some(path) = &a.dump_layers {
        let cache = LayerCache::new(&g);
        let mut f = create(path)?;
        let r = write_layer_csv(&cache, 0..g.vertex_count() as VertexId, &mut f)
            .and_then(|_| f.flush());
        write_io(r, &a.dump_layers)?;
    }
    Ok(())
}

fn default_delta(sel: &SelectionArgs, n: usize) -> f64 {
    sel.delta.unwrap_or(1.0 / n as f64)
}

fn check_k(k: usize, n: usize) -> CliResult<()> {
    if k == 0 || k > n {
        return Err(CliError::Usage(format!("k must be in 1..={n}, got {k}")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> CliResult<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!(
            "epsilon must be in (0,1), got {eps}"
        )));
    }
    Ok(())
}

fn gen_rr(a: GenRrArgs) -> CliResult<()> {
    let hg = load_input(&a.input)?;
    let g = clique_expand(&hg);
    let n = g.vertex_count();
    let theta = match a.selection.theta {
        Some(0) => return Err(CliError::Usage("theta must be at least 1".into())),
        Some(t) => t,
        None => {
            check_k(a.k[0], n)?;
            check_epsilon(a.selection.epsilon)?;
            theta_max(n, a.k[0], a.selection.epsilon)
        }
    };
    let mut rows = Vec::new();
    for algo in &a.algo {
        let sampler = Sampler::new(algo.sampler_kind(), a.model.model.into());
        let start = Instant::now();
        let (col, c) = match algo {
            Algorithm::Subsim => {
                generate_collection(&UniformLayers::new(&g), theta, &sampler, a.model.seed)
            }
            _ => generate_collection(&LayerCache::new(&g), theta, &sampler, a.model.seed),
        };
        let ms = start.elapsed().as_millis();
        rows.push(format!(
            "{algo},{theta},{},{},{},{},{},{ms}",
            col.total_members(),
            c.size_draws,
            c.selection_draws,
            c.bernoulli_draws,
            c.geometric_draws
        ));
    }
    write_rows(&a.output, GEN_RR_CSV_HEADER, &rows)
}

fn write_rows(out: &OutputArgs, header: &str, rows: &[String]) -> CliResult<()> {
    let mut w = sink(out)?;
    let r = (|| {
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{row}")?;
        }
        w.flush()
    })();
    write_io(r, &out.output)
}

fn params(g: &WeightedGraph, k: usize, sel: &SelectionArgs, m: &ModelArgs) -> SeedParams {
    SeedParams {
        k,
        epsilon: sel.epsilon,
        delta: default_delta(sel, g.vertex_count()),
        model: m.model.into(),
        seed: m.seed,
        theta: sel.theta,
    }
}

fn seeds(a: SeedsArgs) -> CliResult<()> {
    let hg = load_input(&a.input)?;
    let g = clique_expand(&hg);
    check_k(a.k, g.vertex_count())?;
    check_epsilon(a.selection.epsilon)?;
    let run = run_seeds(&g, a.algo, &params(&g, a.k, &a.selection, &a.model))?;
    write_rows(&a.output, SEEDS_CSV_HEADER, &seed_csv_rows(&run.result))?;

    if a.algo == Algorithm::HyperImBrr {
        let rows: Vec<String> = run.iterations.iter().map(|it| it.csv_row()).collect();
        let target = a.iterations.clone().or_else(|| {
            a.output
                .output
                .as_ref()
                .map(|p| PathBuf::from(format!("{}.iterations.csv", p.display())))
        });
        match target {
            Some(path) => write_rows(&OutputArgs { output: Some(path) }, BRR_CSV_HEADER, &rows)?,
            None => {
                let mut e = io::stderr().lock();
                let r = (|| {
                    writeln!(e, "{BRR_CSV_HEADER}")?;
                    rows.iter().try_for_each(|row| writeln!(e, "{row}"))
                })();
                write_io(r, &None)?;
            }
        }
    }
    Ok(())
}

/// Reads the `vertex` column of a seeds CSV, in rank order.
pub fn read_seed_column(path: &Path) -> CliResult<Vec<VertexId>> {
    let mut lines = open(path)?.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| hyperim::Error::io(path, e))?,
        None => return Err(hyperim::Error::EmptyInput.into()),
    };
    let col = header
        .split(',')
        .position(|c| c.trim() == "vertex")
        .ok_or_else(|| {
            CliError::Data(hyperim::Error::Parse {
                line: 1,
                message: "no `vertex` column".into(),
            })
        })?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| hyperim::Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(col).unwrap_or("");
        let v = field.trim().parse().map_err(|_| {
            CliError::Data(hyperim::Error::Parse {
                line: i + 2,
                message: format!("`{field}` is not a vertex id"),
            })
        })?;
        out.push(v);
    }
    Ok(out)
}

fn evaluate(a: EvaluateArgs) -> CliResult<()> {
    let hg = load_input(&a.input)?;
    let g = clique_expand(&hg);
    let seeds = match &a.seeds_csv {
        Some(p) => read_seed_column(p)?,
        None => a.vertices.clone(),
    };
    if seeds.is_empty() {
        return Err(CliError::Usage(
            "no seeds given (use --vertices or --seeds-csv)".into(),
        ));
    }
    let ks = if a.k.is_empty() {
        vec![seeds.len()]
    } else {
        a.k.clone()
    };
    let table = ForwardTable::new(&LayerCache::new(&g));
    let model: Model = a.model.model.into();
    let mut rows = Vec::new();
    for k in ks {
        if k == 0 || k > seeds.len() {
            return Err(CliError::Usage(format!(
                "k = {k} outside 1..={}",
                seeds.len()
            )));
        }
        let cfg = CascadeConfig {
            model,
            runs: a.runs,
            seed: a.model.seed,
        };
        let start = Instant::now();
        let est = estimate_spread(&table, &seeds[..k], &cfg)?;
        let ms = start.elapsed().as_millis();
        rows.push(format!(
            "{},{k},{},{:.6},{:.6},{ms}",
            model_name(model),
            est.runs,
            est.mean,
            est.stderr
        ));
    }
    write_rows(&a.output, EVALUATE_CSV_HEADER, &rows)
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Ic => "ic",
        Model::Lt => "lt",
    }
}

fn bench(a: BenchArgs) -> CliResult<()> {
    if a.algo.len() < 2 {
        return Err(CliError::Usage(
            "bench needs at least two --algo values".into(),
        ));
    }
    let hg = load_input(&a.input)?;
    let g = clique_expand(&hg);
    check_epsilon(a.selection.epsilon)?;
    for &k in &a.k {
        check_k(k, g.vertex_count())?;
    }
    let table = ForwardTable::new(&LayerCache::new(&g));
    let model: Model = a.model.model.into();
    let mut rows = Vec::new();
    for &algo in &a.algo {
        for &k in &a.k {
            let start = Instant::now();
            let run = run_seeds(&g, algo, &params(&g, k, &a.selection, &a.model))?;
            let ms = start.elapsed().as_millis();
            let cfg = CascadeConfig {
                model,
                runs: a.runs,
                seed: a.model.seed,
            };
            let est = estimate_spread(&table, &run.result.seeds, &cfg)?;
            rows.push(bench_row(
                algo,
                k,
                run.result.rr_count,
                est.mean,
                est.stderr,
                &run.counters,
                ms,
            ));
        }
    }
    write_rows(&a.output, BENCH_CSV_HEADER, &rows)
}

fn bench_row(
    algo: Algorithm,
    k: usize,
    rr: usize,
    mean: f64,
    se: f64,
    c: &SamplerCounters,
    ms: u128,
) -> String {
    format!(
        "{algo},{k},{rr},{mean:.6},{se:.6},{},{},{},{},{},{ms}",
        c.size_draws,
        c.selection_draws,
        c.bernoulli_draws,
        c.geometric_draws,
        c.sampling_ops()
    )
}
