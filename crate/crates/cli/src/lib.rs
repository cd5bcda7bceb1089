//! Command-line front end for `qtcs-core`.
//!
//! Each subcommand writes to caller-supplied sinks so tests can drive
//! [`run`] without spawning a process.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use qtcs_core::synthetic::SyntheticSpec;
use qtcs_core::tppr::compute_tppr_multi_with;
use qtcs_core::{
    als_with, brute_force_qtcs, egr_with, load_edge_stream, qtcs_baseline, ApproxResult,
    CommunityResult, Error, LoadWarnings, MetricReport, QueryContext, TemporalGraph,
    TransitionModel, VertexId, DEFAULT_ALPHA,
};

pub mod bench;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LABEL: i32 = 3;
pub const EXIT_ALGORITHM: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qtcs",
    version,
    about = "Query-centred temporal community search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find the community of one or more query vertices.
    Query(QueryArgs),
    /// Run algorithms over sampled query vertices and emit CSV.
    Bench(bench::BenchArgs),
    /// Write a seeded synthetic edge stream.
    Gen(GenArgs),
    /// Summarise an edge-stream file.
    Stats(StatsArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Egr,
    Als,
    Baseline,
    Brute,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Query vertex label; repeat for a multi-vertex query.
    #[arg(long = "q", visible_alias = "query", required = true, num_args = 1..)]
    pub queries: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long = "alg", visible_alias = "algorithm", value_enum, default_value_t = AlgorithmArg::Egr)]
    pub algorithm: AlgorithmArg,
    /// Core order for the baseline.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "avg-deg")]
    pub avg_deg: f64,
    #[arg(long, default_value_t = 1)]
    pub tpe: usize,
    #[arg(long, default_value_t = 100)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownLabel(_) => EXIT_LABEL,
        Error::NoCore { .. } | Error::QueriesDisconnected | Error::NoQueryActivity(_) => {
            EXIT_ALGORITHM
        }
        Error::NotConverged { .. } | Error::TooLarge { .. } | Error::QueryNotInSet(_) => {
            EXIT_ALGORITHM
        }
        Error::MalformedLine { .. }
        | Error::EmptyGraph
        | Error::InvalidParameter(_)
        | Error::Io(_) => EXIT_INPUT,
    }
}

/// Runs a parsed command, returning the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let json_errors = match &cli.command {
        Command::Query(a) => a.json || a.format == Format::Json,
        Command::Stats(a) => a.json,
        _ => false,
    };
    let result = match cli.command {
        Command::Query(a) => run_query(&a, out),
        Command::Bench(a) => bench::run_bench(&a, out, err),
        Command::Gen(a) => run_gen(&a, out),
        Command::Stats(a) => run_stats(&a, out),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error [{}]: {}", f.error.name(), f.error);
            if json_errors {
                let body = serde_json::json!({
                    "error": { "kind": f.error.name(), "message": f.error.to_string(), "code": f.code }
                });
                let _ = writeln!(out, "{body}");
            }
            f.code
        }
    }
}

pub fn load_graph(path: &Path) -> Result<(TemporalGraph, LoadWarnings), Error> {
    let file = File::open(path)?;
    load_edge_stream(BufReader::new(file))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), Error> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )))
    }
}

pub(crate) fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn labels(g: &TemporalGraph, set: &[VertexId]) -> Vec<String> {
    let mut out: Vec<String> = set.iter().map(|&v| g.label(v).to_string()).collect();
    out.sort();
    out
}

#[derive(Serialize, Debug)]
pub struct MetricsJson {
    pub td: f64,
    pub tc: f64,
    pub md: f64,
    pub size: usize,
    pub ts: usize,
}

#[derive(Serialize, Debug)]
pub struct TimingsJson {
    pub load_ms: f64,
    pub tppr_ms: f64,
    pub search_ms: f64,
    pub metrics_ms: f64,
}

/// JSON body of a successful `query`. `epsilon` is `null` when nothing was
/// certified; `beta_lower`, `epsilon` and `fallback` are `null` outside als.
#[derive(Serialize, Debug)]
pub struct QueryResponse {
    pub algorithm: &'static str,
    pub query: Vec<String>,
    pub alpha: f64,
    pub community: Vec<String>,
    pub size: usize,
    pub beta: f64,
    pub beta_lower: Option<f64>,
    pub epsilon: Option<f64>,
    pub fallback: Option<bool>,
    pub metrics: MetricsJson,
    pub timings: TimingsJson,
}

enum Outcome {
    Exact(CommunityResult),
    Approx(ApproxResult),
}

pub fn execute_query(args: &QueryArgs) -> Result<QueryResponse, Error> {
    check_alpha(args.alpha)?;
    match (args.algorithm, args.k) {
        (AlgorithmArg::Baseline, None) => {
            return Err(Error::InvalidParameter("baseline needs --k".into()))
        }
        (AlgorithmArg::Baseline, Some(_)) | (_, None) => {}
        (_, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--k applies to baseline only".into(),
            ))
        }
    }

    let start = Instant::now();
    let (g, _) = load_graph(&args.graph)?;
    let load = start.elapsed();

    let ids = args
        .queries
        .iter()
        .map(|l| g.resolve(l))
        .collect::<Result<Vec<_>, _>>()?;
    let ctx = QueryContext::new(ids, args.alpha)?;
    let model = TransitionModel::new(&g);

    let outcome = match args.algorithm {
        AlgorithmArg::Egr => Outcome::Exact(egr_with(&model, &ctx)?),
        AlgorithmArg::Als => Outcome::Approx(als_with(&model, &ctx)?),
        AlgorithmArg::Baseline => Outcome::Exact(qtcs_baseline(&g, &ctx, args.k.unwrap_or(0))?),
        AlgorithmArg::Brute => Outcome::Exact(brute_force_qtcs(&g, &ctx)?),
    };

    let metrics_start = Instant::now();
    let tppr = compute_tppr_multi_with(&model, &ctx)?;
    let (community, tppr_time, search_time) = match &outcome {
        Outcome::Exact(r) => (&r.community, r.timings.tppr, r.timings.search),
        Outcome::Approx(r) => (&r.community, r.expand_time, r.reduce_time),
    };
    let report = MetricReport::compute(&g, &tppr, community);
    let metrics_time = metrics_start.elapsed();

    let (algorithm, beta, beta_lower, epsilon, fallback) = match &outcome {
        Outcome::Exact(r) => (r.algorithm.name(), r.beta, None, None, None),
        Outcome::Approx(r) => (
            "als",
            report.md,
            Some(r.beta_lower),
            Some(r.epsilon).filter(|e| e.is_finite()),
            Some(r.fallback),
        ),
    };
    Ok(QueryResponse {
        algorithm,
        query: args.queries.clone(),
        alpha: args.alpha,
        community: labels(&g, community),
        size: community.len(),
        beta,
        beta_lower,
        epsilon,
        fallback,
        metrics: MetricsJson {
            td: report.td,
            tc: report.tc,
            md: report.md,
            size: report.size,
            ts: report.timestamps,
        },
        timings: TimingsJson {
            load_ms: ms(load),
            tppr_ms: ms(tppr_time),
            search_ms: ms(search_time),
            metrics_ms: ms(metrics_time),
        },
    })
}

fn fmt_opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(|| "-".into(), |v| v.to_string())
}

fn run_query(args: &QueryArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let resp = execute_query(args)?;
    if args.json || args.format == Format::Json {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&resp).expect("response serialises")
        )
        .map_err(Error::from)?;
        return Ok(());
    }
    let mut text = format!(
        "algorithm  {}\nquery      {}\nalpha      {}\ncommunity  {}\nsize       {}\nbeta       {}\n",
        resp.algorithm,
        resp.query.join(" "),
        resp.alpha,
        resp.community.join(" "),
        resp.size,
        resp.beta,
    );
    if resp.algorithm == "als" {
        text += &format!(
            "beta_lower {}\nepsilon    {}\nfallback   {}\n",
            fmt_opt(resp.beta_lower),
            resp.epsilon.map_or_else(|| "inf".into(), |e| e.to_string()),
            fmt_opt(resp.fallback),
        );
    }
    let m = &resp.metrics;
    let t = &resp.timings;
    text += &format!(
        "td         {}\ntc         {}\nmd         {}\nts         {}\n\
         load_ms    {}\ntppr_ms    {}\nsearch_ms  {}\nmetrics_ms {}\n",
        m.td, m.tc, m.md, m.ts, t.load_ms, t.tppr_ms, t.search_ms, t.metrics_ms
    );
    out.write_all(text.as_bytes()).map_err(Error::from)?;
    Ok(())
}

fn run_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let spec = SyntheticSpec {
        n: args.n,
        avg_degree: args.avg_deg,
        timestamps_per_edge: args.tpe,
        horizon: args.horizon,
        seed: args.seed,
    };
    let stream = spec.edge_stream()?;
    let write_all = |w: &mut dyn Write| -> io::Result<()> {
        for (u, v, t) in &stream {
            writeln!(w, "{u} {v} {t}")?;
        }
        w.flush()
    };
    match &args.out {
        Some(path) => write_all(&mut BufWriter::new(
            File::create(path).map_err(Error::from)?,
        )),
        None => write_all(&mut BufWriter::new(out)),
    }
    .map_err(Error::from)?;
    Ok(())
}

#[derive(Serialize, Debug, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub m_static: usize,
    pub t_max: usize,
    pub t_min_time: u64,
    pub t_max_time: u64,
    pub skipped_lines: usize,
}

pub fn graph_stats(path: &Path) -> Result<GraphStats, Error> {
    let (g, warnings) = load_graph(path)?;
    let (lo, hi) = g.time_span();
    Ok(GraphStats {
        n: g.num_vertices(),
        m: g.num_edges(),
        m_static: g.num_static_edges(),
        t_max: g.max_temporal_occurrence(),
        t_min_time: lo,
        t_max_time: hi,
        skipped_lines: warnings.total(),
    })
}

fn run_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let s = graph_stats(&args.graph)?;
    let res = if args.json {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&s).expect("stats serialise")
        )
    } else {
        writeln!(
            out,
            "n={} m={} m_static={} T_max={} time=[{}, {}]",
            s.n, s.m, s.m_static, s.t_max, s.t_min_time, s.t_max_time
        )
    };
    res.map_err(Error::from)?;
    Ok(())
}

/// Queries are sampled from vertices with at least one temporal edge.
pub(crate) fn active_vertices(g: &TemporalGraph) -> Vec<VertexId> {
    g.vertices().filter(|&v| g.temporal_degree(v) > 0).collect()
}

/// `k` of `pool` chosen by the seeded RNG, or evenly spaced over temporal
/// occurrence rank when `stratify` is set. Order is deterministic.
pub(crate) fn sample_queries(
    g: &TemporalGraph,
    pool: &[VertexId],
    k: usize,
    seed: u64,
    stratify: bool,
) -> Vec<VertexId> {
    if stratify {
        let mut ranked = pool.to_vec();
        ranked.sort_by_key(|&v| (std::cmp::Reverse(g.temporal_occurrence(v)), v));
        (0..k).map(|i| ranked[i * ranked.len() / k]).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        index::sample(&mut rng, pool.len(), k)
            .into_iter()
            .map(|i| pool[i])
            .collect()
    }
}
