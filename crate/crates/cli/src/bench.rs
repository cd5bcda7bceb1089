//! `bench`: one CSV row per sampled query vertex.
//!
//! Columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `query`, `occurrence` | label and temporal occurrence of the query vertex |
//! | `egr_ms`, `egr_beta`, `egr_size` | exact search |
//! | `als_ms`, `als_beta_lower`, `als_size`, `als_epsilon`, `als_fallback` | approximate search; `epsilon` may be `inf` |
//! | `epsilon_star` | `egr_beta / als_beta_lower` |
//! | `expansion_ratio` | candidate set size after expansion over `n` |
//! | `precision`, `recall` | of the als community against the egr community |
//! | `baseline_ms`, `baseline_beta`, `baseline_size` | k-core baseline |
//! | `brute_ms`, `brute_beta`, `brute_size` | exhaustive search |
//! | `error` | `alg:ErrorName` entries separated by `;` |
//!
//! Cells for algorithms not requested are empty. `--no-timing` blanks the
//! `_ms` columns so that equal seeds give byte-identical output.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::Args;

use qtcs_core::par;
use qtcs_core::{
    als_with, brute_force_qtcs, egr_with, qtcs_baseline, ApproxResult, CommunityResult, Error,
    QueryContext, Result, TemporalGraph, TransitionModel, VertexId, DEFAULT_ALPHA,
};

use crate::{active_vertices, check_alpha, load_graph, ms, sample_queries, AlgorithmArg, Failure};

pub const HEADER: [&str; 21] = [
    "query",
    "occurrence",
    "egr_ms",
    "egr_beta",
    "egr_size",
    "als_ms",
    "als_beta_lower",
    "als_size",
    "als_epsilon",
    "als_fallback",
    "epsilon_star",
    "expansion_ratio",
    "precision",
    "recall",
    "baseline_ms",
    "baseline_beta",
    "baseline_size",
    "brute_ms",
    "brute_beta",
    "brute_size",
    "error",
];

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Comma-separated algorithm list.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgorithmArg::Egr, AlgorithmArg::Als])]
    pub algs: Vec<AlgorithmArg>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Core order for the baseline.
    #[arg(long)]
    pub k: Option<usize>,
    /// Spread queries evenly over temporal occurrence rank instead of
    /// sampling uniformly.
    #[arg(long)]
    pub stratify: bool,
    #[arg(long)]
    pub no_timing: bool,
}

impl BenchArgs {
    fn runs(&self, alg: AlgorithmArg) -> bool {
        self.algs.contains(&alg)
    }

    fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.samples == 0 {
            return Err(Error::InvalidParameter("--samples must be positive".into()));
        }
        if self.algs.is_empty() {
            return Err(Error::InvalidParameter("--algs is empty".into()));
        }
        if self.runs(AlgorithmArg::Baseline) && self.k.is_none() {
            return Err(Error::InvalidParameter("baseline needs --k".into()));
        }
        Ok(())
    }
}

struct Row {
    query: VertexId,
    egr: Option<Result<CommunityResult>>,
    als: Option<Result<ApproxResult>>,
    baseline: Option<Result<CommunityResult>>,
    brute: Option<Result<CommunityResult>>,
}

fn run_one(model: &TransitionModel<'_>, args: &BenchArgs, q: VertexId) -> Row {
    let g = model.graph();
    let ctx = QueryContext::single(q, args.alpha).expect("alpha is validated");
    let go = |alg, f: &dyn Fn() -> Result<CommunityResult>| args.runs(alg).then(f);
    Row {
        query: q,
        egr: go(AlgorithmArg::Egr, &|| egr_with(model, &ctx)),
        als: args.runs(AlgorithmArg::Als).then(|| als_with(model, &ctx)),
        baseline: go(AlgorithmArg::Baseline, &|| {
            qtcs_baseline(g, &ctx, args.k.unwrap_or(0))
        }),
        brute: go(AlgorithmArg::Brute, &|| brute_force_qtcs(g, &ctx)),
    }
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        x.to_string()
    }
}

fn overlap(a: &[VertexId], b: &[VertexId]) -> usize {
    a.iter().filter(|v| b.binary_search(v).is_ok()).count()
}

fn cells(g: &TemporalGraph, row: &Row, timing: bool) -> Vec<String> {
    let time = |d: Duration| if timing { num(ms(d)) } else { String::new() };
    let mut errors = Vec::new();
    let mut exact = |name: &str, r: &Option<Result<CommunityResult>>| -> [String; 3] {
        match r {
            Some(Ok(c)) => [
                time(c.timings.tppr + c.timings.search),
                num(c.beta),
                c.len().to_string(),
            ],
            Some(Err(e)) => {
                errors.push(format!("{name}:{}", e.name()));
                Default::default()
            }
            None => Default::default(),
        }
    };
    let [egr_ms, egr_beta, egr_size] = exact("egr", &row.egr);
    let [baseline_ms, baseline_beta, baseline_size] = exact("baseline", &row.baseline);
    let [brute_ms, brute_beta, brute_size] = exact("brute", &row.brute);

    let mut als_cells: [String; 9] = Default::default();
    match &row.als {
        Some(Ok(a)) => {
            als_cells[0] = time(a.expand_time + a.reduce_time);
            als_cells[1] = num(a.beta_lower);
            als_cells[2] = a.community.len().to_string();
            als_cells[3] = num(a.epsilon);
            als_cells[4] = a.fallback.to_string();
            als_cells[6] = num(a.expanded as f64 / g.num_vertices() as f64);
            if let Some(Ok(e)) = &row.egr {
                let hit = overlap(&a.community, &e.community) as f64;
                als_cells[5] = num(a.true_ratio(e.beta));
                als_cells[7] = num(hit / a.community.len() as f64);
                als_cells[8] = num(hit / e.community.len() as f64);
            }
        }
        Some(Err(e)) => errors.push(format!("als:{}", e.name())),
        None => {}
    }

    let mut out = vec![
        g.label(row.query).to_string(),
        g.temporal_occurrence(row.query).to_string(),
        egr_ms,
        egr_beta,
        egr_size,
    ];
    out.extend(als_cells);
    out.extend([
        baseline_ms,
        baseline_beta,
        baseline_size,
        brute_ms,
        brute_beta,
        brute_size,
    ]);
    out.push(errors.join(";"));
    out
}

pub fn run_bench(
    args: &BenchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    args.validate()?;
    let (g, _) = load_graph(&args.graph)?;
    let pool = active_vertices(&g);
    let mut k = args.samples;
    if k > pool.len() {
        let _ = writeln!(
            err,
            "warning: {} samples requested but only {} vertices are active; using {}",
            k,
            pool.len(),
            pool.len()
        );
        k = pool.len();
    }
    let queries = sample_queries(&g, &pool, k, args.seed, args.stratify);
    let model = TransitionModel::new(&g);
    let rows = par::map(&queries, |&q| run_one(&model, args, q));

    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Failure::from(Error::Io(e.into()));
    w.write_record(HEADER).map_err(csv_err)?;
    for row in &rows {
        w.write_record(cells(&g, row, !args.no_timing))
            .map_err(csv_err)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}
