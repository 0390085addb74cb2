//! Command-line front end. Every command prints one report (JSON by default)
//! that echoes the seed. Exit status: 0 when every emitted check passes or
//! is vacuous, 2 when any check fails or is inconclusive, 1 on usage or
//! input errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::electric;
use crate::error::{Error, Result};
use crate::experiments::{self, Csv, DeletionOptions, DeletionVariant};
use crate::graph::{generate, graph_stats, parse_graph, serialize_graph, GeneratorSpec, Multigraph, VertexSet};
use crate::par::Exec;
use crate::perron_lab::{self, Strategy};
use crate::spectral::{default_tol, eig_sym, matrix_view, multiplicity, perron, Interval, MatrixKind};
use crate::walks::{self, CycleSupVariant, McOptions, DEFAULT_WORKERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(name = "walklab", version, about = "Spectral and random-walk certificates for multigraphs")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "WALKLAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Monte Carlo worker streams.
    #[arg(long, global = true, default_value_t = DEFAULT_WORKERS)]
    workers: usize,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    /// JSON file whose `seed`, `output` and `workers` keys override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    output: Option<OutputFormat>,
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct GraphArg {
    /// `gen:<family>,key=value,...` or a graph file path.
    graph: String,
}

#[derive(Debug, Args)]
struct KindArg {
    /// adjacency | normalized | transition
    #[arg(long, default_value = "normalized")]
    kind: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a graph in the line format.
    Gen(GraphArg),
    Stats(GraphArg),
    Spectrum {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        kind: KindArg,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        vectors: bool,
    },
    Multiplicity {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        /// Counting tolerance; defaults to 1e-8·max(1, |λ1|).
        #[arg(long)]
        tol: Option<f64>,
    },
    Perron {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        kind: KindArg,
        #[arg(long)]
        set: Option<String>,
    },
    Resistance {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Hitprob {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "")]
        taboo: String,
    },
    /// Exact support profile of closed 2k-walks.
    WalkExact {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        k: usize,
    },
    /// Monte Carlo support profile of closed 2k-walks.
    WalkSample {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
    },
    #[command(subcommand)]
    Check(CheckCommand),
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    LemmaTest {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        kind: KindArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
    },
    Extend {
        #[command(flatten)]
        g: GraphArg,
        #[command(flatten)]
        kind: KindArg,
        #[arg(long)]
        set: String,
        /// electric | argmax
        #[arg(long, default_value = "electric")]
        strategy: String,
    },
    ElectricThm {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        set: String,
    },
    Corollary(GraphArg),
    Cyclesup {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        /// normalized | highdeg
        #[arg(long, default_value = "normalized")]
        variant: String,
    },
    Gamma {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        s: usize,
    },
    Transfer {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        set: String,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        z: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
    },
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    Deletion {
        #[command(flatten)]
        g: GraphArg,
        /// normalized | highdeg
        #[arg(long, default_value = "normalized")]
        variant: String,
        #[arg(long, default_value_t = 1)]
        retries: usize,
    },
    Lollipop {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
    },
    Mangrove {
        #[arg(long)]
        d: u64,
        /// Comma-separated path lengths.
        #[arg(long)]
        n: String,
    },
    Ramanujan {
        #[command(flatten)]
        g: GraphArg,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        b: f64,
    },
}

fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

struct Ctx {
    seed: u64,
    workers: usize,
    exec: Exec,
}

/// Command output: a JSON body plus optional plot rows.
struct Output {
    body: Value,
    csv: Option<Csv>,
}

impl From<Value> for Output {
    fn from(body: Value) -> Self {
        Output { body, csv: None }
    }
}

impl From<experiments::Report> for Output {
    fn from(r: experiments::Report) -> Self {
        let body = r.to_json();
        Output { body, csv: r.csv }
    }
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli) {
        Ok((format, output, seed)) => {
            let text = render(format, &output, seed);
            let _ = out.write_all(text.as_bytes());
            if has_failure(&output.body) {
                2
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<(OutputFormat, Output, u64)> {
    let mut cfg = ConfigFile::default();
    if let Some(path) = &cli.config {
        cfg = serde_json::from_str(&read_file(path)?)?;
    }
    let ctx = Ctx {
        seed: cfg.seed.unwrap_or(cli.seed),
        workers: cfg.workers.unwrap_or(cli.workers),
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    if ctx.workers == 0 {
        return Err(Error::param("--workers must be positive"));
    }
    let format = cfg.output.unwrap_or(cli.output);
    let output = dispatch(cli.command, &ctx)?;
    Ok((format, output, ctx.seed))
}

fn load_graph(arg: &GraphArg, ctx: &Ctx) -> Result<Multigraph> {
    if arg.graph.starts_with("gen:") {
        let mut spec: GeneratorSpec = arg.graph.parse()?;
        if !arg.graph.split(',').any(|p| p.trim().starts_with("seed=")) {
            spec.seed = ctx.seed;
        }
        generate(&spec)
    } else {
        parse_graph(&read_file(arg.graph.as_ref())?)
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| Error::param(format!("not a vertex id: {p:?}"))))
        .collect()
}

fn parse_set(g: &Multigraph, s: &str) -> Result<VertexSet> {
    VertexSet::new(g, parse_list(s)?)
}

fn opt_set(g: &Multigraph, s: &Option<String>) -> Result<Option<VertexSet>> {
    s.as_deref().map(|s| parse_set(g, s)).transpose()
}

fn dispatch(cmd: Command, ctx: &Ctx) -> Result<Output> {
    Ok(match cmd {
        Command::Gen(g) => {
            let graph = load_graph(&g, ctx)?;
            json!({ "command": "gen", "n": graph.n(), "graph": serialize_graph(&graph) }).into()
        }
        Command::Stats(g) => {
            let graph = load_graph(&g, ctx)?;
            json!({ "command": "stats", "stats": graph_stats(&graph) }).into()
        }
        Command::Spectrum { g, kind, set, vectors } => {
            let graph = load_graph(&g, ctx)?;
            let kind: MatrixKind = kind.kind.parse()?;
            let set = opt_set(&graph, &set)?;
            let view = matrix_view(&graph, kind, set.as_ref())?;
            let eig = eig_sym(&view.matrix)?;
            json!({ "command": "spectrum", "kind": kind, "indices": view.indices, "spectrum": eig.to_json(vectors) }).into()
        }
        Command::Multiplicity { g, kind, lo, hi, tol } => {
            let graph = load_graph(&g, ctx)?;
            let kind: MatrixKind = kind.kind.parse()?;
            let eigs = eig_sym(&matrix_view(&graph, kind, None)?.matrix)?.eigenvalues;
            let tol = tol.unwrap_or_else(|| default_tol(&eigs));
            let interval = Interval::new(lo, hi)?;
            json!({ "command": "multiplicity", "kind": kind, "interval": interval, "tol": tol,
                    "count": multiplicity(&eigs, interval, tol) })
            .into()
        }
        Command::Perron { g, kind, set } => {
            let graph = load_graph(&g, ctx)?;
            let kind: MatrixKind = kind.kind.parse()?;
            let set = opt_set(&graph, &set)?.unwrap_or_else(|| VertexSet::all(&graph));
            json!({ "command": "perron", "kind": kind, "perron": perron(&graph, &set, kind)? }).into()
        }
        Command::Resistance { g, a, b } => {
            let graph = load_graph(&g, ctx)?;
            json!({ "command": "resistance", "a": a, "b": b,
                    "resistance": electric::effective_resistance(&graph, a, b)? })
            .into()
        }
        Command::Hitprob { g, x, target, taboo } => {
            let graph = load_graph(&g, ctx)?;
            let (target, taboo) = (parse_list(&target)?, parse_list(&taboo)?);
            let p = electric::hitting_prob(&graph, x, &target, &taboo)?;
            json!({ "command": "hitprob", "x": x, "target": target, "taboo": taboo, "probability": p }).into()
        }
        Command::WalkExact { g, x, k } => {
            let graph = load_graph(&g, ctx)?;
            let profile = walks::support_profile_exact(&graph, x, 2 * k)?;
            json!({ "command": "walk-exact", "profile": profile.to_json() }).into()
        }
        Command::WalkSample { g, x, k, n } => {
            let graph = load_graph(&g, ctx)?;
            let opts = McOptions { workers: ctx.workers, exec: ctx.exec };
            let profile = walks::support_profile_mc_with(&graph, x, 2 * k, n, ctx.seed, opts)?;
            json!({ "command": "walk-sample", "workers": ctx.workers, "profile": profile.to_json() }).into()
        }
        Command::Check(c) => check(c, ctx)?,
        Command::Experiment(e) => experiment(e, ctx)?,
    })
}

fn check(cmd: CheckCommand, ctx: &Ctx) -> Result<Output> {
    Ok(match cmd {
        CheckCommand::LemmaTest { g, kind, set, u, v } => {
            let graph = load_graph(&g, ctx)?;
            let set = parse_set(&graph, &set)?;
            let c = perron_lab::perturbation_bound(&graph, &set, u, v, kind.kind.parse()?)?;
            json!({ "command": "check lemma-test", "checks": [c] }).into()
        }
        CheckCommand::Extend { g, kind, set, strategy } => {
            let graph = load_graph(&g, ctx)?;
            let set = parse_set(&graph, &set)?;
            let strategy: Strategy = strategy.parse()?;
            let ext = perron_lab::extend_support(&graph, &set, strategy, kind.kind.parse()?)?;
            json!({ "command": "check extend", "trace": ext.trace, "checks": ext.checks }).into()
        }
        CheckCommand::ElectricThm { g, set } => {
            let graph = load_graph(&g, ctx)?;
            let set = parse_set(&graph, &set)?;
            let thm = perron_lab::electric_theorem_check(&graph, &set)?;
            json!({ "command": "check electric-thm", "result": thm }).into()
        }
        CheckCommand::Corollary(g) => {
            let graph = load_graph(&g, ctx)?;
            let c = perron_lab::irregular_corollary_check(&graph)?;
            json!({ "command": "check corollary", "checks": [c] }).into()
        }
        CheckCommand::Cyclesup { g, x, k, s, variant } => {
            let graph = load_graph(&g, ctx)?;
            let variant: CycleSupVariant = variant.parse()?;
            let c = walks::cyclesup_check(&graph, x, k, s, variant)?;
            json!({ "command": "check cyclesup", "checks": [c] }).into()
        }
        CheckCommand::Gamma { g, x, s } => {
            let graph = load_graph(&g, ctx)?;
            let c = experiments::gamma_enumeration_check(&graph, x, s)?;
            json!({ "command": "check gamma", "checks": [c] }).into()
        }
        CheckCommand::Transfer { g, set, x, z, k, s } => {
            let graph = load_graph(&g, ctx)?;
            let t = parse_set(&graph, &set)?;
            let checks = experiments::walk_transfer_check(&graph, &t, x, z, k, s)?;
            json!({ "command": "check transfer", "checks": checks }).into()
        }
    })
}

fn experiment(cmd: ExperimentCommand, ctx: &Ctx) -> Result<Output> {
    let report = match cmd {
        ExperimentCommand::Deletion { g, variant, retries } => {
            let graph = load_graph(&g, ctx)?;
            let variant: DeletionVariant = variant.parse()?;
            let opts = DeletionOptions { variant, retries, exec: ctx.exec };
            let mut r = experiments::deletion_pipeline(&graph, ctx.seed, &opts)?;
            r.params.insert("graph".into(), json!(g.graph));
            r
        }
        ExperimentCommand::Lollipop { d, n, k, ell } => experiments::lollipop_report(d, n, k, ell)?,
        ExperimentCommand::Mangrove { d, n } => {
            let ns = parse_list(&n)?.into_iter().map(|v| v as u64).collect::<Vec<_>>();
            experiments::mangrove_report(d, &ns)?
        }
        ExperimentCommand::Ramanujan { g, k, b } => {
            let graph = load_graph(&g, ctx)?;
            let mut r = experiments::ramanujan_trace_bound(&graph, k, b)?;
            r.params.insert("graph".into(), json!(g.graph));
            r
        }
    };
    Ok(report.into())
}

/// True when any nested object carries a `verdict` other than pass/vacuous.
fn has_failure(v: &Value) -> bool {
    match v {
        Value::Object(m) => {
            matches!(m.get("verdict").and_then(Value::as_str), Some("fail" | "inconclusive"))
                || m.values().any(has_failure)
        }
        Value::Array(a) => a.iter().any(has_failure),
        _ => false,
    }
}

fn render(format: OutputFormat, output: &Output, seed: u64) -> String {
    let mut body = output.body.clone();
    if let Value::Object(m) = &mut body {
        m.insert("seed".into(), json!(seed));
    }
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string(&body).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => render_csv(&body, output.csv.as_ref(), seed),
        OutputFormat::Pretty => render_pretty(&body),
    }
}

fn checks_of(body: &Value) -> Vec<&Map<String, Value>> {
    let mut found = Vec::new();
    fn walk<'a>(v: &'a Value, found: &mut Vec<&'a Map<String, Value>>) {
        match v {
            Value::Object(m) if m.contains_key("verdict") && m.contains_key("slack") => found.push(m),
            Value::Object(m) => m.values().for_each(|x| walk(x, found)),
            Value::Array(a) => a.iter().for_each(|x| walk(x, found)),
            _ => {}
        }
    }
    walk(body, &mut found);
    found
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render_csv(body: &Value, csv: Option<&Csv>, seed: u64) -> String {
    if let Some(csv) = csv {
        let mut with_seed = Csv::new(&[]);
        with_seed.header = std::iter::once("seed".to_string()).chain(csv.header.iter().cloned()).collect();
        for r in &csv.rows {
            with_seed.rows.push(std::iter::once(seed.to_string()).chain(r.iter().cloned()).collect());
        }
        return with_seed.render();
    }
    let checks = checks_of(body);
    if !checks.is_empty() {
        let mut t = Csv::new(&["seed", "name", "lhs", "relation", "rhs", "slack", "tol", "verdict"]);
        for c in checks {
            let row = ["name", "lhs", "relation", "rhs", "slack", "tol", "verdict"]
                .iter()
                .map(|k| c.get(*k).map(scalar).unwrap_or_default());
            t.push(std::iter::once(seed.to_string()).chain(row).collect());
        }
        return t.render();
    }
    let mut t = Csv::new(&["key", "value"]);
    flatten("", body, &mut |k, v| t.push(vec![k.to_string(), v.to_string()]));
    t.render()
}

fn flatten(prefix: &str, v: &Value, emit: &mut dyn FnMut(&str, &str)) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, emit);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, emit);
            }
        }
        other => emit(prefix, &scalar(other)),
    }
}

fn render_pretty(body: &Value) -> String {
    let mut out = String::new();
    for c in checks_of(body) {
        let get = |k: &str| c.get(k).map(scalar).unwrap_or_default();
        out.push_str(&format!(
            "[{}] {}: {} {} {} (slack {})\n",
            get("verdict"),
            get("name"),
            get("lhs"),
            get("relation"),
            get("rhs"),
            get("slack")
        ));
    }
    flatten("", body, &mut |k, v| out.push_str(&format!("{k} = {v}\n")));
    out
}
