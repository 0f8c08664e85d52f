//! Command-line front end for dpg-core.

pub mod config;
pub mod experiment;
pub mod manifest;
pub mod source;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dpg_core::analysis::{
    check_density_bounded, check_density_law, check_distribution_bounded, check_linear_law, check_maxdpg_law,
    minimal_linear_k, sf_theoretical_c,
};
use dpg_core::gadgets::{
    build_reduction, irreducible_4regular, padded_instance, verify_reduction, BuildOptions, Formula,
};
use dpg_core::io::{write_edge_list, write_graph};
use dpg_core::matching::{matching_bound_report, GeneralizedVizingVariant};
use dpg_core::reduce::{exact_minimum_kernel, reduce_to_kernel, OrderPolicy, ReduceOptions};
use dpg_core::rng::rng_from_seed;
use dpg_core::trace::{SeedSummary, TraceDirection, TraceError};
use dpg_core::{grow, MatchingStrategy, Protocol, ProtocolConfig, StubGraph, Trace, TraceEvent};
use serde::Serialize;
use serde_json::json;

use manifest::Recorder;

#[derive(Debug, Parser)]
#[command(name = "dpg", version, about = "Degree-preserving network growth toolkit")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "DPG_SEED", default_value_t = 0)]
    pub rng_seed: u64,
    /// Upper bound on parallel pipelines.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Write a run manifest (hashes of inputs and outputs) to this file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a seed graph by DP-steps and write the trace.
    Grow(GrowArgs),
    /// DP-reduce a graph to an irreducible kernel.
    Reduce(ReduceArgs),
    /// Matching-number lower bounds of a graph.
    Bounds(BoundsArgs),
    /// Check a trace or graph against a growth law.
    Analyze(AnalyzeArgs),
    /// Hardness constructions.
    #[command(subcommand)]
    Gadget(GadgetCommand),
    /// Re-apply a trace to its starting graph.
    Replay(ReplayArgs),
    /// Run a batch experiment from a config file or preset.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GrowArgs {
    /// max, linear:c, sf:gamma[:c] or regular:c.
    #[arg(long)]
    pub protocol: Protocol,
    /// Edge-list file or `gen:<family>:<n>`.
    #[arg(long)]
    pub seed_graph: String,
    /// Target number of vertices.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "max-subset")]
    pub strategy: MatchingStrategy,
    /// Trace file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the final graph as an edge list.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    pub input: String,
    #[arg(long, default_value = "min-degree")]
    pub policy: OrderPolicy,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub backtrack: usize,
    /// Never take a removal that splits a component.
    #[arg(long)]
    pub preserve_components: bool,
    /// Exhaustive minimum kernel (small graphs only).
    #[arg(long)]
    pub exact: bool,
    /// Removal trace.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    #[arg(long)]
    pub kernel_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Literal,
    PlusOne,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    pub input: String,
    /// Also compute ν exactly.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = VariantArg::Literal)]
    pub variant: VariantArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckArg {
    Powerlaw,
    Maxdpg,
    Linear,
    Density,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Distribution,
    Density,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace file or edge list.
    pub input: String,
    #[arg(long, value_enum)]
    pub check: CheckArg,
    /// Starting graph of a trace (linear check, or powerlaw on a trace).
    #[arg(long)]
    pub seed_graph: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Certainty level for the scale-free constant.
    #[arg(long, default_value_t = 1.0)]
    pub certainty: f64,
    /// Power-law coefficient; defaults to the theoretical one.
    #[arg(long)]
    pub big_c: Option<f64>,
    #[arg(long, value_enum, default_value_t = BoundArg::Distribution)]
    pub bound: BoundArg,
    /// Linear protocol constant; defaults to the trace header's.
    #[arg(long)]
    pub c: Option<f64>,
    /// Linear-law offset; defaults to the smallest valid for the seed.
    #[arg(long)]
    pub k: Option<f64>,
    /// Additive constant of the MaxDPG law.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
    /// Constant of the density law.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Only samples with n at least this are checked.
    #[arg(long, default_value_t = 0)]
    pub warmup: usize,
    /// Omit the per-step samples from the report.
    #[arg(long)]
    pub brief: bool,
}

#[derive(Debug, Subcommand)]
pub enum GadgetCommand {
    /// Graph whose variable and clause vertices are removable iff the
    /// DIMACS formula is satisfiable.
    Sat {
        dimacs: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Share blocker cliques between odd-degree vertices.
        #[arg(long)]
        even_blockers: bool,
        /// Brute-force check of the equivalence (at most 8 variables).
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// The irreducible 4-regular graph on 4k vertices.
    Irreducible4 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub trace: PathBuf,
    /// Starting graph: the seed for forward replay, the end state with
    /// `--reverse`.
    #[arg(long)]
    pub seed_graph: String,
    /// Undo the trace instead.
    #[arg(long)]
    pub reverse: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Config file; omit with --preset.
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Writes to stdout; a closed pipe (`dpg ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

/// Runs `cli`, printing its JSON result to stdout.
pub fn run(cli: Cli, command_line: Vec<String>) -> Result<()> {
    let mut rec = Recorder::default();
    let (value, seed_used) = dispatch(&cli, &mut rec)?;
    if let Some(v) = value {
        emit(&(serde_json::to_string_pretty(&v)? + "\n"))?;
    }
    if let Some(path) = &cli.manifest {
        let manifest = rec.finish(command_line, seed_used.then_some(cli.rng_seed));
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(t: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(t)?)
}

fn dispatch(cli: &Cli, rec: &mut Recorder) -> Result<(Option<serde_json::Value>, bool)> {
    Ok(match &cli.command {
        Command::Grow(a) => (Some(cmd_grow(a, cli.rng_seed, rec)?), true),
        Command::Reduce(a) => (Some(cmd_reduce(a, cli.rng_seed, rec)?), true),
        Command::Bounds(a) => (Some(cmd_bounds(a, rec)?), false),
        Command::Analyze(a) => (Some(cmd_analyze(a, rec)?), false),
        Command::Gadget(g) => (cmd_gadget(g, rec)?, false),
        Command::Replay(a) => (cmd_replay(a, rec)?, false),
        Command::Experiment(a) => (Some(cmd_experiment(a, cli.threads, rec)?), false),
    })
}

fn graph_summary(sg: &StubGraph) -> serde_json::Value {
    let g = sg.graph();
    json!({
        "n": g.vertex_count(),
        "m": g.edge_count(),
        "max_degree": g.max_degree(),
        "deficient": sg.deficient(),
    })
}

fn cmd_grow(a: &GrowArgs, seed: u64, rec: &mut Recorder) -> Result<serde_json::Value> {
    let start = source::load_graph(&a.seed_graph, rec)?;
    let config = ProtocolConfig {
        protocol: a.protocol,
        strategy: a.strategy,
        seed,
        target_n: a.n,
    };
    let run = grow(start, &config)?;
    let text = run.trace.to_text();
    rec.write(&a.out, text.as_bytes())?;
    let graph_text = write_edge_list(&run.graph);
    if let Some(p) = &a.graph_out {
        rec.write(p, graph_text.as_bytes())?;
    }
    Ok(json!({
        "graph": graph_summary(&run.graph),
        "steps": run.trace.events.len(),
        "trace_sha256": manifest::sha256_hex(text.as_bytes()),
        "graph_sha256": manifest::sha256_hex(graph_text.as_bytes()),
    }))
}

fn cmd_reduce(a: &ReduceArgs, seed: u64, rec: &mut Recorder) -> Result<serde_json::Value> {
    let sg = source::load_graph(&a.input, rec)?;
    let result = if a.exact {
        exact_minimum_kernel(&sg)?
    } else {
        let opts = ReduceOptions {
            policy: a.policy,
            budget: a.budget.unwrap_or(usize::MAX),
            backtrack: a.backtrack,
            preserve_components: a.preserve_components,
        };
        match reduce_to_kernel(&sg, opts, &mut rng_from_seed(seed)) {
            Ok(r) => r,
            Err(dpg_core::ReduceError::BudgetExhausted(r)) => *r,
            Err(e) => return Err(e.into()),
        }
    };
    let mut trace = Trace::new(TraceDirection::Reduce);
    trace.rng_seed = Some(seed);
    trace.strategy = Some(if a.exact { "exact".into() } else { a.policy.to_string() });
    trace.seed = Some(SeedSummary::of(&sg));
    trace.events = result.removals.iter().cloned().map(TraceEvent::Remove).collect();
    if let Some(p) = &a.trace_out {
        rec.write(p, trace.to_text().as_bytes())?;
    }
    if let Some(p) = &a.kernel_out {
        rec.write(p, write_edge_list(&result.kernel).as_bytes())?;
    }
    let k = result.kernel.graph();
    Ok(json!({
        "kernel_n": k.vertex_count(),
        "kernel_m": k.edge_count(),
        "removed_count": result.removed_count,
        "irreducible": result.irreducible,
    }))
}

fn cmd_bounds(a: &BoundsArgs, rec: &mut Recorder) -> Result<serde_json::Value> {
    let sg = source::load_graph(&a.input, rec)?;
    let variant = match a.variant {
        VariantArg::Literal => GeneralizedVizingVariant::Literal,
        VariantArg::PlusOne => GeneralizedVizingVariant::DenPlusOne,
    };
    to_json(&matching_bound_report(sg.graph(), a.exact, variant))
}

/// Maps a replay error on event `index` to the line it came from.
fn locate(err: TraceError, text: &str) -> anyhow::Error {
    match err {
        TraceError::Mismatch { index, msg } => {
            let line = text
                .lines()
                .enumerate()
                .filter(|(_, l)| l.starts_with("STEP") || l.starts_with("REMOVE"))
                .nth(index)
                .map(|(i, _)| i + 1);
            match line {
                Some(l) => anyhow!("trace mismatch at line {l}: {msg}"),
                None => anyhow!("trace mismatch at event {index}: {msg}"),
            }
        }
        e => anyhow!("trace error: {e}"),
    }
}

fn load_trace(path: &str, rec: &mut Recorder) -> Result<(Trace, String)> {
    let text = rec.read(path)?;
    let trace = Trace::parse(&text).map_err(|e| locate(e, &text))?;
    Ok((trace, text))
}

fn replayed(trace: &mut Trace, text: &str, seed_graph: &Option<String>, rec: &mut Recorder) -> Result<StubGraph> {
    let src = seed_graph
        .as_ref()
        .ok_or_else(|| anyhow!("a trace input needs --seed-graph"))?;
    let start = source::load_graph(src, rec)?;
    trace.replay(&start).map_err(|e| locate(e, text))
}

fn cmd_analyze(a: &AnalyzeArgs, rec: &mut Recorder) -> Result<serde_json::Value> {
    let text = rec.read(&a.input)?;
    let is_trace = text.starts_with("# dpg-trace");
    let trace = || -> Result<Trace> {
        if !is_trace {
            bail!("{} is not a trace", a.input);
        }
        Trace::parse(&text).map_err(|e| locate(e, &text))
    };
    let mut value = match a.check {
        CheckArg::Maxdpg => to_json(&check_maxdpg_law(&trace()?, a.slack, a.warmup)?)?,
        CheckArg::Density => to_json(&check_density_law(&trace()?, a.a, a.warmup)?)?,
        CheckArg::Linear => {
            let t = trace()?;
            let c = match (a.c, t.protocol.as_deref().and_then(|p| p.parse::<Protocol>().ok())) {
                (Some(c), _) => c,
                (None, Some(Protocol::Linear { c })) => c,
                (None, Some(Protocol::Max)) => 1.0,
                _ => bail!("linear check needs --c"),
            };
            let src = a.seed_graph.as_ref().ok_or_else(|| anyhow!("linear check needs --seed-graph"))?;
            let seed = source::load_graph(src, rec)?;
            let k = match a.k {
                Some(k) => k,
                None => minimal_linear_k(&seed, c)?,
            };
            to_json(&check_linear_law(&t, &seed, c, k)?)?
        }
        CheckArg::Powerlaw => {
            let (graph, header_gamma) = if is_trace {
                let mut t = trace()?;
                let g = match t.protocol.as_deref().and_then(|p| p.parse::<Protocol>().ok()) {
                    Some(Protocol::ScaleFree { gamma, .. }) => Some(gamma),
                    _ => None,
                };
                (replayed(&mut t, &text, &a.seed_graph, rec)?, g)
            } else {
                (dpg_core::io::parse_edge_list(&text)?, None)
            };
            let gamma = a
                .gamma
                .or(header_gamma)
                .ok_or_else(|| anyhow!("powerlaw check needs --gamma"))?;
            let big_c = match a.big_c {
                Some(c) => c,
                None => sf_theoretical_c(gamma, a.certainty)?,
            };
            match a.bound {
                BoundArg::Distribution => to_json(&check_distribution_bounded(graph.graph(), gamma, big_c)?)?,
                BoundArg::Density => to_json(&check_density_bounded(graph.graph(), gamma, big_c)?)?,
            }
        }
    };
    if a.brief {
        if let Some(obj) = value.as_object_mut() {
            obj.remove("samples");
        }
    }
    Ok(value)
}

fn roles_json(inst: &dpg_core::gadgets::GadgetInstance) -> serde_json::Value {
    let literal_edges: Vec<serde_json::Value> = inst
        .literal_edge_map
        .iter()
        .map(|(&(var, clause), e)| json!({"var": var, "clause": clause, "edge": [e.u(), e.v()]}))
        .collect();
    json!({
        "variable_vertices": inst.variable_vertices,
        "clause_vertices": inst.clause_vertices,
        "dummy_vertices": inst.dummy_vertices,
        "conflict_vertex": inst.conflict_vertex,
        "literal_edges": literal_edges,
        "forced_literals": inst.forced,
        "encoded_clauses": inst.encoded.clauses,
        "m_target": inst.m_target,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".roles.json");
    PathBuf::from(s)
}

fn cmd_gadget(g: &GadgetCommand, rec: &mut Recorder) -> Result<Option<serde_json::Value>> {
    match g {
        GadgetCommand::Sat {
            dimacs,
            epsilon,
            even_blockers,
            verify,
            out,
        } => {
            let phi = Formula::parse_dimacs(&rec.read(dimacs)?)?;
            let inst = build_reduction(
                &phi,
                BuildOptions {
                    even_blockers: *even_blockers,
                },
            )?;
            let graph = match epsilon {
                Some(e) => padded_instance(&inst, *e)?,
                None => inst.graph.clone(),
            };
            rec.write(out, write_graph(&graph).as_bytes())?;
            let roles = roles_json(&inst);
            rec.write(sidecar(out), (serde_json::to_string_pretty(&roles)? + "\n").as_bytes())?;
            let verification = if *verify {
                Some(to_json(&verify_reduction(&inst, &phi)?)?)
            } else {
                None
            };
            Ok(Some(json!({
                "n": graph.vertex_count(),
                "m": graph.edge_count(),
                "max_degree": graph.max_degree(),
                "m_target": inst.m_target,
                "verification": verification,
            })))
        }
        GadgetCommand::Irreducible4 { k, out } => {
            let graph = irreducible_4regular(*k)?;
            let text = write_graph(&graph);
            match out {
                Some(p) => {
                    rec.write(p, text.as_bytes())?;
                    Ok(Some(json!({"n": graph.vertex_count(), "m": graph.edge_count()})))
                }
                None => {
                    emit(&text)?;
                    Ok(None)
                }
            }
        }
    }
}

fn cmd_replay(a: &ReplayArgs, rec: &mut Recorder) -> Result<Option<serde_json::Value>> {
    let (mut trace, text) = load_trace(&a.trace.display().to_string(), rec)?;
    let start = source::load_graph(&a.seed_graph, rec)?;
    let end = if a.reverse {
        trace.replay_reverse(&start)
    } else {
        trace.replay(&start)
    }
    .map_err(|e| locate(e, &text))?;
    let out = write_edge_list(&end);
    match &a.out {
        Some(p) => {
            rec.write(p, out.as_bytes())?;
            let mut v = graph_summary(&end);
            v["sha256"] = json!(manifest::sha256_hex(out.as_bytes()));
            Ok(Some(v))
        }
        None => {
            emit(&out)?;
            Ok(None)
        }
    }
}

fn cmd_experiment(a: &ExperimentArgs, threads: usize, rec: &mut Recorder) -> Result<serde_json::Value> {
    let (exp, config_file) = match (&a.config, &a.preset) {
        (Some(path), None) => {
            let (exp, files) = experiment::load_experiment(path)?;
            for f in &files {
                rec.note_input(f)?;
            }
            (exp, Some(path.as_path()))
        }
        (None, Some(name)) => {
            let raw = config::parse_str(config::preset(name)?, Path::new("."))?;
            (experiment::Experiment::from_raw(&raw)?, None)
        }
        _ => bail!("give a config file or --preset"),
    };
    let out_dir = experiment::resolve_out_dir(&exp, a.out_dir.as_deref(), config_file);
    let summary = experiment::run_experiment(&exp, &out_dir, threads, rec)?;
    let outputs: std::collections::BTreeMap<String, &String> = rec
        .outputs()
        .iter()
        .map(|(p, h)| {
            let rel = Path::new(p).strip_prefix(&out_dir).map_or(p.clone(), |r| r.display().to_string());
            (rel, h)
        })
        .collect();
    let manifest = json!({
        "experiment": exp.name,
        "seeds": exp.seeds,
        "outputs": outputs,
        "versions": {"dpg-core": dpg_core::VERSION, "dpg-cli": env!("CARGO_PKG_VERSION")},
    });
    rec.write(out_dir.join("manifest.json"), (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
    Ok(json!({
        "out_dir": out_dir.display().to_string(),
        "runs": summary.runs,
        "passes": summary.passes,
        "passed": summary.passed,
    }))
}
