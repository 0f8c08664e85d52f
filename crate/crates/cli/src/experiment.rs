//! Batch harness: grow one run per seed, analyze it, write traces, JSON
//! reports, a summary and a manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dpg_core::analysis::{
    check_density_bounded, check_density_law, check_distribution_bounded, check_linear_law, check_maxdpg_law,
    minimal_linear_k, sf_theoretical_c,
};
use dpg_core::growth::grow_with;
use dpg_core::{MatchingStrategy, Protocol, ProtocolConfig, StubGraph};
use serde::Serialize;
use serde_json::Value;

use crate::config::{parse_seeds, ConfigError, RawConfig};
use crate::manifest::{sha256_hex, Recorder};
use crate::source;

const KNOWN_KEYS: &[&str] = &[
    "name", "protocol", "strategy", "seed_graph", "n", "seeds", "checks", "slack", "a", "warmup", "gamma",
    "certainty", "big_c", "bound", "linear_k", "out_dir",
];

#[derive(Clone, Debug, Serialize)]
pub struct Experiment {
    pub name: String,
    pub protocol: Protocol,
    pub strategy: MatchingStrategy,
    pub seed_graph: String,
    pub n: usize,
    pub seeds: Vec<u64>,
    pub checks: Vec<String>,
    pub slack: f64,
    pub a: f64,
    pub warmup: usize,
    pub gamma: Option<f64>,
    pub certainty: f64,
    pub big_c: Option<f64>,
    pub bound: String,
    pub linear_k: Option<f64>,
    pub out_dir: Option<String>,
}

fn value<T: std::str::FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.keys
        .get(key)
        .map(|v| {
            v.parse().map_err(|e: T::Err| ConfigError::Value {
                key: key.into(),
                msg: e.to_string(),
            })
        })
        .transpose()
}

impl Experiment {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        if raw.keys.is_empty() {
            return Err(ConfigError::Empty);
        }
        if let Some(k) = raw.keys.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(k.clone()));
        }
        let need = |k: &'static str| raw.keys.get(k).cloned().ok_or(ConfigError::Missing(k));
        let checks: Vec<String> = raw
            .keys
            .get("checks")
            .map(|s| s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect())
            .unwrap_or_default();
        for c in &checks {
            if !["maxdpg", "density", "linear", "powerlaw", "regularity"].contains(&c.as_str()) {
                return Err(ConfigError::Value {
                    key: "checks".into(),
                    msg: format!("unknown check {c:?}"),
                });
            }
        }
        let seeds = parse_seeds(&need("seeds")?).map_err(|msg| ConfigError::Value { key: "seeds".into(), msg })?;
        Ok(Experiment {
            name: raw.keys.get("name").cloned().unwrap_or_else(|| "experiment".into()),
            protocol: value(raw, "protocol")?.ok_or(ConfigError::Missing("protocol"))?,
            strategy: value(raw, "strategy")?.unwrap_or_default(),
            seed_graph: need("seed_graph")?,
            n: value(raw, "n")?.ok_or(ConfigError::Missing("n"))?,
            seeds,
            checks,
            slack: value(raw, "slack")?.unwrap_or(0.0),
            a: value(raw, "a")?.unwrap_or(1.0),
            warmup: value(raw, "warmup")?.unwrap_or(0),
            gamma: value(raw, "gamma")?,
            certainty: value(raw, "certainty")?.unwrap_or(1.0),
            big_c: value(raw, "big_c")?,
            bound: raw.keys.get("bound").cloned().unwrap_or_else(|| "distribution".into()),
            linear_k: value(raw, "linear_k")?,
            out_dir: raw.keys.get("out_dir").cloned(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
struct RegularityReport {
    c: usize,
    steps: usize,
    stub_free_steps: usize,
    regular_steps: usize,
    /// Longest run of consecutive steps ending with a stub-edge.
    longest_stub_run: usize,
    passed: bool,
}

struct SeedOutput {
    seed: u64,
    trace: String,
    report: Value,
    verdicts: BTreeMap<String, bool>,
}

fn run_seed(exp: &Experiment, seed_graph: &StubGraph, seed: u64) -> Result<SeedOutput> {
    let config = ProtocolConfig {
        protocol: exp.protocol,
        strategy: exp.strategy,
        seed,
        target_n: exp.n,
    };
    let regular = match exp.protocol {
        Protocol::Regular { c } => Some(c),
        _ => None,
    };
    let (mut steps, mut stub_free, mut regular_steps, mut run, mut longest) = (0, 0, 0, 0, 0);
    let grown = grow_with(seed_graph.clone(), &config, |sg, _| {
        steps += 1;
        if sg.deficient().is_none() {
            stub_free += 1;
            run = 0;
            if regular.is_some_and(|c| sg.graph().is_regular(c)) {
                regular_steps += 1;
            }
        } else {
            run += 1;
            longest = longest.max(run);
        }
    })?;
    let trace = grown.trace.to_text();
    let graph = grown.graph.graph();
    let mut checks = serde_json::Map::new();
    let mut verdicts = BTreeMap::new();
    let mut put = |name: &str, passed: bool, report: Value| {
        verdicts.insert(name.to_string(), passed);
        checks.insert(name.to_string(), report);
    };
    for check in &exp.checks {
        match check.as_str() {
            "maxdpg" => {
                let r = check_maxdpg_law(&grown.trace, exp.slack, exp.warmup)?;
                put(check, r.passed, serde_json::to_value(&r)?);
            }
            "density" => {
                let r = check_density_law(&grown.trace, exp.a, exp.warmup)?;
                put(check, r.passed, serde_json::to_value(&r)?);
            }
            "linear" => {
                let Protocol::Linear { c } = exp.protocol else {
                    bail!("check linear needs a linear protocol");
                };
                let k = match exp.linear_k {
                    Some(k) => k,
                    None => minimal_linear_k(seed_graph, c)?,
                };
                let r = check_linear_law(&grown.trace, seed_graph, c, k)?;
                put(check, r.passed, serde_json::to_value(&r)?);
            }
            "powerlaw" => {
                let gamma = match (exp.gamma, exp.protocol) {
                    (Some(g), _) => g,
                    (None, Protocol::ScaleFree { gamma, .. }) => gamma,
                    _ => bail!("check powerlaw needs gamma"),
                };
                let big_c = match exp.big_c {
                    Some(c) => c,
                    None => sf_theoretical_c(gamma, exp.certainty)?,
                };
                let r = match exp.bound.as_str() {
                    "distribution" => check_distribution_bounded(graph, gamma, big_c)?,
                    "density" => check_density_bounded(graph, gamma, big_c)?,
                    b => bail!("unknown bound {b:?} (distribution or density)"),
                };
                put(check, r.passed, serde_json::to_value(&r)?);
            }
            "regularity" => {
                let Some(c) = regular else {
                    bail!("check regularity needs a regular protocol");
                };
                let passed = regular_steps == stub_free
                    && if c % 2 == 0 { stub_free == steps } else { longest <= 1 };
                let r = RegularityReport {
                    c,
                    steps,
                    stub_free_steps: stub_free,
                    regular_steps,
                    longest_stub_run: longest,
                    passed,
                };
                put(check, r.passed, serde_json::to_value(&r)?);
            }
            _ => unreachable!("validated"),
        }
    }
    let report = serde_json::json!({
        "seed": seed,
        "n": graph.vertex_count(),
        "m": graph.edge_count(),
        "max_degree": graph.max_degree(),
        "trace_sha256": sha256_hex(trace.as_bytes()),
        "checks": checks,
    });
    Ok(SeedOutput {
        seed,
        trace,
        report,
        verdicts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub experiment: Experiment,
    /// Per check, the number of seeds that passed.
    pub passes: BTreeMap<String, usize>,
    pub runs: usize,
    pub passed: bool,
}

/// Runs every seed, at most `threads` at a time, and writes
/// `trace-<seed>.txt`, `report-<seed>.json`, `summary.json` and
/// `manifest.json` into `out_dir`. Output bytes do not depend on `threads`.
pub fn run_experiment(exp: &Experiment, out_dir: &Path, threads: usize, rec: &mut Recorder) -> Result<ExperimentSummary> {
    let seed_graph = source::load_graph(&exp.seed_graph, rec)?;
    let threads = threads.max(1).min(exp.seeds.len().max(1));
    let chunks: Vec<Vec<u64>> = (0..threads)
        .map(|t| exp.seeds.iter().skip(t).step_by(threads).copied().collect())
        .collect();
    let results: Vec<Result<Vec<SeedOutput>>> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                let sg = &seed_graph;
                s.spawn(move || chunk.iter().map(|&seed| run_seed(exp, sg, seed)).collect())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut outputs: Vec<SeedOutput> = Vec::new();
    for r in results {
        outputs.extend(r?);
    }
    let order: BTreeMap<u64, usize> = exp.seeds.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    outputs.sort_by_key(|o| order[&o.seed]);
    let mut passes: BTreeMap<String, usize> = exp.checks.iter().map(|c| (c.clone(), 0)).collect();
    for o in &outputs {
        rec.write(out_dir.join(format!("trace-{}.txt", o.seed)), o.trace.as_bytes())?;
        let mut json = serde_json::to_string_pretty(&o.report)?;
        json.push('\n');
        rec.write(out_dir.join(format!("report-{}.json", o.seed)), json.as_bytes())?;
        for (c, &ok) in &o.verdicts {
            *passes.get_mut(c).expect("declared check") += ok as usize;
        }
    }
    let summary = ExperimentSummary {
        name: exp.name.clone(),
        experiment: exp.clone(),
        runs: outputs.len(),
        passed: passes.values().all(|&p| p == outputs.len()),
        passes,
    };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    rec.write(out_dir.join("summary.json"), json.as_bytes())?;
    Ok(summary)
}

/// Output directory: the explicit one, else the config's `out_dir`
/// (relative to the first config file), else `runs/<name>`.
pub fn resolve_out_dir(exp: &Experiment, explicit: Option<&Path>, config_file: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match (&exp.out_dir, config_file.and_then(Path::parent)) {
        (Some(d), Some(base)) => base.join(d),
        (Some(d), None) => PathBuf::from(d),
        (None, _) => PathBuf::from("runs").join(&exp.name),
    }
    .components()
    .collect::<PathBuf>()
}

pub fn load_experiment(path: &Path) -> Result<(Experiment, Vec<PathBuf>)> {
    let raw = crate::config::load(path).with_context(|| format!("loading {}", path.display()))?;
    Ok((Experiment::from_raw(&raw)?, raw.files))
}
