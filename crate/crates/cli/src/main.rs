use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decomposition::{build_topology, TopologySpec};
use graph_core::{
    arborescences_from_json, arborescences_to_json, graph_from_json, graph_to_json, to_dot,
    ArborescenceSet, FailureSet, MultiGraph,
};
use routing_schemes::{compile, CompiledScheme, ResetRule, SchemeConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use simulator::Outcome;
use verifier::{
    check_resilience_with_ceiling, impossibility_suite, switch_bound_report, Mode,
    VerdictResult, VerifierError, DEFAULT_SCENARIO_CEILING,
};

const EXIT_OK: u8 = 0;
const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "arbroute", version, about = "Failover routing experiment runner")]
struct Cli {
    /// Fan scenario work across this many worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write a manifest describing this run to the given path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named topology together with its arborescences.
    Gen {
        #[command(subcommand)]
        spec: GenSpec,
    },
    /// Decompose a graph into k arc-disjoint spanning arborescences.
    Decompose {
        graph: PathBuf,
        #[arg(short)]
        k: usize,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a resilience claim over every failure set up to a size.
    Check {
        bundle: Option<PathBuf>,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        resilience: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        adversarial: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SCENARIO_CEILING)]
        ceiling: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one routing experiment under a fixed failure set.
    Sim {
        bundle: Option<PathBuf>,
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Failed edges by external id, comma separated.
        #[arg(long, value_delimiter = ',')]
        failures: Vec<i64>,
        #[arg(long)]
        source: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = simulator::DEFAULT_STEP_BUDGET)]
        budget: usize,
        /// Include the full hop-by-hop trace in the summary.
        #[arg(long)]
        trace: bool,
    },
    /// Compare empirical switch counts against their analytic ceilings.
    Bench {
        #[command(subcommand)]
        which: BenchArg,
    },
    /// Reproduce the small-gadget impossibility results.
    Impossibility,
    /// Re-run a counterexample bundle and confirm its recorded outcome.
    Replay { bundle: PathBuf },
    /// Render a bundle as Graphviz DOT or normalized JSON.
    Export {
        #[arg(value_enum)]
        format: ExportFormat,
        bundle: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenSpec {
    Clique {
        #[arg(short)]
        k: usize,
    },
    Bipartite {
        #[arg(short)]
        a: usize,
        #[arg(short)]
        b: usize,
    },
    Hypercube {
        #[arg(short)]
        i: usize,
        #[arg(short)]
        k: usize,
    },
    Clos {
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        ports: usize,
    },
    Torus {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        m: usize,
    },
    NeverBounce {
        #[arg(short)]
        k: usize,
        #[arg(long)]
        ring: Option<usize>,
    },
    CubeGadget,
}

#[derive(Args)]
struct SchemeArgs {
    /// Scheme name (circular, plus-one, df-algo, bounced-rand, dup-even,
    /// dup-odd) or a path to a scheme configuration JSON file.
    #[arg(long)]
    scheme: String,
    /// Re-sample probability for bounced-rand.
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long)]
    pure_resample: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum BenchArg {
    /// Monte Carlo check of the switch-count ceiling U(q).
    SwitchBound {
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(short)]
        f: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean switch counts on the gadget that never rewards bouncing.
    NeverBounce {
        #[arg(short)]
        k: usize,
        #[arg(long)]
        ring: Option<usize>,
        #[arg(long, default_value_t = 0.3)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

/// The pipe format shared by every subcommand: a graph, usually its
/// arborescences, and optionally a recorded scenario to replay.
#[derive(Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct Bundle {
    graph: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arborescences: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    promised_resilience: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resets: Option<Vec<ResetRule>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<SchemeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    failures: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome: Option<String>,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: Vec<String>,
    seed: u64,
    version: &'static str,
    input_digests: BTreeMap<String, String>,
    output_digest: String,
}

struct Run {
    exit: u8,
    /// The summary printed on stdout.
    summary: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Infeasible(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) => write!(f, "{m}"),
        }
    }
}

/// Prints to stdout, exiting quietly when the reader went away (e.g. a
/// downstream `head` in a pipe).
fn print_out(summary: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if writeln!(out, "{summary}").is_err() {
        std::process::exit(i32::from(EXIT_OK));
    }
}

fn fnv64(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn read_json(path: Option<&Path>) -> Result<(Value, String, Vec<u8>), CliError> {
    let (name, bytes) = match path {
        Some(p) => (
            p.display().to_string(),
            std::fs::read(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        ),
        None => {
            let mut buf = Vec::new();
            std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
                .map_err(|e| CliError::Usage(format!("stdin: {e}")))?;
            ("stdin".to_string(), buf)
        }
    };
    let value = serde_json::from_slice(&bytes).map_err(|e| {
        CliError::Usage(format!(
            "{name}: malformed JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    Ok((value, name, bytes))
}

fn load_bundle(
    path: Option<&Path>,
    digests: &mut BTreeMap<String, String>,
) -> Result<Bundle, CliError> {
    let (value, name, bytes) = read_json(path)?;
    digests.insert(name.clone(), fnv64(&bytes));
    // `check` failure output wraps the bundle next to the verdict.
    let value = match value.get("bundle") {
        Some(inner) => inner.clone(),
        None => value,
    };
    if value.get("graph").is_some() {
        serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{name}: {e}")))
    } else {
        Ok(Bundle {
            graph: value,
            ..Bundle::default()
        })
    }
}

fn graph_and_trees(bundle: &Bundle) -> Result<(MultiGraph, ArborescenceSet), CliError> {
    let g = graph_from_json(&bundle.graph).map_err(|e| CliError::Usage(e.to_string()))?;
    let arbs = bundle
        .arborescences
        .as_ref()
        .ok_or_else(|| CliError::Usage("bundle has no arborescences; run decompose".into()))?;
    let t = arborescences_from_json(&g, arbs).map_err(|e| CliError::Usage(e.to_string()))?;
    let problems = graph_core::validate_arborescence_set(&g, &t);
    if !problems.is_empty() {
        return Err(CliError::Usage(format!(
            "invalid arborescence set: {problems:?}"
        )));
    }
    Ok((g, t))
}

fn scheme_config(
    args: &SchemeArgs,
    k: usize,
    resets: Option<&Vec<ResetRule>>,
) -> Result<SchemeConfig, CliError> {
    Ok(match args.scheme.as_str() {
        "circular" => SchemeConfig::Circular {
            ordering: (0..k).collect(),
            start: None,
            resets: resets.cloned(),
        },
        "plus-one" => SchemeConfig::PlusOne { ordering: None },
        "df-algo" => SchemeConfig::DfAlgo,
        "bounced-rand" => SchemeConfig::BouncedRand {
            q: args.q,
            pure_resample: args.pure_resample,
        },
        "dup-even" => {
            if k % 2 != 0 {
                return Err(CliError::Usage(format!(
                    "dup-even needs an even number of arborescences, got {k}"
                )));
            }
            SchemeConfig::DupEven { s: k / 2 }
        }
        "dup-odd" => {
            if k % 2 != 1 {
                return Err(CliError::Usage(format!(
                    "dup-odd needs an odd number of arborescences, got {k}"
                )));
            }
            SchemeConfig::DupOdd { k: k / 2 }
        }
        path => {
            let (value, name, _) = read_json(Some(Path::new(path)))?;
            serde_json::from_value(value).map_err(|e| CliError::Usage(format!("{name}: {e}")))?
        }
    })
}

fn compiled(
    g: &MultiGraph,
    t: &ArborescenceSet,
    config: &SchemeConfig,
) -> Result<CompiledScheme, CliError> {
    compile(g, t, config).map_err(|e| CliError::Usage(e.to_string()))
}

fn failure_set(g: &MultiGraph, ids: &[i64]) -> Result<FailureSet, CliError> {
    let mut edges = Vec::new();
    for &id in ids {
        edges.push(
            g.edge_by_external_id(id)
                .ok_or_else(|| CliError::Usage(format!("unknown edge id {id}")))?,
        );
    }
    Ok(FailureSet::from_edges(g.edge_count(), edges))
}

fn topology_bundle(spec: &TopologySpec) -> Result<Bundle, CliError> {
    let topo = build_topology(spec).map_err(|e| CliError::Infeasible(e.to_string()))?;
    let resets: Vec<ResetRule> = {
        let mut rules: Vec<ResetRule> = topo
            .reset
            .iter()
            .map(|(arc, &target)| ResetRule {
                edge: topo.graph.external_id(arc.edge),
                tail: topo.graph.label(arc.tail).to_string(),
                target,
            })
            .collect();
        rules.sort_by(|a, b| (a.edge, &a.tail).cmp(&(b.edge, &b.tail)));
        rules
    };
    Ok(Bundle {
        graph: graph_to_json(&topo.graph),
        arborescences: Some(arborescences_to_json(&topo.graph, &topo.set)),
        promised_resilience: Some(topo.promised_resilience),
        resets: (!resets.is_empty()).then_some(resets),
        ..Bundle::default()
    })
}

fn emit(out: Option<&Path>, summary: &str) -> Result<(), CliError> {
    if let Some(path) = out {
        std::fs::write(path, summary)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    print_out(&summary);
    Ok(())
}

fn run(cli: &Cli, digests: &mut BTreeMap<String, String>) -> Result<Run, CliError> {
    match &cli.command {
        Command::Gen { spec } => {
            let spec = match *spec {
                GenSpec::Clique { k } => TopologySpec::Clique { k },
                GenSpec::Bipartite { a, b } => TopologySpec::CompleteBipartite { a, b },
                GenSpec::Hypercube { i, k } => TopologySpec::GeneralizedHypercube { i, k },
                GenSpec::Clos { layers, ports } => TopologySpec::Clos { layers, ports },
                GenSpec::Torus { n, m } => TopologySpec::TorusGrid { n, m },
                GenSpec::NeverBounce { k, ring } => TopologySpec::NeverBounceGadget { k, ring },
                GenSpec::CubeGadget => TopologySpec::CubeGadget,
            };
            let bundle = topology_bundle(&spec)?;
            let summary = serde_json::to_string_pretty(&bundle).expect("serializable");
            print_out(&summary);
            Ok(Run {
                exit: EXIT_OK,
                summary,
            })
        }
        Command::Decompose {
            graph,
            k,
            budget,
            out,
        } => {
            let (value, name, bytes) = read_json(Some(graph))?;
            digests.insert(name, fnv64(&bytes));
            let value = match value.get("graph") {
                Some(inner) => inner.clone(),
                None => value,
            };
            let g = graph_from_json(&value).map_err(|e| CliError::Usage(e.to_string()))?;
            let set = decomposition::decompose_with_budget(
                &g,
                *k,
                budget.unwrap_or(decomposition::DEFAULT_BUDGET),
            )
            .map_err(|e| CliError::Infeasible(e.to_string()))?;
            let bundle = Bundle {
                graph: graph_to_json(&g),
                arborescences: Some(arborescences_to_json(&g, &set)),
                ..Bundle::default()
            };
            let summary = serde_json::to_string_pretty(&bundle).expect("serializable");
            emit(out.as_deref(), &summary)?;
            Ok(Run {
                exit: EXIT_OK,
                summary,
            })
        }
        Command::Check {
            bundle,
            scheme,
            resilience,
            mode,
            samples,
            adversarial,
            seed,
            ceiling,
            out,
        } => {
            let bundle = load_bundle(bundle.as_deref(), digests)?;
            let (g, t) = graph_and_trees(&bundle)?;
            let config = scheme_config(scheme, t.k(), bundle.resets.as_ref())?;
            let compiled = compiled(&g, &t, &config)?;
            let mode = match mode {
                ModeArg::Exhaustive => Mode::Exhaustive,
                ModeArg::Sampled => Mode::Sampled {
                    samples: *samples,
                    seed: *seed,
                    adversarial: *adversarial,
                },
            };
            let verdict =
                check_resilience_with_ceiling(&g, &t, &compiled, *resilience, mode, *ceiling)
                    .map_err(|e| match e {
                        VerifierError::TooLarge { .. } => CliError::Infeasible(e.to_string()),
                        other => CliError::Usage(other.to_string()),
                    })?;
            let (exit, report) = match &verdict.result {
                VerdictResult::Holds => (
                    EXIT_OK,
                    serde_json::json!({ "verdict": verdict }),
                ),
                VerdictResult::Fails { counterexample } => {
                    let replay = Bundle {
                        graph: bundle.graph.clone(),
                        arborescences: bundle.arborescences.clone(),
                        resets: bundle.resets.clone(),
                        scheme: Some(config.clone()),
                        failures: Some(counterexample.failed_edges.clone()),
                        source: Some(counterexample.source.clone()),
                        outcome: Some("non-delivery".into()),
                        ..Bundle::default()
                    };
                    (
                        EXIT_COUNTEREXAMPLE,
                        serde_json::json!({ "verdict": verdict, "bundle": replay }),
                    )
                }
            };
            let summary = serde_json::to_string_pretty(&report).expect("serializable");
            emit(out.as_deref(), &summary)?;
            Ok(Run { exit, summary })
        }
        Command::Sim {
            bundle,
            scheme,
            failures,
            source,
            seed,
            trials,
            budget,
            trace,
        } => {
            let bundle = load_bundle(bundle.as_deref(), digests)?;
            let (g, t) = graph_and_trees(&bundle)?;
            let config = scheme_config(scheme, t.k(), bundle.resets.as_ref())?;
            let compiled = compiled(&g, &t, &config)?;
            let f = failure_set(&g, failures)?;
            let src = g
                .vertex_by_label(source)
                .ok_or_else(|| CliError::Usage(format!("unknown vertex {source:?}")))?;
            let (exit, summary) = simulate(&g, &t, &compiled, &f, src, *seed, *trials, *budget, *trace)?;
            print_out(&summary);
            Ok(Run { exit, summary })
        }
        Command::Bench { which } => {
            let (exit, summary) = bench(which, digests)?;
            print_out(&summary);
            Ok(Run { exit, summary })
        }
        Command::Impossibility => {
            let report = impossibility_suite().map_err(|e| CliError::Usage(e.to_string()))?;
            let passed = report.passed();
            let summary = serde_json::to_string_pretty(&serde_json::json!({
                "report": report,
                "headline": format!(
                    "{}/{} assignments fail",
                    report.doomed_assignments, report.orientation_assignments
                ),
            }))
            .expect("serializable");
            print_out(&summary);
            Ok(Run {
                exit: if passed { EXIT_OK } else { EXIT_COUNTEREXAMPLE },
                summary,
            })
        }
        Command::Replay { bundle } => {
            let bundle = load_bundle(Some(bundle), digests)?;
            let (g, t) = graph_and_trees(&bundle)?;
            let config = bundle
                .scheme
                .clone()
                .ok_or_else(|| CliError::Usage("bundle records no scheme".into()))?;
            let compiled = compiled(&g, &t, &config)?;
            let f = failure_set(&g, bundle.failures.as_deref().unwrap_or(&[]))?;
            let source_label = bundle
                .source
                .as_ref()
                .ok_or_else(|| CliError::Usage("bundle records no source".into()))?;
            let src = g
                .vertex_by_label(source_label)
                .ok_or_else(|| CliError::Usage(format!("unknown vertex {source_label:?}")))?;
            let (exit, summary) = simulate(
                &g,
                &t,
                &compiled,
                &f,
                src,
                0,
                1,
                simulator::DEFAULT_STEP_BUDGET,
                false,
            )?;
            print_out(&summary);
            Ok(Run { exit, summary })
        }
        Command::Export { format, bundle } => {
            let bundle = load_bundle(bundle.as_deref(), digests)?;
            let summary = match format {
                ExportFormat::Json => {
                    serde_json::to_string_pretty(&bundle).expect("serializable")
                }
                ExportFormat::Dot => {
                    let g = graph_from_json(&bundle.graph)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    let t = bundle
                        .arborescences
                        .as_ref()
                        .map(|v| arborescences_from_json(&g, v))
                        .transpose()
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    to_dot(&g, t.as_ref())
                }
            };
            print_out(&summary);
            Ok(Run {
                exit: EXIT_OK,
                summary,
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    f: &FailureSet,
    src: graph_core::VertexId,
    seed: u64,
    trials: usize,
    budget: usize,
    with_trace: bool,
) -> Result<(u8, String), CliError> {
    if let CompiledScheme::BouncedRand { q, pure_resample } = scheme {
        let stats = simulator::run_randomized_with_budget(
            g,
            t,
            *q,
            *pure_resample,
            f,
            src,
            trials.max(1),
            seed,
            budget,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let exit = if stats.delivery_rate == 1.0 {
            EXIT_OK
        } else {
            EXIT_COUNTEREXAMPLE
        };
        let summary =
            serde_json::to_string_pretty(&serde_json::json!({ "statistics": stats }))
                .expect("serializable");
        return Ok((exit, summary));
    }
    let trace = if scheme.is_duplicating() {
        simulator::run_duplication(g, t, scheme, f, src)
    } else {
        simulator::run_deterministic(g, t, scheme, f, src)
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let exit = match trace.outcome {
        Outcome::Delivered => EXIT_OK,
        Outcome::Loop | Outcome::Dropped => EXIT_COUNTEREXAMPLE,
        Outcome::BudgetExceeded => EXIT_INFEASIBLE,
    };
    let mut doc = serde_json::json!({
        "outcome": trace.outcome,
        "hops": trace.hops,
        "switches": trace.switches,
        "copies": trace.copies,
    });
    if with_trace {
        doc["path"] = serde_json::to_value(&trace.path).expect("serializable");
    }
    Ok((exit, serde_json::to_string_pretty(&doc).expect("serializable")))
}

fn bench(
    which: &BenchArg,
    digests: &mut BTreeMap<String, String>,
) -> Result<(u8, String), CliError> {
    match which {
        BenchArg::SwitchBound {
            bundle,
            q,
            f,
            trials,
            seed,
        } => {
            let bundle = load_bundle(bundle.as_deref(), digests)?;
            let (g, t) = graph_and_trees(&bundle)?;
            let report = switch_bound_report(&g, &t, *q, *f, *trials, *seed).map_err(|e| {
                match e {
                    VerifierError::TooManyFailures { .. } => CliError::Usage(e.to_string()),
                    other => CliError::Infeasible(other.to_string()),
                }
            })?;
            let exit = if report.violation {
                EXIT_COUNTEREXAMPLE
            } else {
                EXIT_OK
            };
            Ok((
                exit,
                serde_json::to_string_pretty(&serde_json::json!({ "switch-bound": report }))
                    .expect("serializable"),
            ))
        }
        BenchArg::NeverBounce {
            k,
            ring,
            q,
            trials,
            seed,
        } => {
            let topo = build_topology(&TopologySpec::NeverBounceGadget { k: *k, ring: *ring })
                .map_err(|e| CliError::Infeasible(e.to_string()))?;
            let bench = topo
                .bench
                .as_ref()
                .expect("gadget ships its benchmark scenario");
            let failures =
                FailureSet::from_edges(topo.graph.edge_count(), bench.failures.iter().copied());
            let pure = simulator::run_randomized(
                &topo.graph,
                &topo.set,
                0.5,
                true,
                &failures,
                bench.source,
                *trials,
                *seed,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let bounced = simulator::run_randomized(
                &topo.graph,
                &topo.set,
                *q,
                false,
                &failures,
                bench.source,
                *trials,
                *seed,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let target = ((*k - 1) * (*k - 1)) as f64;
            let doc = serde_json::json!({
                "never-bounce": {
                    "k": k,
                    "resample-mean-target": target,
                    "pure-resample": pure,
                    "bounced": bounced,
                }
            });
            Ok((
                EXIT_OK,
                serde_json::to_string_pretty(&doc).expect("serializable"),
            ))
        }
    }
}

fn seed_of(cli: &Cli) -> u64 {
    match &cli.command {
        Command::Check { seed, .. } | Command::Sim { seed, .. } => *seed,
        Command::Bench { which } => match which {
            BenchArg::SwitchBound { seed, .. } | BenchArg::NeverBounce { seed, .. } => *seed,
        },
        _ => 0,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let mut digests = BTreeMap::new();
    match run(&cli, &mut digests) {
        Ok(outcome) => {
            if let Some(path) = &cli.manifest {
                let manifest = RunManifest {
                    command: std::env::args().nth(1).unwrap_or_default(),
                    parameters: std::env::args().skip(1).collect(),
                    seed: seed_of(&cli),
                    version: env!("CARGO_PKG_VERSION"),
                    input_digests: digests,
                    output_digest: fnv64(outcome.summary.as_bytes()),
                };
                let text = serde_json::to_string_pretty(&manifest).expect("serializable");
                if std::fs::write(path, text).is_err() {
                    eprintln!("could not write manifest to {}", path.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            ExitCode::from(outcome.exit)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}
