//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use anglemin::anglemin::{build_projector, insample_classify, ClassifierOutput, FittedClassifier, InsampleMode, Projector, ProjectorStrategy};
use anglemin::bench::{self, emit_results, Method, RealDataConfig, SimConfig};
use anglemin::io::{load_edge_list, load_labels, load_neighbor_list, EdgeList};
use anglemin::oracle::{b0_correctness, bound_report, check_regularity, population_angles, structural_cosines};
use anglemin::{BenchError, DcbmParams, EdgeVector, IngestError, LabelLayout, Network, NewNodeParams, Partition, Seed};

#[derive(Debug, Parser)]
#[command(name = "anglemin", version, about = "Classify new nodes into communities of a partially labeled network")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "ANGLEMIN_THREADS")]
    threads: Option<usize>,
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation sweep described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one new node.
    Predict {
        #[command(flatten)]
        data: DataArgs,
        /// Whitespace-separated ids of the existing nodes the new node links to.
        #[arg(long)]
        new_node: PathBuf,
        #[arg(long, value_enum, default_value_t = ClassifierArg::AngleminPlus)]
        method: ClassifierArg,
        #[arg(long, value_enum, default_value_t = ProjectorArg::Indicator)]
        projector: ProjectorArg,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Label every unlabeled node by leave-one-out classification.
    Insample {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = ProjectorArg::Indicator)]
        projector: ProjectorArg,
        /// Rebuild the projector for every node instead of sharing one.
        #[arg(long, alias = "strict-insample")]
        strict: bool,
        /// Label file with the true communities, to report accuracy.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Directory for predictions.tsv and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Cross-validated error on a labeled network.
    Realdata {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7])]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, value_enum, default_value_t = ProjectorArg::Indicator)]
        projector: ProjectorArg,
        #[arg(long)]
        out: PathBuf,
        /// Record fit and classify times in timings.csv.
        #[arg(long)]
        timing: bool,
    },
    /// Population-level diagnostics for a block model given as JSON.
    OracleCheck {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    edges: PathBuf,
    /// `node<TAB>community` lines, communities 1..=K.
    #[arg(long)]
    labels: PathBuf,
    /// Number of communities.
    #[arg(long)]
    k: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassifierArg {
    Anglemin,
    AngleminPlus,
    Subnetwork,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProjectorArg {
    Indicator,
    Degree,
    Spectral,
}

impl From<ProjectorArg> for ProjectorStrategy {
    fn from(p: ProjectorArg) -> Self {
        match p {
            ProjectorArg::Indicator => ProjectorStrategy::PartitionIndicator,
            ProjectorArg::Degree => ProjectorStrategy::DegreeWeightedPartition,
            ProjectorArg::Spectral => ProjectorStrategy::SpectralEmbedding,
        }
    }
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn runtime(message: impl ToString) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        let code = match e {
            BenchError::Config(_) | BenchError::Ingest(_) => 2,
            BenchError::TooManyFailures { .. } => 3,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<anglemin::ClassifyError> for Failure {
    fn from(e: anglemin::ClassifyError) -> Self {
        Failure::runtime(e)
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not set thread count: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Simulate { config, out } => simulate(config, out),
        Command::Predict {
            data,
            new_node,
            method,
            projector,
            json,
        } => predict(cli.seed, data, new_node, *method, (*projector).into(), *json),
        Command::Insample {
            data,
            projector,
            strict,
            truth,
            out,
            json,
        } => insample(cli.seed, data, (*projector).into(), *strict, truth.as_deref(), out.as_deref(), *json),
        Command::Realdata {
            data,
            fractions,
            folds,
            projector,
            out,
            timing,
        } => realdata(cli.seed, data, fractions, *folds, (*projector).into(), out, *timing),
        Command::OracleCheck { params, json } => oracle_check(params, *json),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_hash(path: &Path) -> Result<String, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

fn write_manifest(dir: &Path, command: &str, seed: u64, inputs: &[&Path], extra: serde_json::Value) -> Result<(), Failure> {
    let mut hashes = serde_json::Map::new();
    for p in inputs {
        hashes.insert(p.display().to_string(), json!(file_hash(p)?));
    }
    let manifest = json!({
        "command": command,
        "arguments": std::env::args().skip(1).collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "inputs_sha256": hashes,
        "details": extra,
    });
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("cannot create {}: {e}", dir.display())))
}

fn simulate(config: &Path, out: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(config).map_err(|e| Failure::usage(format!("cannot read config {}: {e}", config.display())))?;
    let cfg = SimConfig::from_json(&text)?;
    let outcome = bench::run_simulation(&cfg)?;
    emit_results(&outcome.records, out, cfg.timing)?;
    write_manifest(
        out,
        "simulate",
        cfg.seed,
        &[config],
        json!({
            "config_sha256": sha256_hex(text.as_bytes()),
            "config": cfg,
            "failed_repetitions": outcome.failed_repetitions,
        }),
    )?;
    eprintln!(
        "wrote {} rows to {} ({} failed repetitions)",
        outcome.records.len(),
        out.display(),
        outcome.failed_repetitions.len()
    );
    Ok(())
}

struct Loaded {
    edges: EdgeList,
    network: Network,
}

fn load_network(data: &DataArgs) -> Result<Loaded, Failure> {
    let edges = load_edge_list(&data.edges, None)?;
    let labels = load_labels(&data.labels, edges.id_base, edges.graph.n(), data.k)?;
    let network = Network::new(edges.graph.clone(), data.k, labels)?;
    Ok(Loaded { edges, network })
}

fn fmt_angles(angles: &[f64]) -> String {
    angles
        .iter()
        .map(|a| if a.is_nan() { "nan".to_string() } else { format!("{a:.6}") })
        .collect::<Vec<_>>()
        .join(" ")
}

fn output_json(out: &ClassifierOutput) -> serde_json::Value {
    json!({
        "label": out.label + 1,
        "angles": out.angles.iter().map(|a| if a.is_nan() { None } else { Some((a * 1e6).round() / 1e6) }).collect::<Vec<_>>(),
        "tie": out.tie,
        "fallback": out.fallback,
    })
}

fn predict(seed: u64, data: &DataArgs, new_node: &Path, method: ClassifierArg, strategy: ProjectorStrategy, as_json: bool) -> Result<(), Failure> {
    let loaded = load_network(data)?;
    let net = &loaded.network;
    let neighbors = load_neighbor_list(new_node, loaded.edges.id_base, net.n())?;
    let x = EdgeVector::from_neighbors(net.n(), neighbors)?;
    if x.is_empty() {
        log::warn!("the new node has no edges; its label falls back to community 1");
        eprintln!("warning: the new node has no edges; using the fallback label");
    }
    let fitted = match method {
        ClassifierArg::Anglemin => FittedClassifier::anglemin(net)?,
        ClassifierArg::Subnetwork => FittedClassifier::subnetwork(net)?,
        ClassifierArg::AngleminPlus => FittedClassifier::angleminplus(net, build_projector(net, strategy, Seed(seed))?)?,
    };
    let out = fitted.classify(&x)?;
    if out.fallback && !x.is_empty() {
        eprintln!("warning: no angle is defined for this node; using the majority label of its labeled neighbors");
    }
    if as_json {
        println!("{}", output_json(&out));
    } else {
        println!("label={}", out.label + 1);
        println!("angles={}", fmt_angles(&out.angles));
    }
    Ok(())
}

fn insample(
    seed: u64,
    data: &DataArgs,
    strategy: ProjectorStrategy,
    strict: bool,
    truth: Option<&Path>,
    out: Option<&Path>,
    as_json: bool,
) -> Result<(), Failure> {
    let loaded = load_network(data)?;
    let net = &loaded.network;
    let base = loaded.edges.id_base;
    let mode = if strict { InsampleMode::Strict } else { InsampleMode::Shared };
    let result = insample_classify(net, strategy, mode, Seed(seed))?;
    let accuracy = match truth {
        Some(path) => {
            let known = load_labels(path, base, net.n(), data.k)?;
            let mut truth_of = vec![None; net.n()];
            known.iter().for_each(|&(v, c)| truth_of[v] = Some(c));
            let scored: Vec<bool> = result
                .partition
                .nodes()
                .iter()
                .zip(result.partition.assignment())
                .filter_map(|(&v, &c)| truth_of[v].map(|t| t == c))
                .collect();
            if scored.is_empty() {
                None
            } else {
                Some(scored.iter().filter(|&&ok| ok).count() as f64 / scored.len() as f64)
            }
        }
        None => None,
    };
    let rows: Vec<(usize, usize)> = result
        .partition
        .nodes()
        .iter()
        .zip(result.partition.assignment())
        .map(|(&v, &c)| (base.external(v), c + 1))
        .collect();
    if as_json {
        println!(
            "{}",
            json!({
                "predictions": rows.iter().map(|(v, c)| json!({"node": v, "label": c})).collect::<Vec<_>>(),
                "fallback_nodes": result.fallback_nodes.iter().map(|&v| base.external(v)).collect::<Vec<_>>(),
                "accuracy": accuracy,
            })
        );
    } else {
        for (v, c) in &rows {
            println!("{v}\t{c}");
        }
        if let Some(a) = accuracy {
            println!("accuracy={a:.6}");
        }
    }
    if !result.fallback_nodes.is_empty() {
        eprintln!("{} node(s) used the fallback label", result.fallback_nodes.len());
    }
    if let Some(dir) = out {
        create_dir(dir)?;
        let text: String = rows.iter().map(|(v, c)| format!("{v}\t{c}\n")).collect();
        let path = dir.join("predictions.tsv");
        fs::write(&path, text).map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
        let mut inputs = vec![data.edges.as_path(), data.labels.as_path()];
        if let Some(t) = truth {
            inputs.push(t);
        }
        write_manifest(dir, "insample", seed, &inputs, json!({ "accuracy": accuracy, "strict": strict }))?;
    }
    Ok(())
}

fn realdata(
    seed: u64,
    data: &DataArgs,
    fractions: &[f64],
    folds: usize,
    strategy: ProjectorStrategy,
    out: &Path,
    timing: bool,
) -> Result<(), Failure> {
    let mut cfg = RealDataConfig::new(&data.edges, &data.labels, data.k);
    cfg.fractions = fractions.to_vec();
    cfg.folds = folds;
    cfg.seed = seed;
    cfg.projector = strategy;
    cfg.timing = timing;
    let records = bench::run_realdata(&cfg)?;
    emit_results(&records, out, timing)?;
    write_manifest(out, "realdata", seed, &[&data.edges, &data.labels], json!({ "config": cfg }))?;
    println!("fraction\tmethod\tmean_error\tsd_error");
    for row in bench::aggregate(&records) {
        println!("{}\t{}\t{:.4}\t{:.4}", row.config_id, row.method, row.mean_error, row.sd_error);
    }
    let fallbacks: usize = records.iter().filter(|r| r.method == Method::AngleMinPlus).map(|r| r.fallbacks).sum();
    if fallbacks > 0 {
        eprintln!("{fallbacks} test node(s) had no usable edges and used the fallback label");
    }
    Ok(())
}

/// Block-model description for `oracle-check`. Communities are 1-based;
/// nodes are positions in `theta`, starting at 0.
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct OracleInput {
    p: Vec<Vec<f64>>,
    theta: Vec<f64>,
    labels: Vec<usize>,
    /// Labeled nodes; every other node is unlabeled.
    #[serde(default)]
    labeled: Vec<usize>,
    theta_star: f64,
    /// Community of the new node.
    community: usize,
    /// Candidate communities of the unlabeled nodes, in node order, for the
    /// weighted misclustering report.
    #[serde(default)]
    partition: Option<Vec<usize>>,
    #[serde(default = "default_c1")]
    c1: f64,
    #[serde(default = "default_c2")]
    c2: f64,
    #[serde(default = "default_c3")]
    c3: f64,
}

fn default_c1() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    2.0
}
fn default_c3() -> f64 {
    0.1
}

fn one_based(values: &[usize], k: usize, what: &str) -> Result<Vec<usize>, Failure> {
    values
        .iter()
        .map(|&c| {
            if c >= 1 && c <= k {
                Ok(c - 1)
            } else {
                Err(Failure::usage(format!("{what} value {c} outside 1..={k}")))
            }
        })
        .collect()
}

fn oracle_check(path: &Path, as_json: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let input: OracleInput = serde_json::from_str(&text).map_err(|e| Failure::usage(e.to_string()))?;
    let k = input.p.len();
    if input.p.iter().any(|row| row.len() != k) {
        return Err(Failure::usage("p must be a square matrix"));
    }
    let p = DMatrix::from_fn(k, k, |a, b| input.p[a][b]);
    let labels = one_based(&input.labels, k, "labels")?;
    let params = DcbmParams::new(input.theta.clone(), labels.clone(), p).map_err(|e| Failure::usage(e.to_string()))?;
    let community = one_based(&[input.community], k, "community")?[0];
    let layout = LabelLayout::new(params.n(), k, input.labeled.iter().map(|&v| (v, labels.get(v).copied().unwrap_or(usize::MAX))).collect())?;
    let cosines = structural_cosines(&params);
    let unlabeled_truth: Vec<usize> = layout.unlabeled().iter().map(|&v| labels[v]).collect();
    let true_partition = Partition::new(layout.unlabeled().to_vec(), unlabeled_truth.clone(), k)?;
    let angles = if layout.labeled().is_empty() {
        None
    } else {
        Some(
            population_angles(&params, &NewNodeParams::new(input.theta_star, community), &layout, &Projector::from_partition(&true_partition))
                .map_err(Failure::runtime)?,
        )
    };
    let b0 = match &input.partition {
        Some(candidate) => {
            if candidate.len() != layout.unlabeled().len() {
                return Err(Failure::usage(format!(
                    "partition lists {} communities for {} unlabeled nodes",
                    candidate.len(),
                    layout.unlabeled().len()
                )));
            }
            let assignment = one_based(candidate, k, "partition")?;
            let part = Partition::new(layout.unlabeled().to_vec(), assignment, k)?;
            let theta_u: Vec<f64> = layout.unlabeled().iter().map(|&v| params.theta()[v]).collect();
            Some(b0_correctness(&part, &unlabeled_truth, &theta_u, params.theta_l1()))
        }
        None => None,
    };
    let bounds = bound_report(&params, input.theta_star, &layout);
    let violations = check_regularity(&params, &layout, input.c1, input.c2, input.c3);
    let cos_rows: Vec<Vec<f64>> = (0..k).map(|a| (0..k).map(|b| cosines[(a, b)]).collect()).collect();
    if as_json {
        println!(
            "{}",
            json!({
                "structural_cosines": cos_rows,
                "population_angles": angles,
                "b0": b0,
                "bounds": bounds,
                "regularity_violations": violations,
            })
        );
        return Ok(());
    }
    println!("structural cosines between communities:");
    for row in &cos_rows {
        println!("  {}", row.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(" "));
    }
    match &angles {
        Some(a) => {
            println!("population angles (true unlabeled partition): {}", fmt_angles(&a.psi));
            println!("direct computation:                           {}", fmt_angles(&a.psi_direct));
        }
        None => println!("population angles: skipped (no labeled nodes)"),
    }
    if let Some(r) = &b0 {
        println!(
            "b0={:.6} best_permutation={}",
            r.b0,
            r.best_permutation.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(",")
        );
    }
    println!("beta_n={:.6}", bounds.beta_n);
    println!(
        "misclassification exponents: {}",
        bounds.misclassification_exponents.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>().join(" ")
    );
    println!("ideal exponent={:.6} anglemin+ exponent={:.6} ratio={:.6}", bounds.ideal_exponent, bounds.angleminplus_exponent, bounds.base_ratio);
    if violations.is_empty() {
        println!("regularity: all conditions hold");
    } else {
        for v in &violations {
            println!("regularity violated: {v:?}");
        }
    }
    Ok(())
}
