//! Simulation and cross-validation experiments.
//!
//! A simulation repetition draws one block model, one network and a fixed
//! stream of new nodes; every labeled-set size and every method is evaluated
//! on that same draw, so methods can be compared pairwise. The real-data
//! protocol holds out one fold at a time and classifies each held-out node
//! as a new node joining the remaining network.

mod output;
pub mod stats;

pub use output::{aggregate, aggregate_csv, curve_dat, emit_results, results_csv, timings_csv, AggregateRow};

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use rand_distr::{Gamma, Pareto};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anglemin::{build_projector, FittedClassifier, ProjectorStrategy};
use crate::error::{BenchError, ClassifyError};
use crate::graph::{EdgeVector, Graph, Network};
use crate::io::{load_edge_list, load_labels, split_folds};
use crate::model::{DcbmParams, NewNodeParams};
use crate::oracle::{best_permutation_exhaustive, best_permutation_hungarian, IdealClassifier, EXHAUSTIVE_MAX_K};
use crate::rng::Seed;
use crate::spectral::{score_plus, ScorePlusConfig};

/// Smallest and largest degree parameter kept after drawing.
pub const THETA_FLOOR: f64 = 1e-4;
pub const THETA_CEIL: f64 = 1.0;
/// Attempts at drawing a labeled set that covers every community.
pub const LABEL_RETRY_CAP: usize = 1000;
/// Share of failed repetitions above which a run is aborted.
pub const MAX_FAILURE_SHARE: f64 = 0.1;

/// Distribution of the degree parameters before truncation to
/// `[THETA_FLOOR, THETA_CEIL]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaLaw {
    /// `n^{-1/2} sqrt(log n) Gamma(3.5, 1)`.
    GammaSparse,
    /// `n^{-1/4} Gamma(3.5, 1)`.
    GammaDense,
    /// `n^{-1/2} sqrt(log n) Pareto(min 1, tail 3.5)`.
    ParetoSparse,
    /// `n^{-1/4} Pareto(min 1, tail 3.5)`.
    ParetoDense,
}

impl ThetaLaw {
    pub fn scale(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            ThetaLaw::GammaSparse | ThetaLaw::ParetoSparse => n.powf(-0.5) * n.ln().sqrt(),
            ThetaLaw::GammaDense | ThetaLaw::ParetoDense => n.powf(-0.25),
        }
    }

    pub fn sample(self, n: usize, count: usize, rng: &mut crate::rng::Rng) -> Vec<f64> {
        let scale = self.scale(n);
        let raw: Vec<f64> = match self {
            ThetaLaw::GammaSparse | ThetaLaw::GammaDense => {
                let d = Gamma::new(3.5, 1.0).expect("valid gamma parameters");
                (0..count).map(|_| d.sample(rng)).collect()
            }
            ThetaLaw::ParetoSparse | ThetaLaw::ParetoDense => {
                let d = Pareto::new(1.0, 3.5).expect("valid pareto parameters");
                (0..count).map(|_| d.sample(rng)).collect()
            }
        };
        raw.into_iter()
            .map(|x| (scale * x).clamp(THETA_FLOOR, THETA_CEIL))
            .collect()
    }
}

/// Community proportions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// Equal weights.
    Balanced,
    /// Weights proportional to `(1, ..., 1, 3)`; `(0.2, 0.2, 0.6)` for `K = 3`.
    Imbalanced,
}

impl Balance {
    pub fn weights(self, k: usize) -> Vec<f64> {
        let mut w = vec![1.0; k];
        if self == Balance::Imbalanced {
            w[k - 1] = 3.0;
        }
        let total: f64 = w.iter().sum();
        w.iter().map(|x| x / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "anglemin")]
    AngleMin,
    #[serde(rename = "anglemin_plus")]
    AngleMinPlus,
    #[serde(rename = "anglemin_plus_subnetwork")]
    AngleMinPlusSubnetwork,
    /// SCORE+ on the network with the new nodes attached, ignoring labels.
    ScorePlusOnly,
    /// Likelihood rule with every parameter known.
    Ideal,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::AngleMin,
        Method::AngleMinPlus,
        Method::AngleMinPlusSubnetwork,
        Method::ScorePlusOnly,
        Method::Ideal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AngleMin => "anglemin",
            Method::AngleMinPlus => "anglemin_plus",
            Method::AngleMinPlusSubnetwork => "anglemin_plus_subnetwork",
            Method::ScorePlusOnly => "score_plus_only",
            Method::Ideal => "ideal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn default_new_nodes() -> usize {
    50
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_projector() -> ProjectorStrategy {
    ProjectorStrategy::PartitionIndicator
}

/// A simulation sweep. Read from JSON with the same field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub config_id: String,
    pub n: usize,
    pub k: usize,
    pub theta_law: ThetaLaw,
    pub balance: Balance,
    /// Labeled-set sizes to evaluate.
    pub n_labeled: Vec<usize>,
    pub repetitions: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub seed: u64,
    /// New nodes classified per repetition.
    #[serde(default = "default_new_nodes")]
    pub new_nodes: usize,
    /// Fixed off-diagonal entries of `P`, upper triangle in row order. When
    /// absent they are drawn from `Uniform(0, 1)` per repetition.
    #[serde(default)]
    pub p_offdiag: Option<Vec<f64>>,
    #[serde(default = "default_projector")]
    pub projector: ProjectorStrategy,
    /// Record wall-clock times; off by default so reruns are byte-identical.
    #[serde(default)]
    pub timing: bool,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, BenchError> {
    Err(BenchError::Config(msg.into()))
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: SimConfig = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.config_id.is_empty() || !self.config_id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return config_err("config_id must be non-empty and use only letters, digits, '_' or '-'");
        }
        if self.k < 2 {
            return config_err("k must be at least 2");
        }
        if self.n < 2 * self.k {
            return config_err(format!("n = {} is too small for k = {}", self.n, self.k));
        }
        if self.n_labeled.is_empty() {
            return config_err("n_labeled must list at least one size");
        }
        if let Some(&bad) = self.n_labeled.iter().find(|&&l| l < self.k || l + self.k > self.n) {
            return config_err(format!(
                "n_labeled value {bad} must lie in {}..={}",
                self.k,
                self.n - self.k
            ));
        }
        if self.repetitions == 0 {
            return config_err("repetitions must be at least 1");
        }
        if self.methods.is_empty() {
            return config_err("methods must list at least one method");
        }
        if self.new_nodes == 0 {
            return config_err("new_nodes must be at least 1");
        }
        if let Some(off) = &self.p_offdiag {
            let want = self.k * (self.k - 1) / 2;
            if off.len() != want {
                return config_err(format!("p_offdiag needs {want} entries, got {}", off.len()));
            }
            if off.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return config_err("p_offdiag entries must be finite and nonnegative");
            }
        }
        if self.projector == ProjectorStrategy::Custom {
            return config_err("projector must be partition_indicator, degree_weighted_partition or spectral_embedding");
        }
        Ok(())
    }
}

/// One simulated repetition: parameters, the observed network and the
/// new nodes to classify.
#[derive(Debug, Clone)]
pub struct SimInstance {
    pub params: DcbmParams,
    pub graph: Graph,
    pub new_nodes: Vec<(NewNodeParams, EdgeVector)>,
    /// Global factor applied to `θ` to keep every edge probability at most 1.
    pub theta_rescale: f64,
}

const TAG_INSTANCE: u64 = 0;
const TAG_LABELS: u64 = 1;
const TAG_METHODS: u64 = 2;

fn draw_labels(weights: &[f64], count: usize, rng: &mut crate::rng::Rng) -> Result<Vec<usize>, BenchError> {
    let dist = WeightedIndex::new(weights).map_err(|e| BenchError::Config(e.to_string()))?;
    for _ in 0..LABEL_RETRY_CAP {
        let labels: Vec<usize> = (0..count).map(|_| dist.sample(rng)).collect();
        let mut seen = vec![false; weights.len()];
        labels.iter().for_each(|&c| seen[c] = true);
        if seen.iter().all(|&s| s) {
            return Ok(labels);
        }
    }
    config_err(format!("could not draw {count} nodes covering all {} communities", weights.len()))
}

pub fn gen_sim_instance(cfg: &SimConfig, rep: usize) -> Result<SimInstance, BenchError> {
    cfg.validate()?;
    let seed = Seed(cfg.seed).derive2(rep as u64, TAG_INSTANCE);
    let k = cfg.k;
    let mut rng = seed.derive(0).rng();
    let mut p = DMatrix::identity(k, k);
    let mut fixed = cfg.p_offdiag.as_ref().map(|v| v.iter());
    for a in 0..k {
        for b in (a + 1)..k {
            let v = match fixed.as_mut() {
                Some(it) => *it.next().expect("length validated"),
                None => rng.random::<f64>(),
            };
            p[(a, b)] = v;
            p[(b, a)] = v;
        }
    }
    let weights = cfg.balance.weights(k);
    let labels = draw_labels(&weights, cfg.n, &mut seed.derive(1).rng())?;
    let mut theta = cfg.theta_law.sample(cfg.n, cfg.n, &mut seed.derive(2).rng());

    let mut theta_rescale = 1.0;
    let probe = DcbmParams::new(theta.clone(), labels.clone(), p.clone());
    let params = match probe {
        Ok(params) => params,
        Err(_) => {
            // Validity can only fail through an edge probability above 1.
            let max_offdiag = max_offdiag_omega(&theta, &labels, &p);
            theta_rescale = 1.0 / max_offdiag.sqrt();
            log::info!("rescaling theta by {theta_rescale} to keep edge probabilities at most 1");
            theta.iter_mut().for_each(|t| *t *= theta_rescale);
            DcbmParams::new(theta, labels, p)?
        }
    };
    let graph = params.sample_network(seed.derive(3));

    let mut node_rng = seed.derive(4).rng();
    let dist = WeightedIndex::new(&weights).map_err(|e| BenchError::Config(e.to_string()))?;
    let mut new_nodes = Vec::with_capacity(cfg.new_nodes);
    for t in 0..cfg.new_nodes {
        let community = dist.sample(&mut node_rng);
        let theta_star = cfg.theta_law.sample(cfg.n, 1, &mut node_rng)[0] * theta_rescale;
        let node = NewNodeParams::new(theta_star, community);
        let x = params.sample_new_node(&node, seed.derive2(5, t as u64))?;
        new_nodes.push((node, x));
    }
    Ok(SimInstance {
        params,
        graph,
        new_nodes,
        theta_rescale,
    })
}

fn max_offdiag_omega(theta: &[f64], labels: &[usize], p: &DMatrix<f64>) -> f64 {
    let mut max = 0.0f64;
    for i in 0..theta.len() {
        for j in (i + 1)..theta.len() {
            max = max.max(theta[i] * theta[j] * p[(labels[i], labels[j])]);
        }
    }
    max
}

/// Uniform labeled set of the given size covering every community, as
/// `(node, community)` pairs.
pub fn draw_labeled_set(truth: &[usize], k: usize, size: usize, seed: Seed) -> Result<Vec<(usize, usize)>, BenchError> {
    if size > truth.len() {
        return config_err(format!("cannot label {size} of {} nodes", truth.len()));
    }
    let mut rng = seed.rng();
    for _ in 0..LABEL_RETRY_CAP {
        let picked = rand::seq::index::sample(&mut rng, truth.len(), size).into_vec();
        let mut seen = vec![false; k];
        picked.iter().for_each(|&v| seen[truth[v]] = true);
        if seen.iter().all(|&s| s) {
            let mut pairs: Vec<(usize, usize)> = picked.into_iter().map(|v| (v, truth[v])).collect();
            pairs.sort_unstable();
            return Ok(pairs);
        }
    }
    config_err(format!(
        "no labeled set of size {size} covering all {k} communities after {LABEL_RETRY_CAP} draws"
    ))
}

/// One evaluated (method, configuration, labeled size, repetition) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub config_id: String,
    pub n_labeled: usize,
    pub repetition: usize,
    pub error_rate: f64,
    /// Classification time in milliseconds (0 when timing is off).
    pub runtime_ms: f64,
    /// Fitting time in milliseconds (0 when timing is off).
    pub fit_ms: f64,
    /// `(predicted, true)` community per evaluated node.
    pub outcomes: Vec<(usize, usize)>,
    /// Nodes labeled by the majority-neighbor fallback.
    pub fallbacks: usize,
}

impl RunRecord {
    /// Sum over communities of the per-community error rate.
    pub fn risk(&self, k: usize) -> Option<f64> {
        crate::oracle::risk(&self.outcomes, k)
    }
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub records: Vec<RunRecord>,
    pub failed_repetitions: Vec<usize>,
}

struct Timer {
    enabled: bool,
}

impl Timer {
    fn run<T>(&self, f: impl FnOnce() -> T) -> (T, f64) {
        if !self.enabled {
            return (f(), 0.0);
        }
        let start = Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64() * 1e3)
    }
}

fn error_rate(outcomes: &[(usize, usize)]) -> f64 {
    outcomes.iter().filter(|(p, t)| p != t).count() as f64 / outcomes.len() as f64
}

/// Label matching that maximizes agreement with `truth`.
fn match_labels(assignment: &[usize], truth: &[usize], k: usize) -> Vec<usize> {
    let mut weight = vec![vec![0.0; k]; k];
    for (&e, &t) in assignment.iter().zip(truth) {
        weight[e][t] += 1.0;
    }
    if k <= EXHAUSTIVE_MAX_K {
        best_permutation_exhaustive(&weight)
    } else {
        best_permutation_hungarian(&weight)
    }
}

fn score_plus_only(inst: &SimInstance, k: usize, seed: Seed) -> Result<Vec<(usize, usize)>, ClassifyError> {
    let n = inst.graph.n();
    let mut edges: Vec<(usize, usize)> = inst.graph.edges().collect();
    for (t, (_, x)) in inst.new_nodes.iter().enumerate() {
        edges.extend(x.neighbors().iter().map(|&j| (j, n + t)));
    }
    let (augmented, _) = Graph::from_edges(n + inst.new_nodes.len(), edges);
    let res = score_plus(&augmented, &ScorePlusConfig::new(k), seed)?;
    let mut truth = inst.params.labels().to_vec();
    truth.extend(inst.new_nodes.iter().map(|(node, _)| node.community));
    let perm = match_labels(res.partition.assignment(), &truth, k);
    Ok((0..inst.new_nodes.len())
        .map(|t| (perm[res.partition.assignment()[n + t]], truth[n + t]))
        .collect())
}

fn classify_all(fitted: &FittedClassifier, inst: &SimInstance) -> Result<(Vec<(usize, usize)>, usize), ClassifyError> {
    let mut outcomes = Vec::with_capacity(inst.new_nodes.len());
    let mut fallbacks = 0;
    for (node, x) in &inst.new_nodes {
        let out = fitted.classify(x)?;
        fallbacks += usize::from(out.fallback);
        outcomes.push((out.label, node.community));
    }
    Ok((outcomes, fallbacks))
}

/// Evaluates every configured method on one repetition for every labeled
/// size.
pub fn run_repetition(cfg: &SimConfig, rep: usize) -> Result<Vec<RunRecord>, BenchError> {
    let inst = gen_sim_instance(cfg, rep)?;
    let timer = Timer { enabled: cfg.timing };
    let method_seed = Seed(cfg.seed).derive2(rep as u64, TAG_METHODS);
    let truth = inst.params.labels();
    let mut records = Vec::new();

    let unsupervised = if cfg.methods.contains(&Method::ScorePlusOnly) {
        let (res, ms) = timer.run(|| score_plus_only(&inst, cfg.k, method_seed.derive(0)));
        Some((res?, ms))
    } else {
        None
    };

    for &n_labeled in &cfg.n_labeled {
        let labeled = draw_labeled_set(
            truth,
            cfg.k,
            n_labeled,
            Seed(cfg.seed).derive2(rep as u64, TAG_LABELS).derive(n_labeled as u64),
        )?;
        let net = Network::new(inst.graph.clone(), cfg.k, labeled)?;
        for &method in &cfg.methods {
            let record = |outcomes: Vec<(usize, usize)>, fit_ms: f64, runtime_ms: f64, fallbacks: usize| RunRecord {
                method,
                config_id: cfg.config_id.clone(),
                n_labeled,
                repetition: rep,
                error_rate: error_rate(&outcomes),
                runtime_ms,
                fit_ms,
                outcomes,
                fallbacks,
            };
            let row = match method {
                Method::AngleMin | Method::AngleMinPlusSubnetwork | Method::AngleMinPlus => {
                    let (fitted, fit_ms) = timer.run(|| match method {
                        Method::AngleMin => FittedClassifier::anglemin(&net),
                        Method::AngleMinPlusSubnetwork => FittedClassifier::subnetwork(&net),
                        _ => build_projector(&net, cfg.projector, method_seed.derive2(1, n_labeled as u64))
                            .and_then(|h| FittedClassifier::angleminplus(&net, h)),
                    });
                    let fitted = fitted?;
                    let (res, ms) = timer.run(|| classify_all(&fitted, &inst));
                    let (outcomes, fallbacks) = res?;
                    record(outcomes, fit_ms, ms, fallbacks)
                }
                Method::ScorePlusOnly => {
                    let (outcomes, ms) = unsupervised.clone().expect("computed above");
                    record(outcomes, ms, 0.0, 0)
                }
                Method::Ideal => {
                    let (outcomes, ms) = timer.run(|| {
                        inst.new_nodes
                            .iter()
                            .map(|(node, x)| (IdealClassifier::new(&inst.params, node.theta_star).classify(x), node.community))
                            .collect::<Vec<_>>()
                    });
                    record(outcomes, 0.0, ms, 0)
                }
            };
            records.push(row);
        }
    }
    Ok(records)
}

/// Runs every repetition in parallel. A repetition that fails is dropped
/// for all methods; the run fails if more than 10% of repetitions fail or on
/// any configuration error.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimOutcome, BenchError> {
    cfg.validate()?;
    let results: Vec<(usize, Result<Vec<RunRecord>, BenchError>)> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| (rep, run_repetition(cfg, rep)))
        .collect();
    let mut records = Vec::new();
    let mut failed_repetitions = Vec::new();
    for (rep, res) in results {
        match res {
            Ok(rows) => records.extend(rows),
            Err(BenchError::Config(msg)) => return Err(BenchError::Config(msg)),
            Err(e) => {
                log::warn!("repetition {rep} failed: {e}");
                failed_repetitions.push(rep);
            }
        }
    }
    if failed_repetitions.len() as f64 > MAX_FAILURE_SHARE * cfg.repetitions as f64 {
        return Err(BenchError::TooManyFailures {
            failed: failed_repetitions.len(),
            total: cfg.repetitions,
        });
    }
    if !failed_repetitions.is_empty() {
        log::warn!("{} of {} repetitions failed and were excluded", failed_repetitions.len(), cfg.repetitions);
    }
    Ok(SimOutcome {
        records,
        failed_repetitions,
    })
}

/// Cross-validation on an observed network with known communities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealDataConfig {
    pub edges: PathBuf,
    pub labels: PathBuf,
    pub k: usize,
    /// Labeled share of the training nodes, one run per value.
    pub fractions: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub projector: ProjectorStrategy,
    pub timing: bool,
}

impl RealDataConfig {
    pub fn new(edges: impl Into<PathBuf>, labels: impl Into<PathBuf>, k: usize) -> Self {
        RealDataConfig {
            edges: edges.into(),
            labels: labels.into(),
            k,
            fractions: vec![0.3, 0.5, 0.7],
            folds: 10,
            seed: 0,
            methods: vec![Method::AngleMin, Method::AngleMinPlus, Method::AngleMinPlusSubnetwork],
            projector: ProjectorStrategy::PartitionIndicator,
            timing: false,
        }
    }
}

/// Labeled-fraction runs over folds. `config_id` is `frac<percent>`, the
/// repetition column is the fold index.
pub fn run_realdata(cfg: &RealDataConfig) -> Result<Vec<RunRecord>, BenchError> {
    if cfg.k == 0 {
        return config_err("k must be positive");
    }
    if let Some(&f) = cfg.fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return config_err(format!("labeled fraction {f} outside (0, 1]"));
    }
    if let Some(m) = cfg.methods.iter().find(|m| matches!(m, Method::ScorePlusOnly | Method::Ideal)) {
        return config_err(format!("method {m} needs simulated data"));
    }
    let edges = load_edge_list(&cfg.edges, None)?;
    let n = edges.graph.n();
    let labels = load_labels(&cfg.labels, edges.id_base, n, cfg.k)?;
    if edges.isolated_count() > 0 {
        log::info!("{} node(s) have no edges", edges.isolated_count());
    }
    let mut truth = vec![None; n];
    for &(v, c) in &labels {
        truth[v] = Some(c);
    }
    let ids: Vec<usize> = labels.iter().map(|p| p.0).collect();
    let folds = split_folds(&ids, cfg.folds, Seed(cfg.seed))?;
    let timer = Timer { enabled: cfg.timing };

    let mut jobs = Vec::new();
    for (fi, &frac) in cfg.fractions.iter().enumerate() {
        for fold in 0..folds.len() {
            jobs.push((fi, frac, fold));
        }
    }
    let results: Vec<Result<Vec<RunRecord>, BenchError>> = jobs
        .par_iter()
        .map(|&(fi, frac, fold)| {
            let test = &folds[fold];
            let mut is_test = vec![false; n];
            test.iter().for_each(|&v| is_test[v] = true);
            let train: Vec<usize> = (0..n).filter(|&v| !is_test[v]).collect();
            let mut index = vec![usize::MAX; n];
            for (t, &v) in train.iter().enumerate() {
                index[v] = t;
            }
            let graph = edges.graph.induced(&train);
            let pool: Vec<usize> = train.iter().copied().filter(|&v| truth[v].is_some()).collect();
            let n_labeled = ((frac * pool.len() as f64).round() as usize).clamp(cfg.k, pool.len());
            let pool_truth: Vec<usize> = pool.iter().map(|&v| truth[v].expect("pool is labeled")).collect();
            let picked = draw_labeled_set(&pool_truth, cfg.k, n_labeled, Seed(cfg.seed).derive2(fi as u64 + 1, fold as u64))?;
            let labeled: Vec<(usize, usize)> = picked.into_iter().map(|(t, c)| (index[pool[t]], c)).collect();
            let net = Network::new(graph, cfg.k, labeled)?;
            let new_nodes: Vec<(EdgeVector, usize)> = test
                .iter()
                .map(|&v| {
                    let neighbors = edges.graph.neighbors(v).iter().filter(|&&j| !is_test[j]).map(|&j| index[j]).collect();
                    let x = EdgeVector::from_neighbors(train.len(), neighbors).expect("indices inside train");
                    (x, truth[v].expect("test nodes are labeled"))
                })
                .collect();
            let config_id = format!("frac{}", (frac * 100.0).round() as usize);
            let mut rows = Vec::new();
            for &method in &cfg.methods {
                let (fitted, fit_ms) = timer.run(|| match method {
                    Method::AngleMin => FittedClassifier::anglemin(&net),
                    Method::AngleMinPlusSubnetwork => FittedClassifier::subnetwork(&net),
                    _ => build_projector(&net, cfg.projector, Seed(cfg.seed).derive2(100 + fi as u64, fold as u64))
                        .and_then(|h| FittedClassifier::angleminplus(&net, h)),
                });
                let fitted = fitted?;
                let (res, ms) = timer.run(|| -> Result<_, ClassifyError> {
                    let mut outcomes = Vec::new();
                    let mut fallbacks = 0;
                    for (x, t) in &new_nodes {
                        let out = fitted.classify(x)?;
                        fallbacks += usize::from(out.fallback);
                        outcomes.push((out.label, *t));
                    }
                    Ok((outcomes, fallbacks))
                });
                let (outcomes, fallbacks) = res?;
                if fallbacks > 0 {
                    log::info!("{config_id} fold {fold} {method}: {fallbacks} test node(s) used the fallback label");
                }
                rows.push(RunRecord {
                    method,
                    config_id: config_id.clone(),
                    n_labeled,
                    repetition: fold,
                    error_rate: error_rate(&outcomes),
                    runtime_ms: ms,
                    fit_ms,
                    outcomes,
                    fallbacks,
                });
            }
            Ok(rows)
        })
        .collect();
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    Ok(records)
}
