//! SCORE+ clustering of the unlabeled subnetwork and the spectral projector.
//!
//! SCORE+ works on the regularized Laplacian `L = D_τ^{-1/2} A D_τ^{-1/2}`
//! with `D_τ = diag(d) + τ d_max I`, forms entrywise ratios of the leading
//! eigenvectors against the first one, and runs k-means on the rows of the
//! ratio matrix. Only the giant component is embedded; the remaining nodes
//! are attached afterwards. A graph that already falls apart into `K`
//! substantial components is split along them.

use nalgebra::DMatrix;

use super::eigen::{top_eig, AdjacencyOperator, EigConfig, ScaledAdjacency};
use super::kmeans::kmeans;
use crate::error::SpectralError;
use crate::graph::{Graph, Partition};
use crate::rng::Seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ScorePlusConfig {
    pub k: usize,
    /// Ridge coefficient τ in `D_τ`.
    pub tau_coef: f64,
    /// Relative eigen-gap `t`; when `1 - |λ_{K+1}|/|λ_K| <= t` the
    /// `(K+1)`-th eigenvector joins the embedding.
    pub extra_eigenvector_threshold: f64,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    /// A connected component of at least `component_share * m / K` nodes, and
    /// at least two, counts as substantial. When `K` or more components are
    /// substantial, the `K` largest become the clusters and no embedding is
    /// computed.
    pub component_share: f64,
    pub eig: EigConfig,
}

impl ScorePlusConfig {
    pub fn new(k: usize) -> Self {
        ScorePlusConfig {
            k,
            tau_coef: 0.1,
            extra_eigenvector_threshold: 0.1,
            kmeans_restarts: 20,
            kmeans_max_iter: 100,
            component_share: 0.5,
            eig: EigConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.k == 0 {
            return Err(SpectralError::InvalidInput("K must be positive".into()));
        }
        if !(self.tau_coef > 0.0) {
            return Err(SpectralError::InvalidInput("tau_coef must be positive".into()));
        }
        if !(self.extra_eigenvector_threshold > 0.0 && self.extra_eigenvector_threshold < 1.0) {
            return Err(SpectralError::InvalidInput("eigen-gap threshold must lie in (0, 1)".into()));
        }
        if !(self.component_share > 0.0 && self.component_share <= 1.0) {
            return Err(SpectralError::InvalidInput("component_share must lie in (0, 1]".into()));
        }
        if self.kmeans_restarts == 0 {
            return Err(SpectralError::InvalidInput("kmeans_restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorePlusResult {
    /// Assignment of the input graph's nodes `0..m`.
    pub partition: Partition,
    /// Number of leading eigenvectors used (`K` or `K + 1`).
    pub r: usize,
    pub eigenvalues: Vec<f64>,
    pub giant_component: Vec<usize>,
    /// Ratio matrix, rows aligned with `giant_component`.
    pub ratios: DMatrix<f64>,
}

/// Entrywise ratio matrix `R_ik = (λ_{k+1}/λ_1) ξ_{k+1}(i)/ξ_1(i)` for the
/// first `r` eigenpairs, winsorized to `[-clamp, clamp]`.
pub fn ratio_matrix(values: &[f64], vectors: &DMatrix<f64>, r: usize, clamp: f64) -> DMatrix<f64> {
    let m = vectors.nrows();
    DMatrix::from_fn(m, r.saturating_sub(1), |i, k| {
        let lead = vectors[(i, 0)];
        let num = (values[k + 1] / values[0]) * vectors[(i, k + 1)];
        let ratio = if lead.abs() < 1e-12 {
            if num == 0.0 {
                0.0
            } else {
                num.signum() * clamp
            }
        } else {
            num / lead
        };
        ratio.clamp(-clamp, clamp)
    })
}

/// Clusters the nodes of `a_uu` into `cfg.k` groups. With exactly `K` nodes
/// every node forms its own group.
pub fn score_plus(a_uu: &Graph, cfg: &ScorePlusConfig, seed: Seed) -> Result<ScorePlusResult, SpectralError> {
    cfg.validate()?;
    let m = a_uu.n();
    let k = cfg.k;
    if m == 0 {
        return Err(SpectralError::ClusterFailure("no nodes to cluster".into()));
    }
    let components = a_uu.components();
    let giant = components[0].clone();
    if k == 1 {
        return Ok(ScorePlusResult {
            partition: Partition::new((0..m).collect(), vec![0; m], 1)
                .map_err(|e| SpectralError::ClusterFailure(e.to_string()))?,
            r: 1,
            eigenvalues: Vec::new(),
            giant_component: giant,
            ratios: DMatrix::zeros(0, 0),
        });
    }
    if m == k {
        return Ok(ScorePlusResult {
            partition: Partition::new((0..m).collect(), (0..m).collect(), k)
                .map_err(|e| SpectralError::ClusterFailure(e.to_string()))?,
            r: k,
            eigenvalues: Vec::new(),
            giant_component: giant,
            ratios: DMatrix::zeros(0, 0),
        });
    }
    let substantial = (cfg.component_share * m as f64 / k as f64).max(2.0);
    if components.len() >= k && components[k - 1].len() as f64 >= substantial {
        let mut assignment = vec![usize::MAX; m];
        for (c, comp) in components.iter().take(k).enumerate() {
            for &v in comp {
                assignment[v] = c;
            }
        }
        attach_outside_giant(a_uu, &mut assignment, k);
        return Ok(ScorePlusResult {
            partition: Partition::new((0..m).collect(), assignment, k)
                .map_err(|e| SpectralError::ClusterFailure(e.to_string()))?,
            r: k,
            eigenvalues: Vec::new(),
            giant_component: giant,
            ratios: DMatrix::zeros(0, 0),
        });
    }
    if giant.len() < k {
        return Err(SpectralError::ClusterFailure(format!(
            "giant component has {} nodes, fewer than K = {k}",
            giant.len()
        )));
    }
    let sub = a_uu.induced(&giant);
    let degrees: Vec<f64> = sub.degrees().into_iter().map(|d| d as f64).collect();
    let d_max = degrees.iter().fold(0.0f64, |a, &b| a.max(b));
    let scale: Vec<f64> = degrees
        .iter()
        .map(|&d| 1.0 / (d + cfg.tau_coef * d_max).sqrt())
        .collect();
    let laplacian = ScaledAdjacency { graph: &sub, scale };
    let wanted = (k + 1).min(giant.len());
    let eig = top_eig(&laplacian, wanted, &cfg.eig)?;
    let values = eig.values;
    let r = if wanted == k + 1 {
        let gap = 1.0 - values[k].abs() / values[k - 1].abs();
        if gap <= cfg.extra_eigenvector_threshold {
            k + 1
        } else {
            k
        }
    } else {
        k
    };
    let clamp = (m as f64).ln();
    let ratios = ratio_matrix(&values, &eig.vectors, r, clamp);
    let km = kmeans(&ratios, k, cfg.kmeans_restarts, cfg.kmeans_max_iter, seed)?;

    let mut assignment = vec![usize::MAX; m];
    for (t, &v) in giant.iter().enumerate() {
        assignment[v] = km.partition.assignment()[t];
    }
    attach_outside_giant(a_uu, &mut assignment, k);
    let partition = Partition::new((0..m).collect(), assignment, k)
        .map_err(|e| SpectralError::ClusterFailure(e.to_string()))?;
    Ok(ScorePlusResult {
        partition,
        r,
        eigenvalues: values,
        giant_component: giant,
        ratios,
    })
}

/// Assigns each unassigned node to the cluster whose mean degree-normalized
/// adjacency profile is nearest to its own; ties go to the smallest index.
fn attach_outside_giant(g: &Graph, assignment: &mut [usize], k: usize) {
    let m = g.n();
    let mut centroids = vec![vec![0.0; m]; k];
    let mut counts = vec![0usize; k];
    for v in 0..m {
        let c = assignment[v];
        if c == usize::MAX {
            continue;
        }
        counts[c] += 1;
        let d = g.degree(v) as f64;
        for &w in g.neighbors(v) {
            centroids[c][w] += 1.0 / d;
        }
    }
    for (centroid, &cnt) in centroids.iter_mut().zip(&counts) {
        if cnt > 0 {
            centroid.iter_mut().for_each(|x| *x /= cnt as f64);
        }
    }
    let centroid_sq: Vec<f64> = centroids.iter().map(|c| c.iter().map(|x| x * x).sum()).collect();
    for v in 0..m {
        if assignment[v] != usize::MAX {
            continue;
        }
        let d = g.degree(v) as f64;
        let own_sq = if d > 0.0 { 1.0 / d } else { 0.0 };
        let mut best = (0, f64::INFINITY);
        for c in 0..k {
            let cross: f64 = g.neighbors(v).iter().map(|&w| centroids[c][w]).sum::<f64>() / d.max(1.0);
            let dist = own_sq - 2.0 * cross + centroid_sq[c];
            if dist < best.1 {
                best = (c, dist);
            }
        }
        assignment[v] = best.0;
    }
}

/// `H ∝ Ξ Λ^{-1}` from the `k` leading adjacency eigenpairs, scaled so that
/// `‖H'H‖₂ = |U|`.
pub fn spectral_projector(a_uu: &Graph, k: usize, eig_cfg: &EigConfig) -> Result<DMatrix<f64>, SpectralError> {
    let m = a_uu.n();
    if k == 0 || m < k {
        return Err(SpectralError::InvalidInput(format!(
            "spectral projector needs |U| >= K, got |U| = {m}, K = {k}"
        )));
    }
    let eig = top_eig(&AdjacencyOperator(a_uu), k, eig_cfg)?;
    let lead = eig.values[0].abs();
    if let Some(bad) = eig.values.iter().position(|v| v.abs() <= 1e-10 * lead.max(1e-300)) {
        return Err(SpectralError::DegenerateSpectrum(format!(
            "eigenvalue {} among the top {k} is zero",
            bad + 1
        )));
    }
    let mut h = eig.vectors.clone();
    for (c, &lambda) in eig.values.iter().enumerate() {
        h.column_mut(c).scale_mut(1.0 / lambda);
    }
    let gram_norm = gram_spectral_norm(&h);
    h.scale_mut((m as f64 / gram_norm).sqrt());
    Ok(h)
}

/// `‖H'H‖₂`, the largest eigenvalue of the Gram matrix.
pub fn gram_spectral_norm(h: &DMatrix<f64>) -> f64 {
    let gram = h.transpose() * h;
    nalgebra::SymmetricEigen::new(gram).eigenvalues.amax()
}
