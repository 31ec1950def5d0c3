//! Degree-corrected block model: parameters, identifiability normalization
//! and sampling.
//!
//! Edge probabilities are `Ω_ij = θ_i θ_j P[c_i, c_j]` for `i != j`; the
//! sampler never draws self-loops.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::ModelError;
use crate::graph::{EdgeVector, Graph};
use crate::rng::Seed;

const SYMMETRY_TOL: f64 = 1e-12;

/// Parameters `(θ, c, P)` of a degree-corrected block model.
#[derive(Debug, Clone, PartialEq)]
pub struct DcbmParams {
    theta: Vec<f64>,
    labels: Vec<usize>,
    p: DMatrix<f64>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::InvalidModel(msg.into()))
}

impl DcbmParams {
    /// Validates every model invariant: `k >= 2`, `θ_i ∈ (0, 1]`, `P`
    /// symmetric and nonnegative, no empty community and all off-diagonal
    /// `Ω_ij <= 1`.
    pub fn new(theta: Vec<f64>, labels: Vec<usize>, p: DMatrix<f64>) -> Result<Self, ModelError> {
        if let Some(i) = theta.iter().position(|&t| !(t > 0.0 && t <= 1.0)) {
            return invalid(format!("theta[{i}] = {} not in (0, 1]", theta[i]));
        }
        Self::with_positive_theta(theta, labels, p)
    }

    /// Like [`new`](Self::new) but only requires `θ_i > 0`. Normalized
    /// parameters can carry `θ_i > 1` while describing a valid `Ω`.
    fn with_positive_theta(
        theta: Vec<f64>,
        labels: Vec<usize>,
        p: DMatrix<f64>,
    ) -> Result<Self, ModelError> {
        let k = p.nrows();
        if k < 2 || p.ncols() != k {
            return invalid(format!("P must be K x K with K >= 2, got {}x{}", p.nrows(), p.ncols()));
        }
        if theta.len() != labels.len() {
            return invalid(format!("{} theta values but {} labels", theta.len(), labels.len()));
        }
        if let Some(i) = theta.iter().position(|&t| !(t > 0.0 && t.is_finite())) {
            return invalid(format!("theta[{i}] = {} is not positive", theta[i]));
        }
        for a in 0..k {
            for b in 0..k {
                let v = p[(a, b)];
                if !(v >= 0.0 && v.is_finite()) {
                    return invalid(format!("P[{a},{b}] = {v} is negative or not finite"));
                }
                if (v - p[(b, a)]).abs() > SYMMETRY_TOL * v.abs().max(1.0) {
                    return invalid(format!("P is not symmetric at ({a},{b})"));
                }
            }
        }
        let mut sizes = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            if c >= k {
                return invalid(format!("label of node {i} is {c}, outside 0..{k}"));
            }
            sizes[c] += 1;
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return invalid(format!("community {c} is empty"));
        }
        let params = DcbmParams { theta, labels, p };
        let max = params.max_offdiag_omega();
        if max > 1.0 {
            return invalid(format!("max off-diagonal Omega = {max} exceeds 1"));
        }
        Ok(params)
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn k(&self) -> usize {
        self.p.nrows()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Community of each node, `0..k`.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// `Ω_ij = θ_i θ_j P[c_i, c_j]` (the diagonal formula is also defined).
    pub fn omega(&self, i: usize, j: usize) -> f64 {
        self.theta[i] * self.theta[j] * self.p[(self.labels[i], self.labels[j])]
    }

    pub fn omega_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.omega(i, j))
    }

    /// One-hot membership matrix `Π` (n x k).
    pub fn membership(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n(), self.k());
        for (i, &c) in self.labels.iter().enumerate() {
            m[(i, c)] = 1.0;
        }
        m
    }

    /// `‖θ^(k)‖₁` for each community.
    pub fn community_theta_l1(&self) -> Vec<f64> {
        self.community_theta_l1_over(0..self.n())
    }

    /// `‖θ^(k)‖₁` restricted to `nodes`.
    pub fn community_theta_l1_over(&self, nodes: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let mut sums = vec![0.0; self.k()];
        for i in nodes {
            sums[self.labels[i]] += self.theta[i];
        }
        sums
    }

    pub fn theta_l1(&self) -> f64 {
        self.theta.iter().sum()
    }

    /// Largest `Ω_ij` over pairs `i != j`, from the top two θ per community.
    pub fn max_offdiag_omega(&self) -> f64 {
        let k = self.k();
        let mut top = vec![[0.0f64; 2]; k];
        for (&t, &c) in self.theta.iter().zip(&self.labels) {
            let slot = &mut top[c];
            if t > slot[0] {
                slot[1] = slot[0];
                slot[0] = t;
            } else if t > slot[1] {
                slot[1] = t;
            }
        }
        let mut max = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let v = if a == b {
                    top[a][0] * top[a][1] * self.p[(a, a)]
                } else {
                    top[a][0] * top[b][0] * self.p[(a, b)]
                };
                max = max.max(v);
            }
        }
        max
    }

    /// Rescales to unit diagonal `P' = D^{-1/2} P D^{-1/2}` with
    /// `θ'_i = θ_i sqrt(P[c_i, c_i])`, leaving `Ω` unchanged.
    ///
    /// The resulting θ' may exceed 1; `Ω` stays valid.
    pub fn normalize_identifiability(&self) -> Result<DcbmParams, ModelError> {
        let k = self.k();
        let diag: Vec<f64> = (0..k).map(|a| self.p[(a, a)]).collect();
        if let Some(a) = diag.iter().position(|&d| d <= 0.0) {
            return invalid(format!("P[{a},{a}] = {} must be positive to normalize", diag[a]));
        }
        let scale: Vec<f64> = diag.iter().map(|d| d.sqrt()).collect();
        let p = DMatrix::from_fn(k, k, |a, b| {
            if a == b {
                1.0
            } else {
                self.p[(a, b)] / (scale[a] * scale[b])
            }
        });
        let theta = self
            .theta
            .iter()
            .zip(&self.labels)
            .map(|(&t, &c)| t * scale[c])
            .collect();
        DcbmParams::with_positive_theta(theta, self.labels.clone(), p)
    }

    pub fn is_normalized(&self) -> bool {
        (0..self.k()).all(|a| self.p[(a, a)] == 1.0)
    }

    /// Draws the adjacency matrix: independent `Bernoulli(Ω_ij)` on the
    /// upper triangle, mirrored, zero diagonal.
    pub fn sample_network(&self, seed: Seed) -> Graph {
        let mut rng = seed.rng();
        let n = self.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let prob = self.omega(i, j);
                if rng.random::<f64>() < prob {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_edges(n, edges).0
    }

    /// Edge probabilities `θ* θ_i P[k*, c_i]` of a new node.
    pub fn new_node_probabilities(&self, node: &NewNodeParams) -> Vec<f64> {
        self.theta
            .iter()
            .zip(&self.labels)
            .map(|(&t, &c)| node.theta_star * t * self.p[(node.community, c)])
            .collect()
    }

    /// Draws the edge vector of a new node.
    pub fn sample_new_node(&self, node: &NewNodeParams, seed: Seed) -> Result<EdgeVector, ModelError> {
        node.validate(self)?;
        let mut rng = seed.rng();
        let neighbors = self
            .new_node_probabilities(node)
            .into_iter()
            .enumerate()
            .filter_map(|(i, prob)| (rng.random::<f64>() < prob).then_some(i))
            .collect();
        EdgeVector::from_neighbors(self.n(), neighbors)
            .map_err(|e| ModelError::InvalidModel(e.to_string()))
    }

    /// Copy with every θ multiplied by `factor`.
    pub fn scaled_theta(&self, factor: f64) -> Result<DcbmParams, ModelError> {
        let theta = self.theta.iter().map(|t| t * factor).collect();
        DcbmParams::new(theta, self.labels.clone(), self.p.clone())
    }
}

/// Degree parameter and true community of a node joining the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewNodeParams {
    pub theta_star: f64,
    /// True community `k*`, `0..k`.
    pub community: usize,
}

impl NewNodeParams {
    pub fn new(theta_star: f64, community: usize) -> Self {
        NewNodeParams {
            theta_star,
            community,
        }
    }

    pub fn validate(&self, params: &DcbmParams) -> Result<(), ModelError> {
        if !(self.theta_star > 0.0 && self.theta_star <= 1.0) {
            return invalid(format!("theta_star = {} not in (0, 1]", self.theta_star));
        }
        if self.community >= params.k() {
            return invalid(format!(
                "community {} outside 0..{}",
                self.community,
                params.k()
            ));
        }
        let max = params
            .new_node_probabilities(self)
            .into_iter()
            .fold(0.0f64, f64::max);
        if max > 1.0 {
            return invalid(format!("new-node edge probability {max} exceeds 1"));
        }
        Ok(())
    }
}
