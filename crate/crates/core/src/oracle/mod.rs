//! Population-level quantities of the block model, used to check the
//! classifiers: population angles, weighted misclustering of a partition,
//! the parameter-aware likelihood classifier, and error-exponent diagnostics.

mod assignment;

pub use assignment::{best_permutation_exhaustive, best_permutation_hungarian};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::anglemin::{angle, project, Angle, Projector};
use crate::error::OracleError;
use crate::graph::{EdgeVector, LabelLayout, Partition};
use crate::model::{DcbmParams, NewNodeParams};

/// `P Π'Θ²Π P`: Gram matrix of the noiseless adjacency columns, summed by
/// community. Its normalized entries are the cosines between communities
/// that every degree parameter cancels out of.
pub fn structural_m(params: &DcbmParams) -> DMatrix<f64> {
    let k = params.k();
    let mut sq = DMatrix::zeros(k, k);
    for (&t, &c) in params.theta().iter().zip(params.labels()) {
        sq[(c, c)] += t * t;
    }
    params.p() * sq * params.p()
}

/// `cos` of the angle between the noiseless columns of any two nodes, by
/// community pair.
pub fn structural_cosines(params: &DcbmParams) -> DMatrix<f64> {
    let m = structural_m(params);
    DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] / (m[(a, a)] * m[(b, b)]).sqrt())
}

/// Population angles for a new node in community `k*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationAngles {
    /// `P (G_LL² + G_UU Q Q' G_UU) P`.
    #[serde(skip)]
    pub m: DMatrix<f64>,
    /// Angle between the projected expected aggregate of each community and
    /// the projected expected edge vector of the new node.
    pub psi: Vec<f64>,
    /// The same angles computed from the `n`-dimensional expectations.
    pub psi_direct: Vec<f64>,
}

/// Largest tolerated gap between the two ways of computing the angles.
pub const PATH_TOL: f64 = 1e-8;

/// Population angles from the `K x K` factorization, cross-checked against a
/// direct computation from the expected adjacency (diagonal included) and
/// the expected edge vector.
pub fn population_angles(
    params: &DcbmParams,
    new_node: &NewNodeParams,
    layout: &LabelLayout,
    projector: &Projector,
) -> Result<PopulationAngles, OracleError> {
    new_node.validate(params)?;
    let k = params.k();
    let h = projector.matrix();
    if layout.n() != params.n() || layout.k() != k {
        return Err(OracleError::DegenerateModel(format!(
            "layout is {} nodes / {} communities, model is {} / {k}",
            layout.n(),
            layout.k(),
            params.n()
        )));
    }
    if h.nrows() != layout.unlabeled().len() {
        return Err(OracleError::DegenerateModel(format!(
            "projector has {} rows, {} unlabeled nodes",
            h.nrows(),
            layout.unlabeled().len()
        )));
    }
    let theta = params.theta();
    let truth = params.labels();

    let mut g_ll = DMatrix::zeros(k, k);
    for &v in layout.labeled() {
        g_ll[(truth[v], truth[v])] += theta[v];
    }
    let mut g_uu = DMatrix::<f64>::zeros(k, k);
    // Π_U' Θ_UU H, which equals G_UU Q.
    let mut g_uu_q = DMatrix::zeros(k, h.ncols());
    for (row, &v) in layout.unlabeled().iter().enumerate() {
        g_uu[(truth[v], truth[v])] += theta[v];
        for col in 0..h.ncols() {
            g_uu_q[(truth[v], col)] += theta[v] * h[(row, col)];
        }
    }
    if let Some(c) = (0..k).find(|&c| g_uu[(c, c)] == 0.0) {
        return Err(OracleError::DegenerateModel(format!("community {c} has no unlabeled node")));
    }
    if let Some(c) = (0..k).find(|&c| g_ll[(c, c)] == 0.0) {
        return Err(OracleError::DegenerateModel(format!("community {c} has no labeled node")));
    }
    let p = params.p();
    // M = B'B with B = [G_LL P; (G_UU Q)' P]; the angles use B's columns.
    let top = &g_ll * p;
    let bottom = g_uu_q.transpose() * p;
    let mut factor = DMatrix::zeros(k + h.ncols(), k);
    factor.view_mut((0, 0), (k, k)).copy_from(&top);
    factor.view_mut((k, 0), (h.ncols(), k)).copy_from(&bottom);
    let m = p * (&g_ll * &g_ll + &g_uu_q * g_uu_q.transpose()) * p;

    let target = new_node.community;
    let col = |c: usize| factor.column(c).iter().copied().collect::<Vec<f64>>();
    let psi = (0..k)
        .map(|c| angle(&col(c), &col(target)).map(Angle::radians))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| OracleError::DegenerateModel(e.to_string()))?;

    let omega = params.omega_matrix();
    let mut expected_x = vec![0.0; params.n()];
    for (j, x) in expected_x.iter_mut().enumerate() {
        *x = new_node.theta_star * theta[j] * p[(target, truth[j])];
    }
    let fx = project(&expected_x, layout, projector).map_err(|e| OracleError::DegenerateModel(e.to_string()))?;
    let mut psi_direct = Vec::with_capacity(k);
    for c in 0..k {
        let mut aggregate = vec![0.0; params.n()];
        for &v in layout.labeled().iter().filter(|&&v| truth[v] == c) {
            for (j, a) in aggregate.iter_mut().enumerate() {
                *a += omega[(v, j)];
            }
        }
        let fa = project(&aggregate, layout, projector).map_err(|e| OracleError::DegenerateModel(e.to_string()))?;
        let a = angle(&fa, &fx).map_err(|e| OracleError::DegenerateModel(e.to_string()))?;
        psi_direct.push(a.radians());
    }
    let gap = psi
        .iter()
        .zip(&psi_direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if gap > PATH_TOL {
        return Err(OracleError::PathDisagreement(gap));
    }
    Ok(PopulationAngles { m, psi, psi_direct })
}

/// Weighted misclustering of a partition of the unlabeled nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectnessReport {
    /// `min_T Σ_{i∈U} θ_i 1{T(π̂_i) ≠ π_i} / ‖θ‖₁`.
    pub b0: f64,
    /// `best_permutation[estimated] = true` label.
    pub best_permutation: Vec<usize>,
}

/// Largest `K` solved by trying every permutation.
pub const EXHAUSTIVE_MAX_K: usize = 8;

/// `truth` and `theta` are aligned with `partition.nodes()`; `theta_l1` is
/// `‖θ‖₁` over the whole network.
pub fn b0_correctness(partition: &Partition, truth: &[usize], theta: &[f64], theta_l1: f64) -> CorrectnessReport {
    assert_eq!(truth.len(), partition.len(), "truth not aligned with partition");
    assert_eq!(theta.len(), partition.len(), "theta not aligned with partition");
    let k = partition.k();
    let mut weight = vec![vec![0.0; k]; k];
    for ((&e, &t), &w) in partition.assignment().iter().zip(truth).zip(theta) {
        weight[e][t] += w;
    }
    let best_permutation = if k <= EXHAUSTIVE_MAX_K {
        best_permutation_exhaustive(&weight)
    } else {
        best_permutation_hungarian(&weight)
    };
    let missed: f64 = partition
        .assignment()
        .iter()
        .zip(truth)
        .zip(theta)
        .filter(|((&e, &t), _)| best_permutation[e] != t)
        .map(|(_, &w)| w)
        .sum();
    let b0 = if missed > 0.0 && theta_l1 > 0.0 { missed / theta_l1 } else { 0.0 };
    CorrectnessReport { b0, best_permutation }
}

/// Likelihood classifier that knows every parameter except the new node's
/// community. Only `X` carries information about it: the law of `A` does not
/// depend on the new node.
#[derive(Debug, Clone)]
pub struct IdealClassifier {
    /// Σ_i log(1 - p_ki) over nodes with `0 < p_ki < 1`.
    base: Vec<f64>,
    /// log(p_ki / (1 - p_ki)), or ±∞ for `p_ki` equal to 1 or 0.
    log_odds: Vec<Vec<f64>>,
    /// Nodes with `p_ki >= 1`; community `k` needs all of them in `X`.
    certain: Vec<Vec<usize>>,
}

impl IdealClassifier {
    pub fn new(params: &DcbmParams, theta_star: f64) -> Self {
        let k = params.k();
        let n = params.n();
        let mut base = vec![0.0; k];
        let mut log_odds = vec![vec![0.0; n]; k];
        let mut certain = vec![Vec::new(); k];
        for c in 0..k {
            for i in 0..n {
                let prob = theta_star * params.theta()[i] * params.p()[(c, params.labels()[i])];
                if prob >= 1.0 {
                    certain[c].push(i);
                    log_odds[c][i] = f64::INFINITY;
                } else if prob <= 0.0 {
                    log_odds[c][i] = f64::NEG_INFINITY;
                } else {
                    base[c] += (-prob).ln_1p();
                    log_odds[c][i] = prob.ln() - (-prob).ln_1p();
                }
            }
        }
        IdealClassifier { base, log_odds, certain }
    }

    /// Log-likelihood of `x` under each community; `-∞` when impossible.
    pub fn log_likelihoods(&self, x: &EdgeVector) -> Vec<f64> {
        (0..self.base.len())
            .map(|c| {
                if self.certain[c].iter().any(|i| x.neighbors().binary_search(i).is_err()) {
                    return f64::NEG_INFINITY;
                }
                let mut total = self.base[c];
                for &i in x.neighbors() {
                    let lo = self.log_odds[c][i];
                    if lo == f64::NEG_INFINITY {
                        return f64::NEG_INFINITY;
                    }
                    if lo.is_finite() {
                        total += lo;
                    }
                }
                total
            })
            .collect()
    }

    /// Maximum-likelihood community; near-equal likelihoods go to the
    /// smallest index.
    pub fn classify(&self, x: &EdgeVector) -> usize {
        let ll = self.log_likelihoods(x);
        let max = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return 0;
        }
        let tol = 1e-12 * max.abs().max(1.0);
        ll.iter().position(|&v| v >= max - tol).expect("maximum is attained")
    }
}

pub fn ideal_classify(params: &DcbmParams, theta_star: f64, x: &EdgeVector) -> usize {
    IdealClassifier::new(params, theta_star).classify(x)
}

/// `Σ_k P(ŷ ≠ k | k* = k)` estimated from `(predicted, true)` pairs: the sum,
/// not the average, of the per-community error rates. `None` when some
/// community has no sample.
pub fn risk(outcomes: &[(usize, usize)], k: usize) -> Option<f64> {
    let mut wrong = vec![0usize; k];
    let mut total = vec![0usize; k];
    for &(pred, truth) in outcomes {
        total[truth] += 1;
        wrong[truth] += usize::from(pred != truth);
    }
    if total.contains(&0) {
        return None;
    }
    Some(wrong.iter().zip(&total).map(|(&w, &t)| w as f64 / t as f64).sum())
}

/// `|λ_min(P)|`, the smallest eigenvalue of `P` in magnitude.
pub fn beta_n(p: &DMatrix<f64>) -> f64 {
    nalgebra::SymmetricEigen::new(p.clone())
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min)
}

/// Error exponents without their unknown constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub beta_n: f64,
    /// `β_n² ‖θ‖₁ min{θ*, ‖θ_L^(k)‖₁}` for each community `k`.
    pub misclassification_exponents: Vec<f64>,
    /// `2 β_n²/8 θ* (‖θ_L‖₁ + ‖θ_U‖₁)`: exponent in the lower bound on the
    /// risk of any classifier.
    pub ideal_exponent: f64,
    /// `β_n²/8 θ* (‖θ_L‖₁² + ‖θ_U‖₁²)² / (‖θ_L‖₁³ + ‖θ_U‖₁³)`: exponent in
    /// the risk bound of AngleMin+.
    pub angleminplus_exponent: f64,
    /// `(‖θ_L‖₁ + ‖θ_U‖₁)` over its AngleMin+ counterpart, within `[1, 1.125]`.
    pub base_ratio: f64,
}

pub fn bound_report(params: &DcbmParams, theta_star: f64, layout: &LabelLayout) -> BoundReport {
    let beta = beta_n(params.p());
    let labeled_by_community = params.community_theta_l1_over(layout.labeled().iter().copied());
    let theta_l1 = params.theta_l1();
    let misclassification_exponents = labeled_by_community
        .iter()
        .map(|&l| beta * beta * theta_l1 * theta_star.min(l))
        .collect();
    let l: f64 = labeled_by_community.iter().sum();
    let u: f64 = params
        .community_theta_l1_over(layout.unlabeled().iter().copied())
        .iter()
        .sum();
    let mixed = (l * l + u * u).powi(2) / (l.powi(3) + u.powi(3));
    let scale = beta * beta / 8.0 * theta_star;
    BoundReport {
        beta_n: beta,
        misclassification_exponents,
        ideal_exponent: 2.0 * scale * (l + u),
        angleminplus_exponent: scale * mixed,
        base_ratio: (l + u) / mixed,
    }
}

/// A regularity requirement that does not hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RegularityViolation {
    /// `‖P‖_max > C1`.
    EntryBound { max_entry: f64, bound: f64 },
    /// `max_k ‖θ^(k)‖₁ > C2 min_k ‖θ^(k)‖₁`.
    DegreeBalance { ratio: f64, bound: f64 },
    /// `‖θ_L^(k)‖² > c3 β_n ‖θ_L^(k)‖₁ ‖θ‖₁`.
    LabeledConcentration { community: usize, lhs: f64, rhs: f64 },
}

pub fn check_regularity(params: &DcbmParams, layout: &LabelLayout, c1: f64, c2: f64, c3: f64) -> Vec<RegularityViolation> {
    let mut out = Vec::new();
    let max_entry = params.p().amax();
    if max_entry > c1 {
        out.push(RegularityViolation::EntryBound { max_entry, bound: c1 });
    }
    let by_community = params.community_theta_l1();
    let hi = by_community.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = by_community.iter().copied().fold(f64::INFINITY, f64::min);
    if hi > c2 * lo {
        out.push(RegularityViolation::DegreeBalance { ratio: hi / lo, bound: c2 });
    }
    let beta = beta_n(params.p());
    let theta_l1 = params.theta_l1();
    let k = params.k();
    let mut sq = vec![0.0; k];
    let mut l1 = vec![0.0; k];
    for &v in layout.labeled() {
        let c = params.labels()[v];
        let t = params.theta()[v];
        sq[c] += t * t;
        l1[c] += t;
    }
    for c in 0..k {
        let rhs = c3 * beta * l1[c] * theta_l1;
        if sq[c] > rhs {
            out.push(RegularityViolation::LabeledConcentration {
                community: c,
                lhs: sq[c],
                rhs,
            });
        }
    }
    out
}
