//! Leading eigenpairs of real symmetric operators.
//!
//! Block Krylov (block Lanczos) iteration with full reorthogonalization and
//! Rayleigh-Ritz extraction. The block size equals the number of requested
//! pairs, so repeated eigenvalues among the leading ones are recovered.
//! Breakdown (an invariant Krylov subspace) restarts from fresh random
//! directions orthogonal to the current basis. Once the basis spans the whole
//! space the Ritz pairs are exact.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;

use crate::error::SpectralError;
use crate::graph::Graph;
use crate::rng::Seed;

/// A symmetric linear map `x -> M x` on `R^dim`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            for (yi, &m) in y.iter_mut().zip(self.column(j).iter()) {
                *yi += m * xj;
            }
        }
    }
}

/// Adjacency matrix of a graph as an operator.
pub struct AdjacencyOperator<'a>(pub &'a Graph);

impl SymmetricOperator for AdjacencyOperator<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.0.neighbors(i).iter().map(|&j| x[j]).sum();
        }
    }
}

/// `S A S` for a diagonal scaling `S`.
pub struct ScaledAdjacency<'a> {
    pub graph: &'a Graph,
    pub scale: Vec<f64>,
}

impl SymmetricOperator for ScaledAdjacency<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self
                .graph
                .neighbors(i)
                .iter()
                .map(|&j| self.scale[j] * x[j])
                .sum();
            *yi = self.scale[i] * s;
        }
    }
}

/// Eigenpairs sorted by decreasing magnitude (ties: positive first).
#[derive(Debug, Clone, PartialEq)]
pub struct EigPairs {
    pub values: Vec<f64>,
    /// Orthonormal columns aligned with `values`. The first coordinate whose
    /// magnitude is non-negligible is positive.
    pub vectors: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigConfig {
    /// Residual tolerance relative to the operator norm.
    pub tol: f64,
    /// Cap on the Krylov basis dimension.
    pub max_iter: usize,
}

impl Default for EigConfig {
    fn default() -> Self {
        EigConfig {
            tol: 1e-9,
            max_iter: 5000,
        }
    }
}

/// The `r` largest-magnitude eigenpairs of a dense symmetric matrix.
pub fn top_eig_sym(m: &DMatrix<f64>, r: usize, tol: f64, max_iter: usize) -> Result<EigPairs, SpectralError> {
    if m.nrows() != m.ncols() {
        return Err(SpectralError::InvalidInput(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(SpectralError::InvalidInput(format!(
                    "matrix not symmetric at ({i},{j})"
                )));
            }
        }
    }
    top_eig(m, r, &EigConfig { tol, max_iter })
}

struct Basis {
    q: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
    /// Upper triangle of `Q' M Q`, `t[j][i] = q_i . w_j` for `i <= j`.
    t: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Basis {
    fn len(&self) -> usize {
        self.q.len()
    }

    /// Orthogonalizes `v` against the basis (two Gram-Schmidt passes) and
    /// appends it unless it is numerically dependent.
    fn push<O: SymmetricOperator + ?Sized>(&mut self, op: &O, mut v: Vec<f64>) -> bool {
        let original = norm(&v);
        if original == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for q in &self.q {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= c * qi);
            }
        }
        let remaining = norm(&v);
        if remaining <= 1e-10 * original {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= remaining);
        let mut w = vec![0.0; v.len()];
        op.apply(&v, &mut w);
        self.q.push(v);
        let column: Vec<f64> = self.q.iter().map(|q| dot(q, &w)).collect();
        self.t.push(column);
        self.w.push(w);
        true
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut t = DMatrix::zeros(m, m);
        for j in 0..m {
            for i in 0..=j {
                let v = self.t[j][i];
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        t
    }
}

struct Ritz {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
    norm_estimate: f64,
}

fn order_by_magnitude(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .abs()
            .total_cmp(&values[a].abs())
            .then(values[b].total_cmp(&values[a]))
    });
    idx
}

fn rayleigh_ritz(basis: &Basis, r: usize) -> Ritz {
    let n = basis.q[0].len();
    let eig = SymmetricEigen::new(basis.projected());
    let order = order_by_magnitude(eig.eigenvalues.as_slice());
    let norm_estimate = eig.eigenvalues.amax();
    let mut values = Vec::with_capacity(r);
    let mut vectors = Vec::with_capacity(r);
    let mut residuals = Vec::with_capacity(r);
    for &idx in order.iter().take(r) {
        let theta = eig.eigenvalues[idx];
        let s = eig.eigenvectors.column(idx);
        let mut y = vec![0.0; n];
        let mut my = vec![0.0; n];
        for (c, &sc) in s.iter().enumerate() {
            if sc == 0.0 {
                continue;
            }
            for ((yi, myi), (qi, wi)) in y
                .iter_mut()
                .zip(my.iter_mut())
                .zip(basis.q[c].iter().zip(&basis.w[c]))
            {
                *yi += sc * qi;
                *myi += sc * wi;
            }
        }
        let res = my
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        values.push(theta);
        vectors.push(y);
        residuals.push(res);
    }
    Ritz {
        values,
        vectors,
        residuals,
        norm_estimate,
    }
}

fn random_vector(rng: &mut crate::rng::Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// Flips `v` so its first non-negligible coordinate is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-10 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// The `r` largest-magnitude eigenpairs of a symmetric operator.
pub fn top_eig<O: SymmetricOperator + ?Sized>(op: &O, r: usize, cfg: &EigConfig) -> Result<EigPairs, SpectralError> {
    let n = op.dim();
    if r == 0 || r > n {
        return Err(SpectralError::InvalidInput(format!(
            "requested {r} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let cap = n.min(cfg.max_iter.max(r));
    let mut rng = Seed(0x5EED_E16E).rng();
    let mut basis = Basis {
        q: Vec::new(),
        w: Vec::new(),
        t: Vec::new(),
    };
    let mut block_start = 0;
    while basis.len() < r.min(n) {
        let v = random_vector(&mut rng, n);
        basis.push(op, v);
    }
    let mut next_check = (2 * r + 8).min(cap);
    loop {
        let block_end = basis.len();
        let full = basis.len() >= cap;
        let mut grew = false;
        if !full {
            for c in block_start..block_end {
                if basis.len() >= cap {
                    break;
                }
                let w = basis.w[c].clone();
                grew |= basis.push(op, w);
            }
        }
        block_start = block_end;
        let at_cap = basis.len() >= cap;
        if at_cap || !grew || basis.len() >= next_check {
            let ritz = rayleigh_ritz(&basis, r);
            let threshold = cfg.tol * ritz.norm_estimate;
            let converged = ritz.values.len() == r && ritz.residuals.iter().all(|&res| res <= threshold);
            if converged {
                return Ok(finish(ritz, n));
            }
            if at_cap {
                return Err(SpectralError::EigFailure {
                    residuals: ritz.residuals,
                });
            }
            next_check = (basis.len() + basis.len() / 3 + 1).min(cap);
        }
        if !grew {
            // Invariant subspace: restart the block from fresh directions.
            let before = basis.len();
            let mut attempts = 0;
            while basis.len() < (before + r).min(cap) && attempts < 4 * r + 8 {
                basis.push(op, random_vector(&mut rng, n));
                attempts += 1;
            }
            block_start = before;
            if basis.len() == before {
                let ritz = rayleigh_ritz(&basis, r);
                return Err(SpectralError::EigFailure {
                    residuals: ritz.residuals,
                });
            }
        }
    }
}

fn finish(ritz: Ritz, n: usize) -> EigPairs {
    let r = ritz.values.len();
    let mut vectors = DMatrix::zeros(n, r);
    for (c, mut v) in ritz.vectors.into_iter().enumerate() {
        let len = norm(&v);
        v.iter_mut().for_each(|x| *x /= len);
        fix_sign(&mut v);
        vectors.set_column(c, &nalgebra::DVector::from_vec(v));
    }
    EigPairs {
        values: ritz.values,
        vectors,
    }
}
