#![allow(dead_code)]

use anglemin::{DcbmParams, Graph, LabelLayout, Network, Seed};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;

/// Random identifiability-normalized parameters with a labeled layout in
/// which every community has labeled and unlabeled members.
pub fn random_instance(seed: u64, n: usize, k: usize) -> (DcbmParams, LabelLayout) {
    assert!(n >= 2 * k);
    let mut rng = Seed(seed).rng();
    let mut labels: Vec<usize> = (0..n).map(|i| if i < 2 * k { i % k } else { rng.random_range(0..k) }).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut shuffled = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        shuffled[v] = labels[pos];
    }
    labels = shuffled;
    let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let p = random_unit_diagonal(&mut rng, k);
    let params = DcbmParams::new(theta, labels.clone(), p).unwrap();

    let mut seen_labeled = vec![false; k];
    let mut seen_unlabeled = vec![false; k];
    let mut labeled = Vec::new();
    for &v in &order {
        let c = labels[v];
        let label_it = if !seen_labeled[c] {
            true
        } else if !seen_unlabeled[c] {
            false
        } else {
            rng.random_bool(0.3)
        };
        if label_it {
            seen_labeled[c] = true;
            labeled.push((v, c));
        } else {
            seen_unlabeled[c] = true;
        }
    }
    let layout = LabelLayout::new(n, k, labeled).unwrap();
    (params, layout)
}

pub fn random_unit_diagonal(rng: &mut anglemin::rng::Rng, k: usize) -> DMatrix<f64> {
    let mut p = DMatrix::identity(k, k);
    for a in 0..k {
        for b in (a + 1)..k {
            let v = rng.random_range(0.0..0.9);
            p[(a, b)] = v;
            p[(b, a)] = v;
        }
    }
    p
}

pub fn clique_edges(nodes: std::ops::Range<usize>) -> Vec<(usize, usize)> {
    let v: Vec<usize> = nodes.collect();
    let mut e = Vec::new();
    for a in 0..v.len() {
        for b in (a + 1)..v.len() {
            e.push((v[a], v[b]));
        }
    }
    e
}

/// Two disjoint cliques on `0..size` and `size..2 size`.
pub fn two_cliques(size: usize) -> Graph {
    let mut edges = clique_edges(0..size);
    edges.extend(clique_edges(size..2 * size));
    Graph::from_edges(2 * size, edges).0
}

pub fn network(graph: Graph, k: usize, labeled: Vec<(usize, usize)>) -> Network {
    Network::new(graph, k, labeled).unwrap()
}

/// One-hot indicator of the true communities of the unlabeled nodes.
pub fn true_indicator(params: &DcbmParams, layout: &LabelLayout) -> DMatrix<f64> {
    let unlabeled = layout.unlabeled();
    let mut h = DMatrix::zeros(unlabeled.len(), params.k());
    for (row, &v) in unlabeled.iter().enumerate() {
        h[(row, params.labels()[v])] = 1.0;
    }
    h
}

/// Expected edge vector of a new node: `θ* θ_j P[k*, c_j]`.
pub fn expected_edges(params: &DcbmParams, theta_star: f64, community: usize) -> Vec<f64> {
    params
        .theta()
        .iter()
        .zip(params.labels())
        .map(|(&t, &c)| theta_star * t * params.p()[(community, c)])
        .collect()
}

/// `Σ_{i ∈ L ∩ C_k} Ω_i` for every community, diagonal included.
pub fn expected_aggregates(params: &DcbmParams, layout: &LabelLayout) -> Vec<Vec<f64>> {
    let omega = params.omega_matrix();
    let n = params.n();
    let mut out = vec![vec![0.0; n]; params.k()];
    for (&v, &c) in layout.labeled().iter().zip(layout.labels()) {
        for j in 0..n {
            out[c][j] += omega[(v, j)];
        }
    }
    out
}

pub fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// `H T` for the permutation matrix sending column `c` to `perm[c]`.
pub fn permute_columns(h: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(h.nrows(), h.ncols());
    for (c, &target) in perm.iter().enumerate() {
        out.set_column(target, &h.column(c));
    }
    out
}

pub fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}
