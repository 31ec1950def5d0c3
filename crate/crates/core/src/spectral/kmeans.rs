//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::SpectralError;
use crate::graph::Partition;
use crate::rng::{Rng, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// Assignment of rows `0..m`.
    pub partition: Partition,
    /// Within-cluster sum of squares.
    pub wcss: f64,
    pub centroids: Vec<Vec<f64>>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let m = points.len();
    let mut centroids = vec![points[rng.random_range(0..m)].clone()];
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = m - 1;
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..m)
        };
        let c = points[pick].clone();
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn update_centroids(points: &[Vec<f64>], assign: &[usize], k: usize, d: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assign) {
        counts[c] += 1;
        sums[c].iter_mut().zip(p).for_each(|(s, x)| *s += x);
    }
    for (s, &cnt) in sums.iter_mut().zip(&counts) {
        if cnt > 0 {
            s.iter_mut().for_each(|x| *x /= cnt as f64);
        }
    }
    (sums, counts)
}

/// Moves the point farthest from its centroid (among clusters with at least
/// two members) into each empty cluster.
fn repair_empty(points: &[Vec<f64>], assign: &mut [usize], centroids: &mut [Vec<f64>], counts: &mut [usize]) {
    for empty in 0..counts.len() {
        if counts[empty] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for (i, p) in points.iter().enumerate() {
            let c = assign[i];
            if counts[c] < 2 {
                continue;
            }
            let d = sq_dist(p, &centroids[c]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let Some(i) = far else { return };
        counts[assign[i]] -= 1;
        assign[i] = empty;
        counts[empty] = 1;
        centroids[empty] = points[i].clone();
    }
}

fn lloyd(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut Rng) -> (Vec<usize>, f64, Vec<Vec<f64>>) {
    let d = points[0].len();
    let mut centroids = plus_plus(points, k, rng);
    let mut assign: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    for _ in 0..max_iter {
        let (mut next, mut counts) = update_centroids(points, &assign, k, d);
        repair_empty(points, &mut assign, &mut next, &mut counts);
        let (recomputed, _) = update_centroids(points, &assign, k, d);
        centroids = recomputed;
        let mut changed = false;
        for (a, p) in assign.iter_mut().zip(points) {
            let c = nearest(p, &centroids).0;
            if c != *a {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (mut final_centroids, mut counts) = update_centroids(points, &assign, k, d);
    repair_empty(points, &mut assign, &mut final_centroids, &mut counts);
    let (final_centroids, _) = update_centroids(points, &assign, k, d);
    let wcss = points
        .iter()
        .zip(&assign)
        .map(|(p, &c)| sq_dist(p, &final_centroids[c]))
        .sum();
    (assign, wcss, final_centroids)
}

/// Clusters the rows of an `m x d` matrix into `k` groups. Restarts run in
/// parallel from derived seeds; the lowest WCSS wins, ties going to the
/// lowest restart index.
pub fn kmeans(rows: &DMatrix<f64>, k: usize, restarts: usize, max_iter: usize, seed: Seed) -> Result<KMeansResult, SpectralError> {
    let (m, d) = rows.shape();
    if d == 0 {
        return Err(SpectralError::InvalidInput("k-means needs at least one column".into()));
    }
    if k == 0 || m < k {
        return Err(SpectralError::InvalidInput(format!("cannot form {k} clusters from {m} rows")));
    }
    if restarts == 0 {
        return Err(SpectralError::InvalidInput("restarts must be at least 1".into()));
    }
    let points: Vec<Vec<f64>> = (0..m).map(|i| rows.row(i).iter().copied().collect()).collect();
    let runs: Vec<_> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(&points, k, max_iter, &mut seed.derive(r as u64).rng()))
        .collect();
    let (assign, wcss, centroids) = runs
        .into_iter()
        .reduce(|best, run| if run.1 < best.1 { run } else { best })
        .expect("at least one restart");
    let partition = Partition::new((0..m).collect(), assign, k)
        .map_err(|e| SpectralError::ClusterFailure(e.to_string()))?;
    Ok(KMeansResult {
        partition,
        wcss,
        centroids,
    })
}
