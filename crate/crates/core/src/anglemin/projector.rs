//! Projectors `H` over the unlabeled nodes.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ClassifyError, SpectralError};
use crate::graph::{Graph, Network, Partition};
use crate::rng::Seed;
use crate::spectral::{gram_spectral_norm, score_plus, spectral_projector, ScorePlusConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorStrategy {
    /// One-hot SCORE+ clusters of the unlabeled subnetwork.
    PartitionIndicator,
    /// SCORE+ clusters weighted by estimated degree parameters.
    DegreeWeightedPartition,
    /// Leading eigenvectors of `A_UU` divided by their eigenvalues.
    SpectralEmbedding,
    /// Supplied by the caller.
    Custom,
}

/// A `|U| x K` matrix whose rows follow `LabelLayout::unlabeled()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    h: DMatrix<f64>,
    strategy: ProjectorStrategy,
    clusters: Option<Partition>,
}

impl Projector {
    pub fn custom(h: DMatrix<f64>) -> Self {
        Projector {
            h,
            strategy: ProjectorStrategy::Custom,
            clusters: None,
        }
    }

    /// One-hot indicator of `partition`, rows in partition order.
    pub fn from_partition(partition: &Partition) -> Self {
        Projector {
            h: partition.one_hot(),
            strategy: ProjectorStrategy::PartitionIndicator,
            clusters: Some(partition.clone()),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn strategy(&self) -> ProjectorStrategy {
        self.strategy
    }

    /// The unlabeled-node clustering the projector was built from, if any.
    pub fn clusters(&self) -> Option<&Partition> {
        self.clusters.as_ref()
    }

    /// Same projector with row `row` removed.
    pub fn without_row(&self, row: usize) -> Projector {
        Projector {
            h: self.h.clone().remove_row(row),
            strategy: self.strategy,
            clusters: None,
        }
    }
}

/// `θ̂_i = deg(i) / sqrt(Σ_j deg(j))` within `g`.
pub fn degree_estimate(g: &Graph) -> Vec<f64> {
    let degrees = g.degrees();
    let total: usize = degrees.iter().sum();
    if total == 0 {
        return vec![0.0; degrees.len()];
    }
    let scale = (total as f64).sqrt();
    degrees.iter().map(|&d| d as f64 / scale).collect()
}

pub fn build_projector(net: &Network, strategy: ProjectorStrategy, seed: Seed) -> Result<Projector, ClassifyError> {
    build_projector_with(net, strategy, &ScorePlusConfig::new(net.k()), seed)
}

/// Builds `H` from the unlabeled subnetwork `A_UU`. Non-indicator strategies
/// are rescaled so that `‖H'H‖₂ = |U|`.
pub fn build_projector_with(
    net: &Network,
    strategy: ProjectorStrategy,
    cfg: &ScorePlusConfig,
    seed: Seed,
) -> Result<Projector, ClassifyError> {
    let a_uu = net.unlabeled_subgraph();
    build_from_unlabeled(&a_uu, net.layout().unlabeled(), net.k(), strategy, cfg, seed)
}

pub(crate) fn build_from_unlabeled(
    a_uu: &Graph,
    unlabeled: &[usize],
    k: usize,
    strategy: ProjectorStrategy,
    cfg: &ScorePlusConfig,
    seed: Seed,
) -> Result<Projector, ClassifyError> {
    let cluster = || -> Result<Partition, ClassifyError> {
        let res = score_plus(a_uu, cfg, seed)?;
        Partition::new(unlabeled.to_vec(), res.partition.assignment().to_vec(), k)
    };
    match strategy {
        ProjectorStrategy::PartitionIndicator => Ok(Projector::from_partition(&cluster()?)),
        ProjectorStrategy::DegreeWeightedPartition => {
            let partition = cluster()?;
            let theta = degree_estimate(a_uu);
            let mut h = partition.one_hot();
            for (mut row, &t) in h.row_iter_mut().zip(&theta) {
                row *= t;
            }
            let gram = gram_spectral_norm(&h);
            if !(gram > 0.0) {
                return Err(SpectralError::DegenerateSpectrum("no edges among unlabeled nodes".into()).into());
            }
            h *= (unlabeled.len() as f64 / gram).sqrt();
            Ok(Projector {
                h,
                strategy,
                clusters: Some(partition),
            })
        }
        ProjectorStrategy::SpectralEmbedding => Ok(Projector {
            h: spectral_projector(a_uu, k, &cfg.eig)?,
            strategy,
            clusters: None,
        }),
        ProjectorStrategy::Custom => Err(ClassifyError::InvalidInput(
            "a custom projector must be supplied directly".into(),
        )),
    }
}

/// Smallest singular value of `H' Θ̂ Π̂`, with `Θ̂` from [`degree_estimate`]
/// on `A_UU` and `Π̂` the indicator of `clusters` (aligned with the rows of
/// `H`). A diagnostic stand-in for the requirement that `H` keeps the
/// communities apart, which involves the unknown degree parameters.
pub fn community_separation_estimate(net: &Network, projector: &Projector, clusters: &Partition) -> f64 {
    let theta = degree_estimate(&net.unlabeled_subgraph());
    let mut weighted = clusters.one_hot();
    for (mut row, &t) in weighted.row_iter_mut().zip(&theta) {
        row *= t;
    }
    let m = projector.matrix().transpose() * weighted;
    m.singular_values().min()
}
