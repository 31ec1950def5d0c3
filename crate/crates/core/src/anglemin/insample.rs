//! Leave-one-out classification of the unlabeled nodes themselves.
//!
//! Each unlabeled node `i` is treated as a new node: its own coordinate is
//! deleted, the projector is restricted to `U \ {i}`, and the column
//! `A_{-i,i}` is classified against the aggregates with `i` removed.

use rayon::prelude::*;

use super::projector::{build_projector, ProjectorStrategy};
use super::{decide, ClassifierOutput, FittedClassifier};
use crate::error::ClassifyError;
use crate::graph::{EdgeVector, Network, Partition};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InsampleMode {
    /// One projector built on all of `A_UU`; node `i` drops its own row.
    #[default]
    Shared,
    /// A fresh projector built on `A_{U\{i}, U\{i}}` for every node.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InsampleResult {
    /// Predicted labels, nodes in `LabelLayout::unlabeled()` order.
    pub partition: Partition,
    /// Nodes labeled by the majority-neighbor fallback.
    pub fallback_nodes: Vec<usize>,
}

pub fn insample_classify(
    net: &Network,
    strategy: ProjectorStrategy,
    mode: InsampleMode,
    seed: Seed,
) -> Result<InsampleResult, ClassifyError> {
    let unlabeled = net.layout().unlabeled();
    let outputs: Vec<ClassifierOutput> = match mode {
        InsampleMode::Shared => shared(net, strategy, seed)?,
        InsampleMode::Strict => {
            if let Some(k) = net.layout().missing_community() {
                return Err(ClassifyError::MissingLabeledCommunity(k));
            }
            unlabeled
                .par_iter()
                .map(|&v| strict_one(net, v, strategy, seed))
                .collect()
        }
    };
    let fallback_nodes = unlabeled
        .iter()
        .zip(&outputs)
        .filter(|(_, o)| o.fallback)
        .map(|(&v, _)| v)
        .collect();
    let partition = Partition::new(unlabeled.to_vec(), outputs.iter().map(|o| o.label).collect(), net.k())?;
    Ok(InsampleResult {
        partition,
        fallback_nodes,
    })
}

fn shared(net: &Network, strategy: ProjectorStrategy, seed: Seed) -> Result<Vec<ClassifierOutput>, ClassifyError> {
    let projector = build_projector(net, strategy, seed)?;
    let h = projector.matrix().clone();
    let fitted = FittedClassifier::angleminplus(net, projector)?;
    let layout = net.layout();
    let k = net.k();
    layout
        .unlabeled()
        .par_iter()
        .enumerate()
        .map(|(row, &v)| {
            let neighbors = net.graph().neighbors(v);
            let x = fitted.embed(&net.graph().row(v))?;
            // Removing node i from the unlabeled set takes A^(k)_i h_i out of
            // the projected block of every aggregate.
            let mut community_vectors = fitted.community_vectors().to_vec();
            for &j in neighbors {
                if let Some(c) = layout.label_of(j) {
                    for col in 0..h.ncols() {
                        community_vectors[c][k + col] -= h[(row, col)];
                    }
                }
            }
            Ok(decide(layout, &community_vectors, &x, neighbors))
        })
        .collect()
}

fn strict_one(net: &Network, v: usize, strategy: ProjectorStrategy, seed: Seed) -> ClassifierOutput {
    let fallback = || ClassifierOutput {
        label: net.majority_labeled_neighbor(net.graph().neighbors(v)),
        angles: vec![f64::NAN; net.k()],
        tie: true,
        fallback: true,
    };
    let attempt = || -> Result<ClassifierOutput, ClassifyError> {
        let others: Vec<usize> = (0..net.n()).filter(|&j| j != v).collect();
        let index = |j: usize| if j < v { j } else { j - 1 };
        let graph = net.graph().induced(&others);
        let labeled = net
            .layout()
            .labeled()
            .iter()
            .zip(net.layout().labels())
            .map(|(&j, &c)| (index(j), c))
            .collect();
        let sub = Network::new(graph, net.k(), labeled)?;
        let projector = build_projector(&sub, strategy, seed.derive(v as u64))?;
        let fitted = FittedClassifier::angleminplus(&sub, projector)?;
        let x = EdgeVector::from_neighbors(net.n() - 1, net.graph().neighbors(v).iter().map(|&j| index(j)).collect())?;
        fitted.classify(&x)
    };
    match attempt() {
        Ok(out) => out,
        Err(e) => {
            log::debug!("in-sample node {v}: {e}; using fallback");
            fallback()
        }
    }
}
