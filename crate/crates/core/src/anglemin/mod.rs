//! Angle-based classifiers for a new node.
//!
//! Every classifier compares a vector built from the new node's edges with
//! one vector per community and picks the community at the smallest angle.
//! AngleMin compares raw `n`-vectors. AngleMin+ first maps both sides to
//! `R^{2K}` with [`project`]: per-community sums over labeled nodes, then
//! inner products with the columns of a projector `H` over unlabeled nodes.
//! The subnetwork variant keeps only the labeled block.

mod insample;
mod projector;

pub use insample::{insample_classify, InsampleMode, InsampleResult};
pub use projector::{build_projector, build_projector_with, community_separation_estimate, degree_estimate, Projector, ProjectorStrategy};

use serde::Serialize;

use crate::error::ClassifyError;
use crate::graph::{EdgeVector, LabelLayout, Network};

/// Two angles closer than this count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// An angle in radians, within `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Angle between two nonzero vectors of equal length.
///
/// Computed as `2 atan2(‖û - v̂‖, ‖û + v̂‖)` on the normalized vectors, which
/// equals `arccos⟨û, v̂⟩` but keeps full precision near 0 and π.
pub fn angle(u: &[f64], v: &[f64]) -> Result<Angle, ClassifyError> {
    if u.len() != v.len() {
        return Err(ClassifyError::InvalidInput(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if !(nu > 0.0) || !(nv > 0.0) {
        return Err(ClassifyError::ZeroVector);
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a / nu, b / nv);
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    Ok(Angle(2.0 * diff.sqrt().atan2(sum.sqrt())))
}

/// `A^{(k)}`: the sum of the adjacency rows of the labeled nodes in
/// community `k`, for each `k`.
pub fn community_aggregates(net: &Network) -> Result<Vec<Vec<f64>>, ClassifyError> {
    let layout = net.layout();
    if let Some(k) = layout.missing_community() {
        return Err(ClassifyError::MissingLabeledCommunity(k));
    }
    let mut agg = vec![vec![0.0; net.n()]; net.k()];
    for (&v, &c) in layout.labeled().iter().zip(layout.labels()) {
        for &j in net.graph().neighbors(v) {
            agg[c][j] += 1.0;
        }
    }
    Ok(agg)
}

/// `f(x; H)`: the first `K` coordinates sum `x` over the labeled nodes of
/// each community, the last `K` are `x_U' h_k`.
pub fn project(x: &[f64], layout: &LabelLayout, projector: &Projector) -> Result<Vec<f64>, ClassifyError> {
    if x.len() != layout.n() {
        return Err(ClassifyError::InvalidInput(format!(
            "vector of length {} for a network of {} nodes",
            x.len(),
            layout.n()
        )));
    }
    let h = projector.matrix();
    if h.nrows() != layout.unlabeled().len() {
        return Err(ClassifyError::InvalidInput(format!(
            "projector has {} rows, {} unlabeled nodes",
            h.nrows(),
            layout.unlabeled().len()
        )));
    }
    let k = layout.k();
    let mut out = vec![0.0; k + h.ncols()];
    labeled_block(x, layout, &mut out[..k]);
    for (p, &v) in layout.unlabeled().iter().enumerate() {
        if x[v] != 0.0 {
            for c in 0..h.ncols() {
                out[k + c] += x[v] * h[(p, c)];
            }
        }
    }
    Ok(out)
}

fn labeled_block(x: &[f64], layout: &LabelLayout, out: &mut [f64]) {
    for (&v, &c) in layout.labeled().iter().zip(layout.labels()) {
        out[c] += x[v];
    }
}

/// Result of classifying one node. Labels are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifierOutput {
    pub label: usize,
    /// Angle to each community; NaN for communities whose vector is zero
    /// and for every entry when the fallback fired.
    pub angles: Vec<f64>,
    /// More than one community attains the minimum angle, or the fallback
    /// fired.
    pub tie: bool,
    /// The node's own vector was zero, or no community vector was usable,
    /// so the label is the majority label among labeled neighbors.
    pub fallback: bool,
}

/// Smallest finite angle with ties resolved to the smallest index.
/// Returns `None` when every entry is NaN.
pub fn argmin_angle(angles: &[f64]) -> Option<(usize, bool)> {
    let min = angles
        .iter()
        .copied()
        .filter(|a| !a.is_nan())
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let mut hits = angles.iter().enumerate().filter(|(_, &a)| a <= min + TIE_TOL);
    let (label, _) = hits.next().expect("minimum is attained");
    Some((label, hits.next().is_some()))
}

/// Which representation a fitted classifier compares in.
#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    /// Raw `n`-vectors.
    Raw,
    /// `f(·; H)` in `R^{2K}`.
    Projected(Projector),
    /// Only the labeled block of `f`, so only `A_LL` and `X_L` matter.
    LabeledOnly,
}

/// A classifier with its community vectors precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedClassifier {
    layout: LabelLayout,
    variant: Variant,
    community_vectors: Vec<Vec<f64>>,
}

impl FittedClassifier {
    pub fn anglemin(net: &Network) -> Result<Self, ClassifyError> {
        Self::fit(net, Variant::Raw)
    }

    pub fn angleminplus(net: &Network, projector: Projector) -> Result<Self, ClassifyError> {
        Self::fit(net, Variant::Projected(projector))
    }

    pub fn subnetwork(net: &Network) -> Result<Self, ClassifyError> {
        Self::fit(net, Variant::LabeledOnly)
    }

    pub fn fit(net: &Network, variant: Variant) -> Result<Self, ClassifyError> {
        let aggregates = community_aggregates(net)?;
        let layout = net.layout().clone();
        let mut fitted = FittedClassifier {
            layout,
            variant,
            community_vectors: Vec::new(),
        };
        fitted.community_vectors = aggregates
            .iter()
            .map(|a| fitted.embed(a))
            .collect::<Result<_, _>>()?;
        Ok(fitted)
    }

    pub fn layout(&self) -> &LabelLayout {
        &self.layout
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    /// Community vectors in the representation of this classifier.
    pub fn community_vectors(&self) -> &[Vec<f64>] {
        &self.community_vectors
    }

    /// Maps an `n`-vector into the representation of this classifier.
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
        if x.len() != self.layout.n() {
            return Err(ClassifyError::InvalidInput(format!(
                "vector of length {} for a network of {} nodes",
                x.len(),
                self.layout.n()
            )));
        }
        Ok(match &self.variant {
            Variant::Raw => x.to_vec(),
            Variant::Projected(h) => project(x, &self.layout, h)?,
            Variant::LabeledOnly => {
                let mut out = vec![0.0; self.layout.k()];
                labeled_block(x, &self.layout, &mut out);
                out
            }
        })
    }

    pub fn classify(&self, x: &EdgeVector) -> Result<ClassifierOutput, ClassifyError> {
        self.classify_dense(&x.to_dense())
    }

    /// Classifies a real-valued edge vector (for example an expected one).
    pub fn classify_dense(&self, x: &[f64]) -> Result<ClassifierOutput, ClassifyError> {
        let embedded = self.embed(x)?;
        let neighbors: Vec<usize> = (0..x.len()).filter(|&j| x[j] != 0.0).collect();
        Ok(decide(&self.layout, &self.community_vectors, &embedded, &neighbors))
    }
}

/// Angles from `x` to each community vector and the resulting label, with
/// the majority-neighbor fallback when no angle is defined.
pub(crate) fn decide(layout: &LabelLayout, community_vectors: &[Vec<f64>], x: &[f64], neighbors: &[usize]) -> ClassifierOutput {
    let fallback = || ClassifierOutput {
        label: layout.majority_label(neighbors),
        angles: vec![f64::NAN; community_vectors.len()],
        tie: true,
        fallback: true,
    };
    if norm(x) == 0.0 {
        return fallback();
    }
    let angles: Vec<f64> = community_vectors
        .iter()
        .map(|c| angle(c, x).map_or(f64::NAN, Angle::radians))
        .collect();
    match argmin_angle(&angles) {
        Some((label, tie)) => ClassifierOutput {
            label,
            angles,
            tie,
            fallback: false,
        },
        None => fallback(),
    }
}

/// AngleMin: smallest angle between `x` and the raw aggregates `A^{(k)}`.
pub fn anglemin_classify(net: &Network, x: &EdgeVector) -> Result<ClassifierOutput, ClassifyError> {
    FittedClassifier::anglemin(net)?.classify(x)
}

/// AngleMin+: smallest angle after projecting with `projector`.
pub fn angleminplus_classify(net: &Network, x: &EdgeVector, projector: &Projector) -> Result<ClassifierOutput, ClassifyError> {
    FittedClassifier::angleminplus(net, projector.clone())?.classify(x)
}

/// AngleMin+ restricted to the labeled subnetwork.
pub fn angleminplus_subnetwork_classify(net: &Network, x: &EdgeVector) -> Result<ClassifierOutput, ClassifyError> {
    FittedClassifier::subnetwork(net)?.classify(x)
}
