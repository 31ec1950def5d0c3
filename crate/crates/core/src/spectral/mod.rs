//! Spectral kernels: a symmetric eigensolver, k-means, and SCORE+.

pub mod eigen;
pub mod kmeans;
pub mod score_plus;

pub use eigen::{top_eig, top_eig_sym, AdjacencyOperator, EigConfig, EigPairs, ScaledAdjacency, SymmetricOperator};
pub use kmeans::{kmeans, KMeansResult};
pub use score_plus::{gram_spectral_norm, score_plus, spectral_projector, ScorePlusConfig, ScorePlusResult};
