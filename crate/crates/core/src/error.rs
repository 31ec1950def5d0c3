use std::path::PathBuf;

use thiserror::Error;

/// Invalid block-model parameters.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// Failures while reading edge lists and label files.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Failures of the numerical kernels and the unsupervised clusterer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigensolver did not converge (residuals {residuals:?})")]
    EigFailure { residuals: Vec<f64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("clustering failed: {0}")]
    ClusterFailure(String),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
}

/// Failures of the angle-based classifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("angle undefined for a zero vector")]
    ZeroVector,
    #[error("community {0} has no labeled node")]
    MissingLabeledCommunity(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Failures of the theory-side computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("population angle paths disagree by {0:e}")]
    PathDisagreement(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures of the experiment harness.
#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{failed} of {total} repetitions failed")]
    TooManyFailures { failed: usize, total: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
