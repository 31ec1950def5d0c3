//! Community detection for new nodes under the degree-corrected block model.
//!
//! The crate assigns a node that joins a partially labeled network to one of
//! `K` communities by comparing its edge profile with aggregated community
//! profiles through the angle between vectors. It also ships population-level
//! quantities for checking the classifiers against theory, a simulation and
//! cross-validation harness, and a command-line front end.

pub mod anglemin;
pub mod bench;
pub mod error;
pub mod graph;
pub mod io;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod spectral;

pub use error::{BenchError, ClassifyError, IngestError, ModelError, OracleError, SpectralError};
pub use graph::{EdgeVector, Graph, LabelLayout, Network, Partition};
pub use model::{DcbmParams, NewNodeParams};
pub use rng::Seed;
