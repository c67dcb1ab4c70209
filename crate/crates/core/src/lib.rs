//! Vertex nomination on stochastic block model graphs.
//!
//! Three schemes order the ambiguous vertices of a partially labelled graph
//! so that members of block one come first:
//!
//! * [`canonical`]: exact conditional probabilities by enumerating every
//!   feasible partition of the ambiguous vertices;
//! * [`likelihood`]: maximum-likelihood labels via seeded graph matching,
//!   then swap likelihood ratios;
//! * [`spectral`]: adjacency spectral embedding and k-means.
//!
//! [`harness`] runs Monte-Carlo experiments over sampled graphs and scores
//! the schemes by mean average precision.
//!
//! Vertices are 0-based internally, seeds first. Block labels are 0-based
//! internally with block `0` the block of interest; files use 1-based ids
//! and labels.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, the precision the harness uses.

pub mod canonical;
pub mod error;
pub mod graph;
pub mod harness;
pub mod kmeans;
pub mod lap;
pub mod likelihood;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod scalar;
pub mod sgm;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{BlockAssignment, BlockModel, LabeledGraph, Lambda};
pub use metrics::NominationList;
pub use scalar::Scalar;

pub type BlockModelF64 = graph::BlockModel<f64>;
pub type BlockModelF32 = graph::BlockModel<f32>;
pub type LambdaF64 = graph::Lambda<f64>;
pub type LambdaF32 = graph::Lambda<f32>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixF32 = linalg::Matrix<f32>;
pub type CanonicalScoresF64 = canonical::CanonicalScores<f64>;
pub type SwapScoreF64 = likelihood::SwapScore<f64>;
pub type EmbeddingF64 = spectral::Embedding<f64>;
pub type ClusteringF64 = kmeans::Clustering<f64>;
pub type SgmResultF64 = sgm::SgmResult<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
