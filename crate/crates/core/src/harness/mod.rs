//! Monte-Carlo experiments: sampled or real graphs, every requested scheme
//! per replicate, precision curves and mean average precision.
//!
//! Replicates are independent and keyed by `(master_seed, replicate)`, so
//! results do not depend on the number of worker threads.

mod config;
mod experiment;
pub mod output;
mod subsample;

pub use config::{DataSpec, ExperimentConfig, Hyperparameters, ModelSpec, OutputSpec, SchemeName, SubsampleConfig};
pub use experiment::{
    run_experiment, run_realdata, run_simulation, sample_replicate, ExperimentResult, RawRecord, RunOptions, SchemeSummary,
    SchemeTiming, Summary, Timing,
};
pub use subsample::{run_subsample_average, SubsampleTable, VertexPosition};

use crate::canonical::canonical_nominate_guarded;
use crate::error::{Error, Result};
use crate::graph::{BlockModel, LabeledGraph};
use crate::kmeans::KMeansConfig;
use crate::likelihood::likelihood_nominate;
use crate::metrics::NominationList;
use crate::sgm::SgmConfig;
use crate::spectral::spectral_nominate;

/// Per-call settings shared by the three schemes.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeOptions {
    /// Spectral embedding dimension; `None` uses the numerical rank of Lambda.
    pub dimension: Option<usize>,
    pub kmeans: KMeansConfig,
    pub sgm: SgmConfig,
    pub guard: u128,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions::new(&Hyperparameters::default(), 0, 0)
    }
}

impl SchemeOptions {
    pub fn new(h: &Hyperparameters, kmeans_seed: u64, sgm_seed: u64) -> Self {
        SchemeOptions {
            dimension: h.dimension,
            kmeans: KMeansConfig {
                restarts: h.kmeans_restarts,
                max_iter: h.kmeans_max_iter,
                rng_seed: kmeans_seed,
            },
            sgm: SgmConfig {
                max_iter: h.max_iter,
                tol: h.tol,
                restarts: h.sgm_restarts,
                rng_seed: sgm_seed,
                record_iterates: false,
            },
            guard: h.canonical_guard as u128,
        }
    }
}

/// Runs one scheme. The spectral scheme uses only `K` and the rank of
/// Lambda from `model`.
pub fn nominate(
    scheme: SchemeName,
    graph: &LabeledGraph,
    model: &BlockModel<f64>,
    options: &SchemeOptions,
) -> Result<NominationList> {
    match scheme {
        SchemeName::Canonical => canonical_nominate_guarded(graph, model, options.guard),
        SchemeName::Likelihood => Ok(likelihood_nominate(graph, model, &options.sgm)?.list),
        SchemeName::Spectral => {
            let d = options.dimension.unwrap_or_else(|| model.lambda().numerical_rank().max(1));
            if d > graph.num_vertices() {
                return Err(Error::Config(format!(
                    "embedding dimension {d} exceeds the {} vertices",
                    graph.num_vertices()
                )));
            }
            Ok(spectral_nominate::<f64>(graph, model.num_blocks(), d, &options.kmeans)?.list)
        }
    }
}
