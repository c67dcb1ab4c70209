//! Experiment configuration files (JSON, unknown keys rejected).

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{mix_lambda, BlockModel, Lambda, DEFAULT_EPSILON};
use crate::canonical::DEFAULT_GUARD;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Canonical,
    Likelihood,
    Spectral,
}

impl SchemeName {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::Canonical => "canonical",
            SchemeName::Likelihood => "likelihood",
            SchemeName::Spectral => "spectral",
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SchemeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(SchemeName::Canonical),
            "likelihood" => Ok(SchemeName::Likelihood),
            "spectral" => Ok(SchemeName::Spectral),
            other => Err(Error::Config(format!(
                "unknown scheme {other:?} (expected canonical, likelihood or spectral)"
            ))),
        }
    }
}

/// Simulated model: `Lambda = theta * base + (1 - theta) / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "K")]
    pub k: usize,
    pub base_lambda: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub theta: f64,
    pub n_sizes: Vec<usize>,
    pub m_sizes: Vec<usize>,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn lambda(&self) -> Result<Lambda<f64>> {
        let base = Lambda::from_rows(&self.base_lambda)?;
        if base.num_blocks() != self.k {
            return Err(Error::Config(format!(
                "base_lambda is {0}x{0} but K = {1}",
                base.num_blocks(),
                self.k
            )));
        }
        mix_lambda(&base, self.theta).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn block_model(&self, epsilon: f64) -> Result<BlockModel<f64>> {
        BlockModel::new(self.lambda()?, self.m_sizes.clone(), self.n_sizes.clone())?.with_epsilon(epsilon)
    }
}

/// A labelled dataset: every vertex of the edge list has a block label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub edges: PathBuf,
    pub labels: PathBuf,
    #[serde(rename = "K")]
    pub k: usize,
    /// Seeds drawn per block in every replicate.
    pub seeds_per_block: Vec<usize>,
    /// Ambiguous block sizes handed to the schemes; defaults to the true counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sizes: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparameters {
    /// Embedding dimension for the spectral scheme; defaults to the rank of Lambda.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    pub sgm_restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub epsilon: f64,
    pub canonical_guard: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            dimension: None,
            kmeans_restarts: 10,
            kmeans_max_iter: 300,
            sgm_restarts: 1,
            max_iter: 20,
            tol: 1e-6,
            epsilon: DEFAULT_EPSILON,
            canonical_guard: DEFAULT_GUARD as u64,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::Config(format!("epsilon {} outside (0, 0.5)", self.epsilon)));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::Config(format!("tol {} must be nonnegative", self.tol)));
        }
        if self.kmeans_restarts == 0 || self.sgm_restarts == 0 {
            return Err(Error::Config("restart counts must be at least 1".into()));
        }
        if self.max_iter == 0 || self.kmeans_max_iter == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        if self.dimension == Some(0) {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Directory for result files; relative to the config file. Defaults to
    /// the working directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    /// File name stem; defaults to the experiment name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSpec>,
    pub schemes: Vec<SchemeName>,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub hyperparameters: Hyperparameters,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Reads, parses and validates a config; relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        config.resolve_paths(path.parent().unwrap_or(Path::new("")));
        config.validate()?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(data) = self.data.as_mut() {
            data.edges = base.join(&data.edges);
            data.labels = base.join(&data.labels);
        }
        if let Some(dir) = self.output.directory.as_mut() {
            *dir = base.join(&*dir);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        let mut sorted = self.schemes.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.schemes.len() {
            return Err(Error::Config("schemes must not repeat".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        self.hyperparameters.validate()?;
        match (&self.model, &self.data) {
            (Some(model), None) => {
                if model.n_sizes.len() != model.k || model.m_sizes.len() != model.k {
                    return Err(Error::Config(format!("n_sizes and m_sizes need K = {} entries", model.k)));
                }
                model.block_model(self.hyperparameters.epsilon)?;
            }
            (None, Some(data)) => {
                if data.k == 0 || data.seeds_per_block.len() != data.k {
                    return Err(Error::Config(format!("seeds_per_block needs K = {} entries", data.k)));
                }
                if data.n_sizes.as_ref().is_some_and(|n| n.len() != data.k) {
                    return Err(Error::Config(format!("n_sizes needs K = {} entries", data.k)));
                }
            }
            _ => {
                return Err(Error::Config("exactly one of \"model\" and \"data\" must be given".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn output_prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or(&self.name)
    }
}

/// Repeated class-balanced subsampling of a two-class dataset, recording each
/// vertex's average position in the likelihood nomination list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsampleConfig {
    pub name: String,
    pub edges: PathBuf,
    /// Labels for every vertex: 1 for the class of interest, 2 for the rest.
    pub labels: PathBuf,
    #[serde(default = "default_sample_sizes")]
    pub sample_sizes: [usize; 2],
    #[serde(default = "default_seed_counts")]
    pub seeds: [usize; 2],
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub hyperparameters: Hyperparameters,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_sample_sizes() -> [usize; 2] {
    [125, 125]
}

fn default_seed_counts() -> [usize; 2] {
    [50, 50]
}

impl SubsampleConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: SubsampleConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.edges = base.join(&config.edges);
        config.labels = base.join(&config.labels);
        if let Some(dir) = config.output.directory.as_mut() {
            *dir = base.join(&*dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        for c in 0..2 {
            if self.seeds[c] >= self.sample_sizes[c] {
                return Err(Error::Config(format!(
                    "class {} needs fewer seeds ({}) than sampled vertices ({})",
                    c + 1,
                    self.seeds[c],
                    self.sample_sizes[c]
                )));
            }
        }
        self.hyperparameters.validate()
    }

    pub fn output_prefix(&self) -> &str {
        self.output.prefix.as_deref().unwrap_or(&self.name)
    }
}
