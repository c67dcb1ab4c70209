use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataSpec, ExperimentConfig, ModelSpec, SchemeName};
use super::{nominate, SchemeOptions};
use crate::canonical::multinomial;
use crate::error::{Error, Result};
use crate::graph::io::load_labeled_dataset;
use crate::graph::{estimate_lambda, sample_sbm, BlockAssignment, BlockModel, LabeledGraph};
use crate::metrics::{average_precision_of_hits, mean_average_precision, MeanEstimate};
use crate::rng::ReplicateSeeds;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses all available cores.
    pub workers: Option<usize>,
    /// Keep per-replicate hit sequences.
    pub log_raw: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSummary {
    pub scheme: SchemeName,
    pub map: MeanEstimate,
    /// Fraction of replicates whose list held a block-one vertex at each position.
    pub curve: Vec<f64>,
}

/// Deterministic part of an experiment's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub code_version: String,
    pub master_seed: u64,
    pub replicates: usize,
    pub num_ambiguous: usize,
    pub num_block1: usize,
    /// `n1 / n`, the mean average precision of a uniformly random list.
    pub chance: f64,
    pub schemes: Vec<SchemeSummary>,
    pub config: ExperimentConfig,
}

impl Summary {
    pub fn scheme(&self, scheme: SchemeName) -> Option<&SchemeSummary> {
        self.schemes.iter().find(|s| s.scheme == scheme)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeTiming {
    pub scheme: SchemeName,
    pub seconds_per_replicate: f64,
    pub total_seconds: f64,
}

/// Wall-clock measurements; kept apart from [`Summary`] so that summaries
/// are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub wall_seconds: f64,
    pub schemes: Vec<SchemeTiming>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub replicate: usize,
    pub scheme: SchemeName,
    pub hits: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub summary: Summary,
    pub timing: Timing,
    pub raw: Option<Vec<RawRecord>>,
}

struct Instance {
    graph: LabeledGraph,
    model: BlockModel<f64>,
    truth: Vec<usize>,
}

struct ReplicateOutcome {
    hits: Vec<Vec<bool>>,
    seconds: Vec<f64>,
}

/// Simulation if the config has a model, real-data protocol if it has data.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentResult> {
    if config.model.is_some() {
        run_simulation(config, options)
    } else {
        run_realdata(config, options)
    }
}

/// Samples a graph per replicate from the configured model. Seeds are laid
/// out by `m_sizes`; the hidden labels follow `n_sizes` in a random order
/// drawn per replicate, so vertex-index tie breaking cannot favour block one.
pub fn run_simulation(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentResult> {
    config.validate()?;
    let spec: &ModelSpec = config
        .model
        .as_ref()
        .ok_or_else(|| Error::Config("simulation needs a \"model\" section".into()))?;
    let model = spec.block_model(config.hyperparameters.epsilon)?;
    check_feasible(config, &model)?;
    let n1 = model.ambiguous_sizes()[0];
    let n = model.num_ambiguous();
    run_replicates(config, options, n, n1, |seeds| {
        let graph = sample_replicate(&model, seeds)?;
        Ok(Instance {
            truth: graph.true_labels().expect("sampled graphs carry truth").to_vec(),
            graph,
            model: model.clone(),
        })
    })
}

/// One simulated replicate: seeds labelled by `m_sizes` in block order, the
/// ambiguous labels (sizes `n_sizes`) in a random order from `seeds.membership`,
/// edges from `seeds.graph`.
pub fn sample_replicate(model: &BlockModel<f64>, seeds: &ReplicateSeeds) -> Result<LabeledGraph> {
    let mut labels = BlockAssignment::contiguous(model).labels().to_vec();
    let m = model.num_seeds();
    labels[m..].shuffle(&mut ChaCha8Rng::seed_from_u64(seeds.membership));
    let membership = BlockAssignment::new(labels, model.num_blocks())?;
    sample_sbm(model, &membership, seeds.graph)
}

/// Real-data protocol: every replicate draws the configured number of seeds
/// uniformly within each block, hides the other labels, estimates Lambda
/// from the seed-induced subgraph and scores against the hidden labels.
pub fn run_realdata(config: &ExperimentConfig, options: &RunOptions) -> Result<ExperimentResult> {
    config.validate()?;
    let data: &DataSpec = config
        .data
        .as_ref()
        .ok_or_else(|| Error::Config("real-data run needs a \"data\" section".into()))?;
    let full = load_labeled_dataset(&data.edges, &data.labels, data.k)?;
    let labels = full.true_labels().expect("labelled dataset").to_vec();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); data.k];
    for (v, &b) in labels.iter().enumerate() {
        members[b].push(v);
    }
    for (b, list) in members.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::Config(format!("block {} is absent from {}", b + 1, data.labels.display())));
        }
        if data.seeds_per_block[b] > list.len() {
            return Err(Error::Config(format!(
                "{} seeds requested from block {} of size {}",
                data.seeds_per_block[b],
                b + 1,
                list.len()
            )));
        }
    }
    let true_n: Vec<usize> = members
        .iter()
        .zip(&data.seeds_per_block)
        .map(|(list, &s)| list.len() - s)
        .collect();
    let n_sizes = data.n_sizes.clone().unwrap_or_else(|| true_n.clone());
    if n_sizes.iter().sum::<usize>() != true_n.iter().sum::<usize>() {
        return Err(Error::Config(format!(
            "n_sizes sum to {} but {} vertices are ambiguous",
            n_sizes.iter().sum::<usize>(),
            true_n.iter().sum::<usize>()
        )));
    }
    let n = true_n.iter().sum();
    let n1 = true_n[0];
    if n1 == 0 {
        return Err(Error::Config("every block-1 vertex is a seed; nothing to nominate".into()));
    }
    let eps = config.hyperparameters.epsilon;
    let probe = BlockModel::new(
        crate::graph::Lambda::constant(data.k, 0.5)?,
        data.seeds_per_block.clone(),
        n_sizes.clone(),
    )?;
    check_feasible(config, &probe)?;
    run_replicates(config, options, n, n1, |seeds| {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.split);
        let mut chosen = Vec::new();
        let mut rest = Vec::new();
        for (b, list) in members.iter().enumerate() {
            let picked = index::sample(&mut rng, list.len(), data.seeds_per_block[b]);
            let mut mask = vec![false; list.len()];
            for i in picked.iter() {
                mask[i] = true;
            }
            for (i, &v) in list.iter().enumerate() {
                if mask[i] {
                    chosen.push(v);
                } else {
                    rest.push(v);
                }
            }
        }
        chosen.sort_unstable();
        rest.sort_unstable();
        let graph = full.select(&chosen, &rest)?;
        let lambda = estimate_lambda(&graph, true, eps)?;
        let model = BlockModel::new(lambda, data.seeds_per_block.clone(), n_sizes.clone())?.with_epsilon(eps)?;
        Ok(Instance {
            truth: graph.true_labels().expect("labelled dataset").to_vec(),
            graph,
            model,
        })
    })
}

fn check_feasible(config: &ExperimentConfig, model: &BlockModel<f64>) -> Result<()> {
    if config.schemes.contains(&SchemeName::Canonical) {
        let count = multinomial(model.ambiguous_sizes());
        let guard = config.hyperparameters.canonical_guard as u128;
        if count > guard {
            return Err(Error::Infeasible { count, guard });
        }
    }
    Ok(())
}

fn run_replicates<F>(
    config: &ExperimentConfig,
    options: &RunOptions,
    n: usize,
    n1: usize,
    make_instance: F,
) -> Result<ExperimentResult>
where
    F: Fn(&ReplicateSeeds) -> Result<Instance> + Sync,
{
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<ReplicateOutcome> = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let seeds = ReplicateSeeds::new(config.master_seed, r as u64);
                let instance = make_instance(&seeds)?;
                let scheme_options = SchemeOptions::new(&config.hyperparameters, seeds.kmeans, seeds.sgm);
                let mut hits = Vec::with_capacity(config.schemes.len());
                let mut seconds = Vec::with_capacity(config.schemes.len());
                for &scheme in &config.schemes {
                    let t = Instant::now();
                    let list = nominate(scheme, &instance.graph, &instance.model, &scheme_options)?;
                    seconds.push(t.elapsed().as_secs_f64());
                    hits.push(list.hits(&instance.truth)?);
                }
                Ok(ReplicateOutcome { hits, seconds })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let replicates = config.replicates;
    let mut schemes = Vec::new();
    let mut timings = Vec::new();
    for (s, &scheme) in config.schemes.iter().enumerate() {
        let mut counts = vec![0u64; n];
        let mut aps = Vec::with_capacity(replicates);
        let mut total_seconds = 0.0;
        for outcome in &outcomes {
            let hits = &outcome.hits[s];
            for (c, &h) in counts.iter_mut().zip(hits) {
                *c += h as u64;
            }
            aps.push(average_precision_of_hits::<f64>(hits, n1));
            total_seconds += outcome.seconds[s];
        }
        schemes.push(SchemeSummary {
            scheme,
            map: mean_average_precision(&aps)?,
            curve: counts.iter().map(|&c| c as f64 / replicates as f64).collect(),
        });
        timings.push(SchemeTiming {
            scheme,
            seconds_per_replicate: total_seconds / replicates as f64,
            total_seconds,
        });
    }
    let raw = options.log_raw.then(|| {
        outcomes
            .iter()
            .enumerate()
            .flat_map(|(r, o)| {
                config.schemes.iter().zip(&o.hits).map(move |(&scheme, hits)| RawRecord {
                    replicate: r,
                    scheme,
                    hits: hits.clone(),
                })
            })
            .collect()
    });
    Ok(ExperimentResult {
        summary: Summary {
            name: config.name.clone(),
            code_version: crate::VERSION.to_string(),
            master_seed: config.master_seed,
            replicates,
            num_ambiguous: n,
            num_block1: n1,
            chance: n1 as f64 / n as f64,
            schemes,
            config: config.clone(),
        },
        timing: Timing {
            name: config.name.clone(),
            wall_seconds: start.elapsed().as_secs_f64(),
            schemes: timings,
        },
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Hyperparameters;

    fn small(replicates: usize, schemes: Vec<SchemeName>) -> ExperimentConfig {
        ExperimentConfig {
            name: "small".into(),
            model: Some(ModelSpec {
                k: 3,
                base_lambda: vec![vec![0.5, 0.3, 0.4], vec![0.3, 0.8, 0.6], vec![0.4, 0.6, 0.3]],
                theta: 1.0,
                n_sizes: vec![4, 3, 3],
                m_sizes: vec![4, 0, 0],
            }),
            data: None,
            schemes,
            replicates,
            master_seed: 11,
            hyperparameters: Hyperparameters::default(),
            output: Default::default(),
        }
    }

    #[test]
    fn curves_and_maps_consistent() {
        let config = small(30, vec![SchemeName::Canonical, SchemeName::Likelihood, SchemeName::Spectral]);
        let result = run_simulation(&config, &RunOptions { workers: Some(2), log_raw: true }).unwrap();
        let s = &result.summary;
        assert_eq!(s.chance, 0.4);
        assert_eq!(s.schemes.len(), 3);
        let raw = result.raw.as_ref().unwrap();
        assert_eq!(raw.len(), 90);
        for (idx, scheme) in s.schemes.iter().enumerate() {
            assert_eq!(scheme.curve.len(), 10);
            assert!(scheme.curve.iter().all(|&c| (0.0..=1.0).contains(&c)));
            // curve at every position = hits / replicates
            for p in 0..10 {
                let hits = raw.iter().filter(|r| r.scheme == scheme.scheme && r.hits[p]).count();
                assert_eq!(scheme.curve[p], hits as f64 / 30.0);
            }
            // the whole list always holds all four block-one vertices
            let total: f64 = scheme.curve.iter().sum();
            assert!((total - 4.0).abs() < 1e-12, "{idx}");
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let config = small(12, vec![SchemeName::Likelihood, SchemeName::Spectral]);
        let one = run_simulation(&config, &RunOptions { workers: Some(1), log_raw: true }).unwrap();
        let four = run_simulation(&config, &RunOptions { workers: Some(4), log_raw: true }).unwrap();
        assert_eq!(one.summary, four.summary);
        assert_eq!(one.raw, four.raw);
    }

    #[test]
    fn canonical_infeasible_at_medium_scale() {
        let mut config = small(1, vec![SchemeName::Canonical]);
        let model = config.model.as_mut().unwrap();
        model.n_sizes = vec![200, 150, 150];
        model.m_sizes = vec![20, 0, 0];
        let err = run_simulation(&config, &RunOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        assert_eq!(err.exit_code(), 3);
    }
}
