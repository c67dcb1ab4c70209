use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SubsampleConfig;
use super::experiment::RunOptions;
use super::SchemeOptions;
use crate::error::{Error, Result};
use crate::graph::io::load_labeled_dataset;
use crate::graph::{estimate_lambda, BlockModel};
use crate::likelihood::likelihood_nominate;
use crate::rng::ReplicateSeeds;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexPosition {
    /// Id from the input files.
    pub vertex: usize,
    /// 1 for the class of interest, 2 otherwise.
    pub class: usize,
    /// Number of replicates in which the vertex was ambiguous.
    pub selections: u64,
    /// Mean 1-based list position; `None` if never selected.
    pub mean_position: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsampleTable {
    pub name: String,
    pub replicates: usize,
    pub rows: Vec<VertexPosition>,
}

/// Repeatedly subsamples both classes, reveals a fixed number of seeds in
/// each, nominates the remaining vertices with the likelihood scheme and
/// averages every vertex's position over the replicates that included it.
pub fn run_subsample_average(config: &SubsampleConfig, options: &RunOptions) -> Result<SubsampleTable> {
    config.validate()?;
    let full = load_labeled_dataset(&config.edges, &config.labels, 2)?;
    let labels = full.true_labels().expect("labelled dataset");
    let mut classes: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (v, &b) in labels.iter().enumerate() {
        classes[b].push(v);
    }
    for c in 0..2 {
        if classes[c].len() < config.sample_sizes[c] {
            return Err(Error::Config(format!(
                "class {} has {} vertices, fewer than the {} to sample",
                c + 1,
                classes[c].len(),
                config.sample_sizes[c]
            )));
        }
    }
    let eps = config.hyperparameters.epsilon;
    let n_sizes = vec![
        config.sample_sizes[0] - config.seeds[0],
        config.sample_sizes[1] - config.seeds[1],
    ];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let per_replicate: Vec<Vec<(usize, usize)>> = pool.install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let seeds = ReplicateSeeds::new(config.master_seed, r as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seeds.split);
                let mut chosen = Vec::new();
                let mut rest = Vec::new();
                for c in 0..2 {
                    let sample: Vec<usize> = classes[c]
                        .choose_multiple(&mut rng, config.sample_sizes[c])
                        .copied()
                        .collect();
                    chosen.extend_from_slice(&sample[..config.seeds[c]]);
                    rest.extend_from_slice(&sample[config.seeds[c]..]);
                }
                chosen.sort_unstable();
                rest.sort_unstable();
                let graph = full.select(&chosen, &rest)?;
                let lambda = estimate_lambda(&graph, true, eps)?;
                let model = BlockModel::new(lambda, config.seeds.to_vec(), n_sizes.clone())?.with_epsilon(eps)?;
                let options = SchemeOptions::new(&config.hyperparameters, seeds.kmeans, seeds.sgm);
                let list = likelihood_nominate(&graph, &model, &options.sgm)?.list;
                let positions = list.positions();
                Ok(rest.iter().zip(positions).map(|(&v, p)| (v, p + 1)).collect())
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut sums = vec![0u64; full.num_vertices()];
    let mut counts = vec![0u64; full.num_vertices()];
    for replicate in &per_replicate {
        for &(v, p) in replicate {
            sums[v] += p as u64;
            counts[v] += 1;
        }
    }
    let mut rows: Vec<VertexPosition> = (0..full.num_vertices())
        .map(|v| VertexPosition {
            vertex: full.external_id(v),
            class: labels[v] + 1,
            selections: counts[v],
            mean_position: (counts[v] > 0).then(|| sums[v] as f64 / counts[v] as f64),
        })
        .collect();
    rows.sort_by_key(|r| r.vertex);
    Ok(SubsampleTable {
        name: config.name.clone(),
        replicates: config.replicates,
        rows,
    })
}
