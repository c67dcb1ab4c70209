use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vn_core::graph::estimate_lambda;
use vn_core::graph::io::load_labeled_dataset;
use vn_core::harness::{
    run_experiment, run_subsample_average, DataSpec, ExperimentConfig, Hyperparameters, OutputSpec, RunOptions,
    SchemeName, SubsampleConfig,
};
use vn_core::Error;

/// Two planted communities: class 1 is dense inside, class 2 sparse.
fn write_dataset(dir: &Path, sizes: [usize; 2], seed: u64) {
    let n = sizes[0] + sizes[1];
    let class = |v: usize| if v < sizes[0] { 0 } else { 1 };
    let p = [[0.6, 0.1], [0.1, 0.2]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = format!("#vertices {n}\n");
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p[class(i)][class(j)] {
                writeln!(edges, "{} {}", i + 1, j + 1).unwrap();
            }
        }
    }
    let mut labels = String::new();
    for v in 0..n {
        writeln!(labels, "{} {}", v + 1, class(v) + 1).unwrap();
    }
    fs::write(dir.join("edges.txt"), edges).unwrap();
    fs::write(dir.join("labels.txt"), labels).unwrap();
}

fn data_config(dir: &Path, seeds: Vec<usize>, schemes: Vec<SchemeName>) -> ExperimentConfig {
    ExperimentConfig {
        name: "synthetic".into(),
        model: None,
        data: Some(DataSpec {
            edges: dir.join("edges.txt"),
            labels: dir.join("labels.txt"),
            k: 2,
            seeds_per_block: seeds,
            n_sizes: None,
        }),
        schemes,
        replicates: 20,
        master_seed: 5,
        hyperparameters: Hyperparameters::default(),
        output: OutputSpec::default(),
    }
}

#[test]
fn realdata_protocol_reports_chance_and_beats_it() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), [20, 40], 1);
    let config = data_config(dir.path(), vec![5, 10], vec![SchemeName::Likelihood, SchemeName::Spectral]);
    let result = run_experiment(&config, &RunOptions::default()).unwrap();
    let s = &result.summary;
    assert_eq!(s.num_ambiguous, 45);
    assert_eq!(s.num_block1, 15);
    assert!((s.chance - 15.0 / 45.0).abs() < 1e-15);
    for scheme in &s.schemes {
        assert_eq!(scheme.curve.len(), 45);
        assert!(scheme.map.mean > s.chance + 0.2, "{:?} {}", scheme.scheme, scheme.map.mean);
    }
}

#[test]
fn census_estimate_recovers_planted_densities() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), [60, 90], 2);
    let graph = load_labeled_dataset(&dir.path().join("edges.txt"), &dir.path().join("labels.txt"), 2).unwrap();
    let lambda = estimate_lambda::<f64>(&graph, false, 1e-6).unwrap();
    assert!((lambda.get(0, 0) - 0.6).abs() < 0.05);
    assert!((lambda.get(0, 1) - 0.1).abs() < 0.03);
    assert!((lambda.get(1, 1) - 0.2).abs() < 0.03);
}

#[test]
fn realdata_rejects_bad_requests() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), [6, 10], 3);
    let too_many = data_config(dir.path(), vec![7, 2], vec![SchemeName::Likelihood]);
    assert!(matches!(run_experiment(&too_many, &RunOptions::default()), Err(Error::Config(_))));
    let all_seeds = data_config(dir.path(), vec![6, 2], vec![SchemeName::Likelihood]);
    assert!(matches!(run_experiment(&all_seeds, &RunOptions::default()), Err(Error::Config(_))));
    let missing = data_config(&dir.path().join("nowhere"), vec![2, 2], vec![SchemeName::Likelihood]);
    let err = run_experiment(&missing, &RunOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.exit_code(), 4);
    let heavy = data_config(dir.path(), vec![0, 0], vec![SchemeName::Canonical]);
    let mut heavy = heavy;
    heavy.hyperparameters.canonical_guard = 100;
    let err = run_experiment(&heavy, &RunOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn subsample_ranks_interesting_class_first() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), [40, 60], 4);
    let config = SubsampleConfig {
        name: "positions".into(),
        edges: dir.path().join("edges.txt"),
        labels: dir.path().join("labels.txt"),
        sample_sizes: [25, 25],
        seeds: [10, 10],
        replicates: 30,
        master_seed: 9,
        hyperparameters: Hyperparameters::default(),
        output: OutputSpec::default(),
    };
    let table = run_subsample_average(&config, &RunOptions::default()).unwrap();
    assert_eq!(table.rows.len(), 100);
    let selections: u64 = table.rows.iter().map(|r| r.selections).sum();
    assert_eq!(selections, 30 * 30);
    let mean_of = |class: usize| {
        let pos: Vec<f64> = table.rows.iter().filter(|r| r.class == class).filter_map(|r| r.mean_position).collect();
        pos.iter().sum::<f64>() / pos.len() as f64
    };
    assert!(mean_of(1) < mean_of(2) - 5.0, "{} vs {}", mean_of(1), mean_of(2));
    for row in &table.rows {
        match row.mean_position {
            Some(p) => assert!((1.0..=30.0).contains(&p) && row.selections > 0),
            None => assert_eq!(row.selections, 0),
        }
    }
    let again = run_subsample_average(&config, &RunOptions { workers: Some(3), ..RunOptions::default() }).unwrap();
    assert_eq!(table, again);
}

#[test]
fn subsample_rejects_oversized_samples() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), [10, 10], 5);
    let config = SubsampleConfig {
        name: "positions".into(),
        edges: dir.path().join("edges.txt"),
        labels: dir.path().join("labels.txt"),
        sample_sizes: [25, 25],
        seeds: [10, 10],
        replicates: 1,
        master_seed: 9,
        hyperparameters: Hyperparameters::default(),
        output: OutputSpec::default(),
    };
    assert_eq!(run_subsample_average(&config, &RunOptions::default()).unwrap_err().exit_code(), 2);
}
