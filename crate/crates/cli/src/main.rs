use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vn_core::graph::io::{load_edge_list, read_lambda, write_edge_list, write_labels};
use vn_core::graph::{mix_lambda, BlockModel};
use vn_core::harness::output::{emit_results, write_subsample, OutputPaths};
use vn_core::harness::{
    nominate, run_experiment, run_subsample_average, sample_replicate, ExperimentConfig, RunOptions,
    SchemeName, SchemeOptions, SubsampleConfig,
};
use vn_core::kmeans::KMeansConfig;
use vn_core::rng::ReplicateSeeds;
use vn_core::sgm::SgmConfig;
use vn_core::{Error, Result};

#[derive(Parser)]
#[command(name = "vn", version, about = "Vertex nomination on stochastic block model graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph from a block model and write it as edge and label files
    Sample(SampleArgs),
    /// Order the unlabelled vertices of a graph, most likely block-1 members first
    Nominate(NominateArgs),
    /// Run a Monte-Carlo experiment described by a config file
    Experiment(ExperimentArgs),
    /// Average nomination positions over repeated class-balanced subsamples
    Subsample(SubsampleArgs),
    /// Print the version
    Version,
}

#[derive(Args)]
struct SampleArgs {
    /// Probability matrix file (JSON with K and lambda)
    #[arg(long)]
    lambda: PathBuf,
    /// Mix the matrix with the all-1/2 matrix: theta * lambda + (1 - theta) / 2
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Seeds per block, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<usize>,
    /// Unlabelled vertices per block, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Output edge list
    #[arg(long)]
    edges: PathBuf,
    /// Output seed labels
    #[arg(long)]
    labels: PathBuf,
    /// Output hidden labels of the unlabelled vertices
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct NominateArgs {
    #[arg(long, value_parser = parse_scheme)]
    scheme: SchemeName,
    /// Edge list
    #[arg(long)]
    graph: PathBuf,
    /// Seed labels
    #[arg(long)]
    labels: PathBuf,
    /// Probability matrix file; also fixes the block count
    #[arg(long)]
    lambda: PathBuf,
    /// Unlabelled vertices per block (required for canonical and likelihood)
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Spectral embedding dimension (default: rank of lambda)
    #[arg(long)]
    dimension: Option<usize>,
    /// k-means restarts for spectral, matching restarts for likelihood
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Write the list here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Also write per-replicate hit sequences
    #[arg(long)]
    log_raw: bool,
    /// Directory for result files (overrides the config)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SubsampleArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn parse_scheme(s: &str) -> std::result::Result<SchemeName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample(args) => sample(args),
        Command::Nominate(args) => nominate_cmd(args),
        Command::Experiment(args) => experiment(args),
        Command::Subsample(args) => subsample(args),
        Command::Version => {
            println!("vn {}", vn_core::VERSION);
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn sample(args: SampleArgs) -> Result<()> {
    let lambda = mix_lambda(&read_lambda::<f64>(&args.lambda)?, args.theta)?;
    let model = BlockModel::new(lambda, args.seeds, args.sizes)?;
    let graph = sample_replicate(&model, &ReplicateSeeds::new(args.rng_seed, 0))?;
    let m = graph.num_seeds();
    write_edge_list(&args.edges, &graph)?;
    write_labels(&args.labels, &graph, graph.seed_labels().iter().copied().enumerate())?;
    if let Some(path) = &args.truth {
        let truth = graph.true_labels().expect("sampled graphs carry truth");
        write_labels(path, &graph, truth.iter().enumerate().map(|(i, &b)| (m + i, b)))?;
    }
    Ok(())
}

fn nominate_cmd(args: NominateArgs) -> Result<()> {
    let lambda = read_lambda::<f64>(&args.lambda)?;
    let k = lambda.num_blocks();
    let graph = load_edge_list(&args.graph, &args.labels, k)?;
    let sizes = match (args.sizes, args.scheme) {
        (Some(sizes), _) => sizes,
        (None, SchemeName::Spectral) => {
            // spectral ignores block sizes
            let mut sizes = vec![0; k];
            sizes[0] = graph.num_ambiguous();
            sizes
        }
        (None, scheme) => {
            return Err(Error::Config(format!("--sizes is required for the {scheme} scheme")));
        }
    };
    let model = BlockModel::new(lambda, graph.seed_counts(), sizes)?;
    let mut options = SchemeOptions {
        dimension: args.dimension,
        kmeans: KMeansConfig {
            rng_seed: args.rng_seed,
            ..KMeansConfig::default()
        },
        sgm: SgmConfig {
            rng_seed: args.rng_seed,
            ..SgmConfig::default()
        },
        ..SchemeOptions::default()
    };
    if let Some(r) = args.restarts {
        options.kmeans.restarts = r;
        options.sgm.restarts = r;
    }
    let list = nominate(args.scheme, &graph, &model, &options)?;
    let m = graph.num_seeds();
    let text: String = list
        .order()
        .iter()
        .map(|&i| format!("{}\n", graph.external_id(m + i)))
        .collect();
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
    }
}

fn output_dir(cli: Option<PathBuf>, config: Option<&PathBuf>) -> PathBuf {
    cli.or_else(|| config.cloned()).unwrap_or_else(|| Path::new(".").to_path_buf())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let config = ExperimentConfig::load(&args.config)?;
    let options = RunOptions {
        workers: args.workers,
        log_raw: args.log_raw,
    };
    let result = run_experiment(&config, &options)?;
    let dir = output_dir(args.out_dir, config.output.directory.as_ref());
    let mut paths = OutputPaths::new(&dir, config.output_prefix());
    if !args.log_raw {
        paths.raw = None;
    }
    emit_results(&result, &paths)?;
    let s = &result.summary;
    println!("{}: {} replicates, chance {:.4}", s.name, s.replicates, s.chance);
    for scheme in &s.schemes {
        println!("  {:<10} MAP {:.4} (SE {:.4})", scheme.scheme, scheme.map.mean, scheme.map.std_error);
    }
    println!("wrote {} and {}", paths.curve.display(), paths.summary.display());
    Ok(())
}

fn subsample(args: SubsampleArgs) -> Result<()> {
    let config = SubsampleConfig::load(&args.config)?;
    let table = run_subsample_average(&config, &RunOptions {
        workers: args.workers,
        log_raw: false,
    })?;
    let dir = output_dir(args.out_dir, config.output.directory.as_ref());
    let path = dir.join(format!("{}_positions.csv", config.output_prefix()));
    write_subsample(&table, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
