//! `dapc`: cluster CSV point sets, generate synthetic data, compare algorithms.

mod bench;
mod report;
mod svg;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use dapc_core::baselines::{dbscan_reference, kmeans, KMeansConfig};
use dapc_core::density::estimate_epsilon;
use dapc_core::generate::{self, BlobsParams, BridgeParams, RingsParams};
use dapc_core::naive::naive_cluster;
use dapc_core::pipeline;
use dapc_core::{CanopyConfig, ClusterResult, Dataset, NaiveConfig, PipelineConfig};

use crate::report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "dapc", version, about = "Density-adaptive parallel clustering")]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run several algorithms on one dataset and print a comparison table.
    Bench(bench::BenchArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Input CSV, one point per row.
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Labels CSV to write, or the dataset file with --generate.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, conflicts_with = "generate")]
    algorithm: Option<Algorithm>,
    /// Input CSV starts with a header row.
    #[arg(long)]
    header: bool,
    /// Write a 2-D scatter plot of the labels.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the run report here instead of standard error.
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Generate a dataset instead of clustering one.
    #[arg(long, value_enum, value_name = "KIND")]
    generate: Option<Kind>,
    /// Ground-truth labels path for --generate (default: OUTPUT_STEM.truth.csv).
    #[arg(long, value_name = "PATH", requires = "generate")]
    truth: Option<PathBuf>,
    #[command(flatten)]
    params: AlgoParams,
    #[command(flatten)]
    gen: GenParams,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Algorithm {
    Naive,
    Dapc,
    Dbscan,
    Kmeans,
}

impl Algorithm {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Dapc => "dapc",
            Algorithm::Dbscan => "dbscan",
            Algorithm::Kmeans => "kmeans",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Kind {
    Blobs,
    Rings,
    Bridge,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct AlgoParams {
    /// Density / neighbour count.
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Multiplier on the estimated neighbourhood radius.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Fixed radius for dbscan (estimated from m and c when absent).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Cluster count for kmeans.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, requires = "canopy_t2")]
    canopy_t1: Option<f64>,
    #[arg(long, requires = "canopy_t1")]
    canopy_t2: Option<f64>,
    /// Regions a point may belong to (default: m).
    #[arg(long)]
    max_regions_per_point: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub(crate) struct GenParams {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Blob count, or ring count for rings.
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Blob standard deviation.
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    /// Width ratio of the widest to the tightest blob.
    #[arg(long, default_value_t = 1.0)]
    density_ratio: f64,
    /// Bridge chain length.
    #[arg(long, default_value_t = 1)]
    chain: usize,
}

pub(crate) fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(kind, message)
}

pub(crate) fn generate_data(kind: Kind, gen: &GenParams, seed: u64) -> (Dataset, Vec<i64>) {
    match kind {
        Kind::Blobs => generate::blobs(&BlobsParams {
            n: gen.n,
            clusters: gen.clusters,
            dim: gen.dim,
            spread: gen.spread,
            density_ratio: gen.density_ratio,
            seed,
            ..Default::default()
        }),
        Kind::Rings => generate::rings(&RingsParams {
            n: gen.n,
            rings: gen.clusters,
            seed,
            ..Default::default()
        }),
        Kind::Bridge => generate::bridge(&BridgeParams {
            blob_size: gen.n / 2,
            chain: gen.chain,
            seed,
            ..Default::default()
        }),
    }
}

pub(crate) fn load_input(path: &Path, header: bool) -> Result<Dataset> {
    dapc_core::load_csv(path, header).with_context(|| format!("reading {}", path.display()))
}

/// Checks flag combinations clap cannot express.
pub(crate) fn check_params(algorithm: Algorithm, params: &AlgoParams) -> Result<(), clap::Error> {
    if algorithm == Algorithm::Kmeans && params.k.is_none() {
        return Err(usage_error(
            ErrorKind::MissingRequiredArgument,
            "--algorithm kmeans requires --k",
        ));
    }
    if params.workers == Some(0) {
        return Err(usage_error(
            ErrorKind::ValueValidation,
            "--workers must be >= 1",
        ));
    }
    Ok(())
}

/// Runs one algorithm; `report` receives its effective parameters and timings.
pub(crate) fn run_algorithm(
    algorithm: Algorithm,
    data: &Dataset,
    params: &AlgoParams,
) -> Result<(ClusterResult, RunReport)> {
    let mut report = RunReport::new(algorithm.name(), data);
    let start = Instant::now();
    let result = match algorithm {
        Algorithm::Naive => {
            report.param("m", params.m);
            naive_cluster(data, &NaiveConfig::new(params.m)?)?
        }
        Algorithm::Dapc => {
            let mut cfg = PipelineConfig::new(params.m).with_c(params.c);
            if let Some(w) = params.workers {
                cfg = cfg.with_workers(w);
            }
            if let (Some(t1), Some(t2)) = (params.canopy_t1, params.canopy_t2) {
                cfg = cfg.with_canopy(CanopyConfig::new(t1, t2)?);
            }
            cfg.max_regions_per_point = params.max_regions_per_point;
            report.param("m", params.m);
            report.param("c", params.c);
            report.param("workers", cfg.workers);
            report.param("max_regions_per_point", cfg.region_cap());
            pipeline::cluster(data, &cfg)?
        }
        Algorithm::Dbscan => {
            let eps = match params.epsilon {
                Some(e) => e,
                None => estimate_epsilon(data, params.m, params.c)?,
            };
            report.param("m", params.m);
            report.param("epsilon", eps);
            let local = dbscan_reference(data, eps, params.m)?;
            ClusterResult {
                labels: local.labels,
                core: local.core,
                ..Default::default()
            }
        }
        Algorithm::Kmeans => {
            let k = params.k.context("kmeans requires --k")?;
            report.param("k", k);
            report.param("seed", params.seed);
            kmeans(data, &KMeansConfig::new(k, params.seed))?
        }
    };
    report.finish(&result, start.elapsed());
    Ok((result, report))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn default_truth_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().unwrap_or_default().to_string_lossy();
    output.with_file_name(format!("{stem}.truth.csv"))
}

fn run(args: RunArgs) -> Result<()> {
    if let Some(kind) = args.generate {
        let Some(output) = &args.output else {
            usage_error(
                ErrorKind::MissingRequiredArgument,
                "--generate requires --output",
            )
            .exit();
        };
        let (data, truth) = generate_data(kind, &args.gen, args.params.seed);
        data.save_csv(output)?;
        let truth_path = args
            .truth
            .clone()
            .unwrap_or_else(|| default_truth_path(output));
        dapc_core::write_labels(create(&truth_path)?, &truth)?;
        if let Some(svg_path) = &args.svg {
            svg::write(create(svg_path)?, &data, &truth)?;
        }
        return Ok(());
    }

    let (Some(input), Some(output), Some(algorithm)) = (&args.input, &args.output, args.algorithm)
    else {
        usage_error(
            ErrorKind::MissingRequiredArgument,
            "clustering needs --input, --output and --algorithm (or use --generate)",
        )
        .exit();
    };
    if let Err(e) = check_params(algorithm, &args.params) {
        e.exit();
    }
    let data = load_input(input, args.header)?;
    if args.svg.is_some() && data.dim() != 2 {
        anyhow::bail!(
            "--svg needs 2-dimensional input, got {} dimensions",
            data.dim()
        );
    }
    let (result, report) = run_algorithm(algorithm, &data, &args.params)?;
    result.write_labels(create(output)?)?;
    if let Some(svg_path) = &args.svg {
        svg::write(create(svg_path)?, &data, &result.labels)?;
    }
    match &args.report {
        Some(path) => writeln!(create(path)?, "{report}")?,
        None => eprintln!("{report}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Some(Command::Bench(args)) => bench::run(args),
        None => run(cli.run),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
