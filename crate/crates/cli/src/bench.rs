use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::error::ErrorKind;
use clap::Args;
use dapc_core::baselines::dbscan_reference;
use dapc_core::density::estimate_epsilon;
use dapc_core::metrics::{adjusted_rand_index, noise_as_singletons};
use dapc_core::Dataset;

use crate::{
    check_params, generate_data, load_input, run_algorithm, usage_error, AlgoParams, Algorithm,
    GenParams, Kind,
};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated algorithms to compare.
    #[arg(long, value_enum, value_delimiter = ',', required = true, num_args = 1..)]
    algorithms: Vec<Algorithm>,
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    #[arg(long)]
    header: bool,
    #[arg(long, value_enum, value_name = "KIND")]
    generate: Option<Kind>,
    /// Ground-truth labels for the input file.
    #[arg(long, value_name = "PATH")]
    truth: Option<PathBuf>,
    /// Also sweep dbscan over this many radii, log-spaced from 0.1x to 10x
    /// the estimated radius.
    #[arg(long, value_name = "POINTS")]
    eps_grid: Option<usize>,
    #[command(flatten)]
    params: AlgoParams,
    #[command(flatten)]
    gen: GenParams,
}

fn ari(labels: &[i64], truth: &[i64]) -> Result<f64> {
    Ok(adjusted_rand_index(
        &noise_as_singletons(labels),
        &noise_as_singletons(truth),
    )?)
}

fn fmt_ari(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |a| format!("{a:.4}"))
}

fn sweep(data: &Dataset, truth: Option<&[i64]>, params: &AlgoParams, points: usize) -> Result<()> {
    if points == 0 {
        return Ok(());
    }
    let center = estimate_epsilon(data, params.m, params.c)?;
    if center <= 0.0 {
        bail!("estimated radius is zero; cannot build a radius grid");
    }
    println!();
    println!(
        "{:>14} {:>9} {:>9} {:>8}",
        "dbscan eps", "clusters", "noise", "ARI"
    );
    for i in 0..points {
        let t = if points == 1 {
            0.5
        } else {
            i as f64 / (points - 1) as f64
        };
        let eps = center * 10f64.powf(-1.0 + 2.0 * t);
        let local = dbscan_reference(data, eps, params.m)?;
        let clusters = local.clusters().len();
        let noise = local.noise().len();
        let a = truth.map(|t| ari(&local.labels, t)).transpose()?;
        println!("{eps:>14.6} {clusters:>9} {noise:>9} {:>8}", fmt_ari(a));
    }
    Ok(())
}

pub fn run(args: BenchArgs) -> Result<()> {
    for &alg in &args.algorithms {
        if let Err(e) = check_params(alg, &args.params) {
            e.exit();
        }
    }
    let (data, truth) = match (&args.input, args.generate) {
        (Some(path), _) => {
            let data = load_input(path, args.header)?;
            let truth = args
                .truth
                .as_ref()
                .map(dapc_core::load_labels)
                .transpose()?;
            (data, truth)
        }
        (None, Some(kind)) => {
            let (data, truth) = generate_data(kind, &args.gen, args.params.seed);
            (data, Some(truth))
        }
        (None, None) => usage_error(
            ErrorKind::MissingRequiredArgument,
            "bench needs --input or --generate",
        )
        .exit(),
    };
    if let Some(t) = &truth {
        if t.len() != data.len() {
            bail!("truth has {} labels for {} points", t.len(), data.len());
        }
    }

    println!("n={} dim={}", data.len(), data.dim());
    println!(
        "{:<8} {:>12} {:>9} {:>9} {:>8}",
        "algo", "seconds", "clusters", "noise", "ARI"
    );
    for &alg in &args.algorithms {
        let (result, report) = run_algorithm(alg, &data, &args.params)?;
        let a = truth
            .as_deref()
            .map(|t| ari(&result.labels, t))
            .transpose()?;
        println!(
            "{:<8} {:>12.6} {:>9} {:>9} {:>8}",
            alg.name(),
            report.total.as_secs_f64(),
            report.clusters,
            report.noise,
            fmt_ari(a)
        );
    }
    if let Some(points) = args.eps_grid {
        sweep(&data, truth.as_deref(), &args.params, points)?;
    }
    Ok(())
}
