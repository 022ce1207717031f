//! `rml` — command-line laboratory for random-matrix spectral statistics.
//!
//! Every command reads a flat key=value config file, runs one experiment,
//! appends rows to `<out>/results.csv`, writes sidecar artifacts, and exits
//! with 0 (ran, checks passed), 1 (ran, some check failed), or 2 (could not
//! run: bad usage, bad config, I/O or numerical failure).

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Ctx, Outcome, RunError};
use config::Config;

#[derive(Parser)]
#[command(
    name = "rml",
    version,
    about = "Numerical laboratory for Wigner spectra vs. the semicircle law"
)]
struct Cli {
    /// Key=value configuration file (required by every command)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override the master seed from the config file
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,

    /// Directory for results.csv and sidecar files
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for replica-level parallelism
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kolmogorov distance between empirical spectra and the semicircle law
    #[command(alias = "delta-sweep")]
    Delta,
    /// Fit the convergence rate of the expected Kolmogorov distance in n
    #[command(alias = "rate-fit")]
    Rate,
    /// Stieltjes-transform gap |m_n - s| at a fixed spectral point
    Stieltjes,
    /// Sweep the Stieltjes gap across sizes and moment orders at v = nv/n
    #[command(alias = "stieltjes-scan")]
    Scan,
    /// Decompose the smoothing-inequality bound for one spectrum
    Smoothing,
    /// Entry truncation: zeroed entries, rank bound, pipeline distances
    Truncation,
    /// Eigenvalue rigidity against semicircle quantiles
    Rigidity,
    /// Exact resolvent identities on random instances
    #[command(alias = "verify-identities")]
    Identities,
    /// Resolvent inequality suite on random instances
    Inequalities,
    /// Per-row diagonal-resolvent error terms: rms sizes and exact bounds
    EpsilonMoments,
    /// Spectral-domain geometry: parameters, boundary, contour grid
    Region,
    /// Data files for plotting (histogram, quantiles, boundary)
    PlotData,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Delta => "delta",
            Command::Rate => "rate",
            Command::Stieltjes => "stieltjes",
            Command::Scan => "scan",
            Command::Smoothing => "smoothing",
            Command::Truncation => "truncation",
            Command::Rigidity => "rigidity",
            Command::Identities => "identities",
            Command::Inequalities => "inequalities",
            Command::EpsilonMoments => "epsilon-moments",
            Command::Region => "region",
            Command::PlotData => "plot-data",
        }
    }

    fn runner(&self) -> fn(&Ctx) -> Result<Outcome, RunError> {
        match self {
            Command::Delta => commands::run_delta,
            Command::Rate => commands::run_rate,
            Command::Stieltjes => commands::run_stieltjes,
            Command::Scan => commands::run_scan,
            Command::Smoothing => commands::run_smoothing,
            Command::Truncation => commands::run_truncation,
            Command::Rigidity => commands::run_rigidity,
            Command::Identities => commands::run_identities,
            Command::Inequalities => commands::run_inequalities,
            Command::EpsilonMoments => commands::run_epsilon_moments,
            Command::Region => commands::run_region,
            Command::PlotData => commands::run_plot_data,
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let Some(config_path) = cli.config else {
        eprintln!("error: --config <FILE> is required");
        return 2;
    };
    let mut cfg = match Config::load(&config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    // The seed override participates in the config hash, so two runs that
    // differ only in --seed get distinct experiment ids.
    if let Some(seed) = cli.seed {
        cfg.set("seed", seed.to_string());
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create output directory {}: {e}", cli.out.display());
        return 2;
    }
    let name = cli.command.name();
    let runner = cli.command.runner();
    let ctx = Ctx { cfg, out_dir: cli.out, command: name };
    let result = rml_core::exec::run_with_threads(cli.jobs, move || runner(&ctx));
    match result {
        Ok(Outcome { pass: true }) => 0,
        Ok(Outcome { pass: false }) => {
            eprintln!("{name}: completed, but at least one check failed");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
