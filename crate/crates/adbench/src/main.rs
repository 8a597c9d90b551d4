//! `adbench` command line: generate synthetic datasets, run experiment
//! grids, and aggregate result tables.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use adbench::data::save_dataset;
use adbench::harness::{run_experiment, write_reports, ExperimentConfig, GridKind};
use adbench::metrics::load_results;
use adbench::synth::generate_benchmark;

#[derive(Parser)]
#[command(name = "adbench", version, about = "Anomaly-detection benchmark for 1-D range profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    /// Unsupervised detectors with training-set pollution sweeps.
    Unsup,
    /// Semi-supervised detector with labeled-anomaly sweeps.
    Sad,
}

impl From<GridArg> for GridKind {
    fn from(value: GridArg) -> Self {
        match value {
            GridArg::Unsup => GridKind::Unsupervised,
            GridArg::Sad => GridKind::Sad,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic four-class benchmark dataset as CSV.
    Gen {
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Profiles per class.
        #[arg(long, default_value_t = 1000)]
        n_per_class: usize,
        /// Generator seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run an experiment grid described by a TOML config.
    Run {
        /// Config file path.
        #[arg(long)]
        config: PathBuf,
        /// Which grid to run.
        #[arg(long, value_enum)]
        grid: GridArg,
        /// Output directory for results.csv, summary.csv, plotdata.json,
        /// manifest.json.
        #[arg(long)]
        out: PathBuf,
        /// Worker thread limit (defaults to all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Aggregate an existing results.csv into summary.csv and plotdata.json.
    Report {
        /// Path to a results.csv produced by `run`.
        #[arg(long)]
        results: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> adbench::Result<ExitCode> {
    match cli.command {
        Command::Gen { out, n_per_class, seed } => {
            let profiles = generate_benchmark(n_per_class, seed)?;
            save_dataset(&out, &profiles)?;
            println!("wrote {} profiles to {}", profiles.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, grid, out, workers } => {
            let config = ExperimentConfig::load(&config)?;
            let kind: GridKind = grid.into();
            let all_ok = run_with_workers(workers, || run_experiment(&config, kind, &out))?;
            println!(
                "grid {} finished ({}); artifacts in {}",
                kind.as_str(),
                if all_ok { "all cells ok" } else { "some cells FAILED" },
                out.display()
            );
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Report { results, out } => {
            std::fs::create_dir_all(&out)?;
            let rows = load_results(&results)?;
            let summaries = write_reports(&out, &rows)?;
            println!("wrote {} summary groups to {}", summaries.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[cfg(feature = "parallel")]
fn run_with_workers<T>(
    workers: Option<usize>,
    job: impl FnOnce() -> adbench::Result<T> + Send,
) -> adbench::Result<T>
where
    T: Send,
{
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| adbench::Error::Config(format!("thread pool: {e}")))?;
            pool.install(job)
        }
        None => job(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_workers<T>(
    workers: Option<usize>,
    job: impl FnOnce() -> adbench::Result<T> + Send,
) -> adbench::Result<T>
where
    T: Send,
{
    if workers.is_some() {
        log::warn!("--workers ignored: built without the parallel feature");
    }
    job()
}
