//! Config-driven experiment harness.
//!
//! A run loads (or generates) the dataset, optionally preselects by
//! energy, executes every cell of the requested grid, and writes four
//! artifacts into the output directory: `results.csv` (one row per cell),
//! `summary.csv` and `plotdata.json` (aggregations), and `manifest.json`
//! (per-cell status and timing). Re-running an identical config
//! reproduces `results.csv`, `summary.csv`, and `plotdata.json` byte for
//! byte; the manifest carries wall-clock times and is the one
//! non-deterministic artifact.

pub mod config;
pub mod grid;
pub mod report;

pub use config::{
    default_sad_methods, default_unsupervised_methods, ExperimentConfig, MethodConfig, MethodKind,
    Preproc,
};
pub use grid::{enumerate_cells, run_cell, run_grid, CellSpec, GridKind, GridOutcome};
pub use report::{write_manifest, write_reports, PlotData, RunManifest};

use std::path::{Path, PathBuf};

use crate::data::{load_dataset, RangeProfile};
use crate::error::Result;
use crate::metrics::save_results;
use crate::preprocess::preselect_energy;
use crate::synth::generate_benchmark;

/// Materializes the configured dataset, applying energy preselection.
pub fn load_configured_dataset(config: &ExperimentConfig) -> Result<Vec<RangeProfile>> {
    let profiles = if let Some(path) = &config.dataset.path {
        load_dataset(path)?
    } else {
        let synth = config.dataset.synth.clone().unwrap_or_default();
        generate_benchmark(synth.n_per_class, synth.seed)?
    };
    match &config.preselect {
        Some(p) => preselect_energy(&profiles, p.low_q, p.high_q),
        None => Ok(profiles),
    }
}

/// Runs a full grid and writes all artifacts into `out_dir`.
///
/// Returns whether every cell succeeded (the process exit code hinges on
/// this, but partial results are still written).
pub fn run_experiment(
    config: &ExperimentConfig,
    kind: GridKind,
    out_dir: &Path,
) -> Result<bool> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let dataset = load_configured_dataset(config)?;
    let outcome = run_grid(&dataset, config, kind)?;

    let results_path = out_dir.join("results.csv");
    save_results(&results_path, &outcome.results)?;
    write_reports(out_dir, &outcome.results)?;
    let outputs: Vec<PathBuf> = ["results.csv", "summary.csv", "plotdata.json"]
        .iter()
        .map(|f| out_dir.join(f))
        .collect();
    write_manifest(out_dir, config.hash(), kind.as_str(), &outcome.statuses, outputs)?;
    Ok(outcome.all_ok())
}
