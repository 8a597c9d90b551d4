//! Run outputs: summary CSV, plot-ready JSON, and the run manifest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::grid::CellStatus;
use crate::metrics::{aggregate, CellResult, ContamKind, GroupSummary};

/// Plot-ready aggregation, one group per (method, normal class, ratio).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub schema_version: u32,
    pub groups: Vec<GroupSummary>,
}

/// Writes `summary.csv` and `plotdata.json`; returns the summaries.
pub fn write_reports(out_dir: &Path, results: &[CellResult]) -> Result<Vec<GroupSummary>> {
    let summaries = aggregate(results)?;

    let mut writer = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    writer.write_record(["method", "normal_class", "ratio", "mean_auc", "mean_std"])?;
    for s in &summaries {
        writer.write_record([
            s.method.clone(),
            s.normal_class.to_string(),
            s.ratio.to_string(),
            s.mean_auc.to_string(),
            s.mean_std.to_string(),
        ])?;
    }
    writer.flush()?;

    let plot = PlotData { schema_version: 1, groups: summaries.clone() };
    let json = serde_json::to_string_pretty(&plot).map_err(|e| Error::Json(e.to_string()))?;
    std::fs::write(out_dir.join("plotdata.json"), json + "\n")?;
    Ok(summaries)
}

/// Per-cell entry of the run manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestCell {
    pub method: String,
    pub normal_class: u8,
    pub contam_kind: ContamKind,
    pub contam_class: Option<u8>,
    pub ratio: f64,
    pub seed: u64,
    pub status: String,
    pub wall_ms: u64,
}

/// Execution record of a whole run. Timings vary between runs; every other
/// output file is byte-deterministic for a given config.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub config_hash: String,
    pub grid: String,
    pub cells: Vec<ManifestCell>,
    pub outputs: Vec<PathBuf>,
}

pub fn write_manifest(
    out_dir: &Path,
    config_hash: String,
    grid: &str,
    statuses: &[CellStatus],
    outputs: Vec<PathBuf>,
) -> Result<()> {
    let cells = statuses
        .iter()
        .map(|s| ManifestCell {
            method: s.cell.method.label(),
            normal_class: s.cell.normal_class,
            contam_kind: s.cell.contam.map(|(k, _)| k).unwrap_or(ContamKind::None),
            contam_class: s.cell.contam.map(|(_, c)| c),
            ratio: s.cell.ratio,
            seed: s.cell.seed,
            status: match &s.outcome {
                Ok(_) => "ok".to_string(),
                Err(msg) => format!("failed: {msg}"),
            },
            wall_ms: s.wall_ms,
        })
        .collect();
    let manifest = RunManifest {
        schema_version: 1,
        config_hash,
        grid: grid.to_string(),
        cells,
        outputs,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Json(e.to_string()))?;
    std::fs::write(out_dir.join("manifest.json"), json + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(method: &str, normal: u8, ratio: f64, seed: u64, auc: f64) -> CellResult {
        CellResult {
            method: method.into(),
            normal_class: normal,
            contam_class: if ratio > 0.0 { Some((normal + 1) % 4) } else { None },
            contam_kind: if ratio > 0.0 { ContamKind::Pollution } else { ContamKind::None },
            ratio,
            seed,
            auc,
        }
    }

    #[test]
    fn summary_row_count_matches_grouping() {
        // 6 methods x 4 classes x 4 ratios, 2 seeds each -> 96 summary rows.
        let mut results = Vec::new();
        for m in 0..6 {
            for class in 0..4u8 {
                for ratio in [0.0, 0.01, 0.05, 0.10] {
                    for seed in 0..2u64 {
                        results.push(cell(&format!("m{m}"), class, ratio, seed, 0.9));
                    }
                }
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let summaries = write_reports(dir.path(), &results).unwrap();
        assert_eq!(summaries.len(), 96);
        assert!(dir.path().join("summary.csv").exists());
    }

    #[test]
    fn plotdata_validates_against_schema() {
        let results =
            vec![cell("m", 0, 0.0, 0, 0.875), cell("m", 0, 0.0, 1, 0.75)];
        let dir = tempfile::tempdir().unwrap();
        write_reports(dir.path(), &results).unwrap();
        let text = std::fs::read_to_string(dir.path().join("plotdata.json")).unwrap();
        let parsed: PlotData = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.schema_version, 1);
        assert_eq!(parsed.groups.len(), 1);
        assert!((parsed.groups[0].mean_auc - 0.8125).abs() < 1e-12);
    }

    #[test]
    fn aggregated_values_match_hand_aggregation() {
        // Two pollution classes, two seeds each.
        let rows = vec![
            CellResult { method: "m".into(), normal_class: 0, contam_class: Some(1), contam_kind: ContamKind::Pollution, ratio: 0.05, seed: 0, auc: 0.90 },
            CellResult { method: "m".into(), normal_class: 0, contam_class: Some(1), contam_kind: ContamKind::Pollution, ratio: 0.05, seed: 1, auc: 0.80 },
            CellResult { method: "m".into(), normal_class: 0, contam_class: Some(2), contam_kind: ContamKind::Pollution, ratio: 0.05, seed: 0, auc: 0.70 },
            CellResult { method: "m".into(), normal_class: 0, contam_class: Some(2), contam_kind: ContamKind::Pollution, ratio: 0.05, seed: 1, auc: 0.60 },
        ];
        let dir = tempfile::tempdir().unwrap();
        let summaries = write_reports(dir.path(), &rows).unwrap();
        // Per-class means 0.85 and 0.65 -> 0.75; per-class stds 0.05 each.
        assert!((summaries[0].mean_auc - 0.75).abs() < 1e-12);
        assert!((summaries[0].mean_std - 0.05).abs() < 1e-12);
    }
}
