//! ROC AUC and benchmark aggregation statistics.
//!
//! AUC is computed with the rank statistic (average ranks on ties), so it
//! equals the probability that a random anomaly outscores a random normal
//! sample plus half the tie probability. Aggregation follows the benchmark
//! convention: per (method, normal class, ratio) group, mean over
//! contaminating classes of the per-seed mean, and the mean over
//! contaminating classes of the per-seed-set population standard deviation.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scores with binary ground truth (1 = anomalous).
#[derive(Clone, Debug)]
pub struct ScoredTestSet {
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
}

impl ScoredTestSet {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        validate(&scores, &labels)?;
        Ok(Self { scores, labels })
    }

    pub fn auc(&self) -> Result<f64> {
        roc_auc(&self.scores, &self.labels)
    }
}

fn validate(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::ScoreLabelLength { scores: scores.len(), labels: labels.len() });
    }
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            return Err(Error::NanScore { index: i });
        }
    }
    for (i, &y) in labels.iter().enumerate() {
        if y > 1 {
            return Err(Error::BadLabel { index: i, value: y });
        }
    }
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::SingleClassAuc);
    }
    Ok(())
}

/// Area under the ROC curve via the Mann-Whitney rank statistic.
///
/// Ties receive average ranks. Scores may be infinite but not NaN; both
/// label values must be present.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    validate(scores, labels)?;
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("NaN rejected above"));

    // Average ranks over runs of equal scores (1-based ranks).
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }

    let n_pos = labels.iter().filter(|&&y| y == 1).count() as f64;
    let n_neg = n as f64 - n_pos;
    let rank_sum_pos: f64 =
        ranks.iter().zip(labels).filter(|(_, &y)| y == 1).map(|(r, _)| r).sum();
    let u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
    Ok(u / (n_pos * n_neg))
}

/// How a training set was contaminated for a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContamKind {
    None,
    Pollution,
    Labeled,
}

impl std::fmt::Display for ContamKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ContamKind::None => write!(f, "none"),
            ContamKind::Pollution => write!(f, "pollution"),
            ContamKind::Labeled => write!(f, "labeled"),
        }
    }
}

/// One experiment cell outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: String,
    pub normal_class: u8,
    pub contam_class: Option<u8>,
    pub contam_kind: ContamKind,
    pub ratio: f64,
    pub seed: u64,
    pub auc: f64,
}

impl CellResult {
    /// Stable ordering key used to sort results before writing.
    pub fn sort_key(&self) -> (String, u8, u8, u8, u64, u64) {
        let kind = match self.contam_kind {
            ContamKind::None => 0,
            ContamKind::Pollution => 1,
            ContamKind::Labeled => 2,
        };
        (
            self.method.clone(),
            self.normal_class,
            kind,
            self.contam_class.unwrap_or(0),
            self.ratio.to_bits(),
            self.seed,
        )
    }
}

/// Aggregated summary for one (method, normal class, ratio) group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub method: String,
    pub normal_class: u8,
    pub ratio: f64,
    pub mean_auc: f64,
    pub mean_std: f64,
}

fn population_std(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

/// Aggregates cell results into per-(method, normal class, ratio) summaries.
///
/// Within a group, each contaminating class contributes the mean of its
/// per-seed AUCs and the population standard deviation over those seeds;
/// the group reports the mean of both across contaminating classes. Every
/// (contaminating class, seed) combination observed in a group must be
/// complete, otherwise the missing cells are reported.
pub fn aggregate(results: &[CellResult]) -> Result<Vec<GroupSummary>> {
    type GroupKey = (String, u8, u64);
    let mut groups: BTreeMap<GroupKey, BTreeMap<Option<u8>, BTreeMap<u64, f64>>> = BTreeMap::new();
    for r in results {
        let key = (r.method.clone(), r.normal_class, r.ratio.to_bits());
        let by_contam = groups.entry(key.clone()).or_default();
        let by_seed = by_contam.entry(r.contam_class).or_default();
        if by_seed.insert(r.seed, r.auc).is_some() {
            return Err(Error::DuplicateCell {
                key: format!(
                    "{} normal={} contam={:?} ratio={} seed={}",
                    r.method, r.normal_class, r.contam_class, r.ratio, r.seed
                ),
            });
        }
    }

    let mut summaries = Vec::with_capacity(groups.len());
    for ((method, normal_class, ratio_bits), by_contam) in groups {
        let mut all_seeds: Vec<u64> = by_contam.values().flat_map(|m| m.keys().copied()).collect();
        all_seeds.sort_unstable();
        all_seeds.dedup();
        let mut missing = Vec::new();
        for (contam, by_seed) in &by_contam {
            for seed in &all_seeds {
                if !by_seed.contains_key(seed) {
                    missing.push(format!("contam={contam:?} seed={seed}"));
                }
            }
        }
        let ratio = f64::from_bits(ratio_bits);
        if !missing.is_empty() {
            return Err(Error::MissingCells {
                group: format!("{method} normal={normal_class} ratio={ratio}"),
                missing,
            });
        }
        let mut means = Vec::with_capacity(by_contam.len());
        let mut stds = Vec::with_capacity(by_contam.len());
        for by_seed in by_contam.values() {
            let aucs: Vec<f64> = by_seed.values().copied().collect();
            means.push(aucs.iter().sum::<f64>() / aucs.len() as f64);
            stds.push(population_std(&aucs));
        }
        summaries.push(GroupSummary {
            method,
            normal_class,
            ratio,
            mean_auc: means.iter().sum::<f64>() / means.len() as f64,
            mean_std: stds.iter().sum::<f64>() / stds.len() as f64,
        });
    }
    Ok(summaries)
}

/// Writes cell results as CSV: `method,normal_class,contam_class,contam_kind,ratio,seed,auc`.
pub fn save_results<P: AsRef<Path>>(path: P, results: &[CellResult]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["method", "normal_class", "contam_class", "contam_kind", "ratio", "seed", "auc"])?;
    for r in results {
        writer.write_record([
            r.method.clone(),
            r.normal_class.to_string(),
            r.contam_class.map(|c| c.to_string()).unwrap_or_default(),
            r.contam_kind.to_string(),
            r.ratio.to_string(),
            r.seed.to_string(),
            r.auc.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads cell results written by [`save_results`].
pub fn load_results<P: AsRef<Path>>(path: P) -> Result<Vec<CellResult>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let rec = record?;
        let field = |idx: usize, name: &str| -> Result<String> {
            rec.get(idx).map(str::to_string).ok_or_else(|| Error::DatasetFormat {
                row,
                msg: format!("missing column {name}"),
            })
        };
        let contam_raw = field(2, "contam_class")?;
        let contam_class = if contam_raw.is_empty() {
            None
        } else {
            Some(contam_raw.parse::<u8>().map_err(|_| Error::DatasetFormat {
                row,
                msg: format!("bad contam_class {contam_raw:?}"),
            })?)
        };
        let kind = match field(3, "contam_kind")?.as_str() {
            "none" => ContamKind::None,
            "pollution" => ContamKind::Pollution,
            "labeled" => ContamKind::Labeled,
            other => {
                return Err(Error::DatasetFormat { row, msg: format!("bad contam_kind {other:?}") })
            }
        };
        let parse_f64 = |s: &str, name: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::DatasetFormat { row, msg: format!("bad {name} {s:?}") })
        };
        out.push(CellResult {
            method: field(0, "method")?,
            normal_class: field(1, "normal_class")?.parse::<u8>().map_err(|_| {
                Error::DatasetFormat { row, msg: "bad normal_class".to_string() }
            })?,
            contam_class,
            contam_kind: kind,
            ratio: parse_f64(&field(4, "ratio")?, "ratio")?,
            seed: field(5, "seed")?
                .parse::<u64>()
                .map_err(|_| Error::DatasetFormat { row, msg: "bad seed".to_string() })?,
            auc: parse_f64(&field(6, "auc")?, "auc")?,
        });
    }
    Ok(out)
}
