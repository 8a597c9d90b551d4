//! Grid enumeration and per-cell execution.
//!
//! A cell is one (method, normal class, contamination, ratio, seed)
//! configuration. Cells are independent jobs: each derives its own
//! random streams from its coordinates alone, so results do not depend on
//! scheduling or worker count, and a failing cell never voids the grid.

use std::time::Instant;

use crate::data::{make_split, RangeProfile, RngStream, SampleRole, NUM_CLASSES};
use crate::deep::{cae_train, dsad_train, dsvdd_train};
use crate::error::{Error, Result};
use crate::harness::config::{
    default_sad_methods, default_unsupervised_methods, ExperimentConfig, MethodConfig, MethodKind,
    Preproc,
};
use crate::matrix::Matrix;
use crate::metrics::{roc_auc, CellResult, ContamKind};
use crate::par;
use crate::preprocess::{MinMaxStats, PcaModel};
use crate::shallow::{
    iforest_fit, lof_fit, ocsvm_fit, rpd_fit, IsolationForestParams, LofParams, OcSvmParams,
    RpdParams, Scorer,
};

/// Which experiment protocol a run follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// Normal-class training, optionally polluted by unlabeled anomalies.
    Unsupervised,
    /// Normal-class training plus labeled anomalies (semi-supervised).
    Sad,
}

impl GridKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GridKind::Unsupervised => "unsup",
            GridKind::Sad => "sad",
        }
    }
}

/// One cell of the experiment grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSpec {
    pub method: MethodConfig,
    pub normal_class: u8,
    pub contam: Option<(ContamKind, u8)>,
    pub ratio: f64,
    pub seed: u64,
}

impl CellSpec {
    pub fn label(&self) -> String {
        let contam = match self.contam {
            Some((_, class)) => class.to_string(),
            None => "-".to_string(),
        };
        format!(
            "{} normal={} contam={} ratio={} seed={}",
            self.method.label(),
            self.normal_class,
            contam,
            self.ratio,
            self.seed
        )
    }
}

/// Execution record for the run manifest.
#[derive(Clone, Debug)]
pub struct CellStatus {
    pub cell: CellSpec,
    pub outcome: std::result::Result<f64, String>,
    pub wall_ms: u64,
}

/// Everything a grid run produces.
pub struct GridOutcome {
    pub results: Vec<CellResult>,
    pub statuses: Vec<CellStatus>,
}

impl GridOutcome {
    pub fn all_ok(&self) -> bool {
        self.statuses.iter().all(|s| s.outcome.is_ok())
    }
}

fn methods_for(config: &ExperimentConfig, kind: GridKind) -> Result<Vec<MethodConfig>> {
    let methods = match &config.methods {
        Some(m) => m.clone(),
        None => match kind {
            GridKind::Unsupervised => default_unsupervised_methods(),
            GridKind::Sad => default_sad_methods(),
        },
    };
    for m in &methods {
        match kind {
            GridKind::Unsupervised if m.name == MethodKind::Dsad => {
                return Err(Error::Config(
                    "dsad is a semi-supervised method; run it with the sad grid".into(),
                ))
            }
            GridKind::Sad if m.name != MethodKind::Dsad => {
                return Err(Error::Config(format!(
                    "the sad grid runs dsad only, found {}",
                    m.label()
                )))
            }
            _ => {}
        }
    }
    Ok(methods)
}

/// Enumerates every cell of a grid in a fixed deterministic order.
///
/// Zero-ratio cells carry no contaminating class and appear once per
/// (method, normal class, seed); contaminated cells enumerate every
/// anomalous class at every non-zero ratio.
pub fn enumerate_cells(config: &ExperimentConfig, kind: GridKind) -> Result<Vec<CellSpec>> {
    let methods = methods_for(config, kind)?;
    let (ratios, contam_kind) = match kind {
        GridKind::Unsupervised => (&config.grid.pollution_ratios, ContamKind::Pollution),
        GridKind::Sad => (&config.grid.labeled_ratios, ContamKind::Labeled),
    };
    let mut cells = Vec::new();
    for method in &methods {
        for &normal in &config.grid.normal_classes {
            for &seed in &config.grid.seeds {
                if ratios.contains(&0.0) {
                    cells.push(CellSpec {
                        method: *method,
                        normal_class: normal,
                        contam: None,
                        ratio: 0.0,
                        seed,
                    });
                }
                for &ratio in ratios.iter().filter(|&&r| r > 0.0) {
                    for contam_class in (0..NUM_CLASSES).filter(|&c| c != normal) {
                        cells.push(CellSpec {
                            method: *method,
                            normal_class: normal,
                            contam: Some((contam_kind, contam_class)),
                            ratio,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Stream tree for one cell, keyed purely by the cell coordinates.
fn cell_stream(method_label: &str, cell: &CellSpec) -> RngStream {
    let contam_code = match cell.contam {
        None => 0,
        Some((ContamKind::Pollution, class)) => 0x100 + class as u64,
        Some((ContamKind::Labeled, class)) => 0x200 + class as u64,
        Some((ContamKind::None, _)) => 0,
    };
    RngStream::from_root(cell.seed)
        .fork(method_label, 0)
        .fork("normal", cell.normal_class as u64)
        .fork("contam", contam_code)
        .fork("ratio", cell.ratio.to_bits())
}

struct CellFeatures {
    train: Matrix,
    labeled: Matrix,
    test: Matrix,
    labels: Vec<u8>,
}

/// Builds the split and applies the method's feature pipeline.
///
/// Normalization and PCA statistics are fitted on the nominally-normal
/// training rows (roles Normal and UnlabeledPollution); labeled anomalies
/// and the test set are only ever transformed.
fn prepare_features(
    dataset: &[RangeProfile],
    cell: &CellSpec,
    preproc: Preproc,
) -> Result<CellFeatures> {
    let (pollution, labeled) = match cell.contam {
        Some((ContamKind::Pollution, class)) => (Some((class, cell.ratio)), None),
        Some((ContamKind::Labeled, class)) => (None, Some((class, cell.ratio))),
        _ => (None, None),
    };
    let split = make_split(dataset, cell.normal_class, pollution, labeled, cell.seed)?;

    // Protocol purity: pollution and labeled anomalies never co-occur.
    debug_assert!(
        !(split.train.iter().any(|(_, r)| *r == SampleRole::UnlabeledPollution)
            && split.train.iter().any(|(_, r)| *r == SampleRole::LabeledAnomaly))
    );

    let train = split.train_matrix(&[SampleRole::Normal, SampleRole::UnlabeledPollution]);
    let labeled = split.train_matrix(&[SampleRole::LabeledAnomaly]);
    let (test, labels) = split.test_matrix();

    let apply_all = |f: &dyn Fn(&Matrix) -> Result<Matrix>| -> Result<(Matrix, Matrix, Matrix)> {
        Ok((f(&train)?, if labeled.is_empty() { labeled.clone() } else { f(&labeled)? }, f(&test)?))
    };

    let (train, labeled, test) = match preproc {
        Preproc::Raw => (train.clone(), labeled.clone(), test.clone()),
        Preproc::Minmax => {
            let stats = MinMaxStats::fit(&train)?;
            apply_all(&|m| stats.apply_matrix(m))?
        }
        Preproc::MinmaxPca => {
            let stats = MinMaxStats::fit(&train)?;
            let normalized = stats.apply_matrix(&train)?;
            let pca = PcaModel::fit(&normalized, 0.95)?;
            apply_all(&|m| pca.apply_matrix(&stats.apply_matrix(m)?))?
        }
    };
    Ok(CellFeatures { train, labeled, test, labels })
}

/// Runs one cell end to end and returns its AUC row.
pub fn run_cell(
    dataset: &[RangeProfile],
    cell: &CellSpec,
    config: &ExperimentConfig,
) -> Result<CellResult> {
    let label = cell.method.label();
    let features = prepare_features(dataset, cell, cell.method.effective_preprocess())?;
    let params = &config.params;
    let stream = cell_stream(&label, cell);
    let deep_cfg = params.deep_config();

    let scorer: Box<dyn Scorer> = match cell.method.name {
        MethodKind::Ocsvm => Box::new(ocsvm_fit(
            &features.train,
            &OcSvmParams { nu: params.nu, gamma: params.gamma, ..OcSvmParams::default() },
        )?),
        MethodKind::Iforest => Box::new(iforest_fit(
            &features.train,
            &IsolationForestParams { n_trees: params.n_trees, subsample: params.subsample },
            &stream,
        )?),
        MethodKind::Lof => {
            Box::new(lof_fit(&features.train, &LofParams { k: params.k_neighbors })?)
        }
        MethodKind::Rpd => Box::new(rpd_fit(
            &features.train,
            &RpdParams { n_projections: params.n_projections },
            &stream,
        )?),
        MethodKind::Cae => Box::new(cae_train(&features.train, &deep_cfg, &stream)?),
        MethodKind::Dsvdd => Box::new(dsvdd_train(&features.train, None, &deep_cfg, &stream)?),
        MethodKind::DsvddPre => {
            // The pretraining autoencoder reuses the cae method's stream at
            // identical cell coordinates, so it is the very model the cae
            // row reports.
            let cae_stream = cell_stream(&MethodConfig::new(MethodKind::Cae, None).label(), cell);
            let cae = cae_train(&features.train, &deep_cfg, &cae_stream)?;
            let (_, encoder_params) = cae.encoder();
            Box::new(dsvdd_train(&features.train, Some(encoder_params), &deep_cfg, &stream)?)
        }
        MethodKind::Dsad => {
            Box::new(dsad_train(&features.train, &features.labeled, &deep_cfg, &stream)?)
        }
    };

    let scores = scorer.score_batch(&features.test)?;
    let auc = roc_auc(&scores, &features.labels)?;
    Ok(CellResult {
        method: label,
        normal_class: cell.normal_class,
        contam_class: cell.contam.map(|(_, c)| c),
        contam_kind: cell.contam.map(|(k, _)| k).unwrap_or(ContamKind::None),
        ratio: cell.ratio,
        seed: cell.seed,
        auc,
    })
}

/// Runs every cell (in parallel when enabled), isolating failures.
///
/// Result rows are sorted by cell key so output bytes are independent of
/// scheduling.
pub fn run_grid(
    dataset: &[RangeProfile],
    config: &ExperimentConfig,
    kind: GridKind,
) -> Result<GridOutcome> {
    let cells = enumerate_cells(config, kind)?;
    let statuses: Vec<CellStatus> = par::map_slice(&cells, |cell| {
        let start = Instant::now();
        let outcome = match run_cell(dataset, cell, config) {
            Ok(result) => Ok(result.auc),
            Err(e) => {
                log::error!("cell failed: {}: {e}", cell.label());
                Err(e.to_string())
            }
        };
        CellStatus { cell: cell.clone(), outcome, wall_ms: start.elapsed().as_millis() as u64 }
    });

    let mut results: Vec<CellResult> = statuses
        .iter()
        .filter_map(|s| {
            s.outcome.as_ref().ok().map(|&auc| CellResult {
                method: s.cell.method.label(),
                normal_class: s.cell.normal_class,
                contam_class: s.cell.contam.map(|(_, c)| c),
                contam_kind: s.cell.contam.map(|(k, _)| k).unwrap_or(ContamKind::None),
                ratio: s.cell.ratio,
                seed: s.cell.seed,
                auc,
            })
        })
        .collect();
    results.sort_by_key(|a| a.sort_key());
    Ok(GridOutcome { results, statuses })
}
