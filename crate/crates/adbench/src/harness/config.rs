//! Experiment configuration: a single TOML file drives a whole grid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{MAX_CONTAMINATION_RATIO, NUM_CLASSES};
use crate::deep::DeepConfig;
use crate::error::{Error, Result};
use crate::nn::OptimizerConfig;

/// Where the dataset comes from: a CSV file or the synthetic generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    #[serde(default = "default_n_per_class")]
    pub n_per_class: usize,
    #[serde(default = "default_synth_seed")]
    pub seed: u64,
}

fn default_n_per_class() -> usize {
    1000
}

fn default_synth_seed() -> u64 {
    42
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { n_per_class: default_n_per_class(), seed: default_synth_seed() }
    }
}

/// Per-class energy preselection band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreselectConfig {
    #[serde(default = "default_low_q")]
    pub low_q: f64,
    #[serde(default = "default_high_q")]
    pub high_q: f64,
}

fn default_low_q() -> f64 {
    0.05
}

fn default_high_q() -> f64 {
    0.95
}

/// Detector families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Ocsvm,
    Iforest,
    Lof,
    Rpd,
    Cae,
    Dsvdd,
    DsvddPre,
    Dsad,
}

impl MethodKind {
    pub fn is_deep(self) -> bool {
        matches!(self, MethodKind::Cae | MethodKind::Dsvdd | MethodKind::DsvddPre | MethodKind::Dsad)
    }

    fn base_label(self) -> &'static str {
        match self {
            MethodKind::Ocsvm => "ocsvm",
            MethodKind::Iforest => "iforest",
            MethodKind::Lof => "lof",
            MethodKind::Rpd => "rpd",
            MethodKind::Cae => "cae",
            MethodKind::Dsvdd => "dsvdd",
            MethodKind::DsvddPre => "dsvdd_pre",
            MethodKind::Dsad => "dsad",
        }
    }
}

/// Feature pipeline variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preproc {
    Raw,
    Minmax,
    MinmaxPca,
}

impl Preproc {
    fn suffix(self) -> &'static str {
        match self {
            Preproc::Raw => "raw",
            Preproc::Minmax => "norm",
            Preproc::MinmaxPca => "norm_pca",
        }
    }
}

/// One benchmark entry: a detector plus its feature pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: MethodKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preprocess: Option<Preproc>,
}

impl MethodConfig {
    pub fn new(name: MethodKind, preprocess: Option<Preproc>) -> Self {
        Self { name, preprocess }
    }

    /// Effective preprocessing: deep methods get min-max, shallow methods
    /// default to their benchmark variant.
    pub fn effective_preprocess(&self) -> Preproc {
        self.preprocess.unwrap_or(match self.name {
            MethodKind::Ocsvm => Preproc::MinmaxPca,
            MethodKind::Iforest | MethodKind::Lof | MethodKind::Rpd => Preproc::Raw,
            _ => Preproc::Minmax,
        })
    }

    /// Stable identifier used in result rows, e.g. `iforest_norm_pca`.
    pub fn label(&self) -> String {
        if self.name.is_deep() {
            self.name.base_label().to_string()
        } else {
            format!("{}_{}", self.name.base_label(), self.effective_preprocess().suffix())
        }
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_deep() {
            if let Some(p) = self.preprocess {
                if p != Preproc::Minmax {
                    return Err(Error::Config(format!(
                        "deep method {} supports only minmax preprocessing",
                        self.name.base_label()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Sweep axes of the experiment grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_normal_classes")]
    pub normal_classes: Vec<u8>,
    #[serde(default = "default_ratios")]
    pub pollution_ratios: Vec<f64>,
    #[serde(default = "default_ratios")]
    pub labeled_ratios: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_normal_classes() -> Vec<u8> {
    (0..NUM_CLASSES).collect()
}

fn default_ratios() -> Vec<f64> {
    vec![0.0, 0.01, 0.05, 0.10]
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2]
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            normal_classes: default_normal_classes(),
            pollution_ratios: default_ratios(),
            labeled_ratios: default_ratios(),
            seeds: default_seeds(),
        }
    }
}

/// Detector hyperparameters, defaulting to the benchmark settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperParams {
    pub nu: f64,
    /// RBF width; absent means the data-driven default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub n_trees: usize,
    pub subsample: usize,
    pub k_neighbors: usize,
    pub n_projections: usize,
    /// Accepted for interface parity with threshold-based tooling; all
    /// evaluation is AUC on continuous scores, so it is never used.
    pub contamination: f64,
    pub epochs_cae: usize,
    pub epochs_dsvdd: usize,
    pub eta: f64,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub latent_dim: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            nu: 0.1,
            gamma: None,
            n_trees: 100,
            subsample: 1024,
            k_neighbors: 48,
            n_projections: 1000,
            contamination: 0.1,
            epochs_cae: 10,
            epochs_dsvdd: 20,
            eta: 1.0,
            learning_rate: 1e-3,
            weight_decay: 1e-6,
            batch_size: 128,
            latent_dim: 32,
        }
    }
}

impl HyperParams {
    pub fn deep_config(&self) -> DeepConfig {
        DeepConfig {
            epochs_cae: self.epochs_cae,
            epochs_hypersphere: self.epochs_dsvdd,
            batch_size: self.batch_size,
            eta: self.eta,
            latent_dim: self.latent_dim,
            bias: false,
            optimizer: OptimizerConfig {
                learning_rate: self.learning_rate,
                weight_decay: self.weight_decay,
                ..OptimizerConfig::default()
            },
        }
    }
}

/// Full experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preselect: Option<PreselectConfig>,
    /// Explicit method list; absent selects the grid's default battery.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<MethodConfig>>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub params: HyperParams,
}

/// The benchmark battery for the unsupervised grid.
pub fn default_unsupervised_methods() -> Vec<MethodConfig> {
    vec![
        MethodConfig::new(MethodKind::Ocsvm, Some(Preproc::MinmaxPca)),
        MethodConfig::new(MethodKind::Iforest, Some(Preproc::Raw)),
        MethodConfig::new(MethodKind::Iforest, Some(Preproc::MinmaxPca)),
        MethodConfig::new(MethodKind::Lof, Some(Preproc::Raw)),
        MethodConfig::new(MethodKind::Rpd, Some(Preproc::Raw)),
        MethodConfig::new(MethodKind::Rpd, Some(Preproc::MinmaxPca)),
        MethodConfig::new(MethodKind::Cae, None),
        MethodConfig::new(MethodKind::Dsvdd, None),
        MethodConfig::new(MethodKind::DsvddPre, None),
    ]
}

/// The semi-supervised grid runs the Deep SAD detector.
pub fn default_sad_methods() -> Vec<MethodConfig> {
    vec![MethodConfig::new(MethodKind::Dsad, None)]
}

impl ExperimentConfig {
    /// Synthetic-data configuration with all defaults.
    pub fn default_synth() -> Self {
        Self {
            dataset: DatasetConfig { path: None, synth: Some(SynthConfig::default()) },
            preselect: Some(PreselectConfig { low_q: 0.05, high_q: 0.95 }),
            methods: None,
            grid: GridConfig::default(),
            params: HyperParams::default(),
        }
    }

    /// Parses and validates a TOML config file.
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = toml::from_str(&text).map_err(|e| Error::Toml(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.dataset.path, &self.dataset.synth) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("dataset: set either path or synth, not both".into()))
            }
            (None, None) => {
                return Err(Error::Config("dataset: set one of path or synth".into()))
            }
            _ => {}
        }
        if let Some(p) = &self.preselect {
            if !(0.0..=1.0).contains(&p.low_q) || !(0.0..=1.0).contains(&p.high_q) || p.low_q >= p.high_q {
                return Err(Error::Config(format!(
                    "preselect band ({}, {}) is not an ordered sub-interval of [0, 1]",
                    p.low_q, p.high_q
                )));
            }
        }
        if self.grid.normal_classes.is_empty() || self.grid.seeds.is_empty() {
            return Err(Error::Config("grid needs at least one normal class and one seed".into()));
        }
        for &c in &self.grid.normal_classes {
            if c >= NUM_CLASSES {
                return Err(Error::Config(format!("normal class {c} out of range")));
            }
        }
        for &r in self.grid.pollution_ratios.iter().chain(&self.grid.labeled_ratios) {
            if !(0.0..=MAX_CONTAMINATION_RATIO).contains(&r) {
                return Err(Error::Config(format!(
                    "ratio {r} outside [0, {MAX_CONTAMINATION_RATIO}]"
                )));
            }
        }
        if let Some(methods) = &self.methods {
            if methods.is_empty() {
                return Err(Error::Config("methods list is empty".into()));
            }
            for m in methods {
                m.validate()?;
            }
        }
        if !(self.params.nu > 0.0 && self.params.nu <= 1.0) {
            return Err(Error::Config(format!("nu {} outside (0, 1]", self.params.nu)));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization; identical configs hash
    /// identically regardless of TOML formatting.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
