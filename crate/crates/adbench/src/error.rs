//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    // --- data model ---
    #[error("profile {id}: expected {expected} cells, found {found}")]
    CellCount { id: u64, expected: usize, found: usize },
    #[error("profile {id}: cell {cell} has invalid amplitude {value} (must be finite and >= 0)")]
    BadAmplitude { id: u64, cell: usize, value: f64 },
    #[error("profile {id}: unknown class id {class_id}")]
    UnknownClass { id: u64, class_id: u32 },
    #[error("dataset row {row}: {source}")]
    DatasetRow { row: usize, source: Box<Error> },
    #[error("dataset row {row}: {msg}")]
    DatasetFormat { row: usize, msg: String },
    #[error("dataset row {row}: duplicate profile id {id}")]
    DuplicateId { row: usize, id: u64 },

    // --- splits ---
    #[error("ratio {ratio} out of range [0, {max}]")]
    RatioOutOfRange { ratio: f64, max: f64 },
    #[error("pollution and labeled-anomaly options are mutually exclusive")]
    MixedContamination,
    #[error("class {class_id} has no samples")]
    EmptyClass { class_id: u8 },
    #[error("contaminating class {class_id} must differ from the normal class")]
    ContaminationEqualsNormal { class_id: u8 },

    // --- preprocessing ---
    #[error("quantile bounds violated: low {low} must be < high {high}, both in [0, 1]")]
    QuantileOrder { low: f64, high: f64 },
    #[error("{context}: training set is empty")]
    EmptyTrain { context: &'static str },

    // --- detectors ---
    #[error("dimension mismatch: model expects {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("{context}: need at least {min} training samples, got {found}")]
    TooFewSamples { context: &'static str, min: usize, found: usize },
    #[error("nu must lie in (0, 1], got {nu}")]
    BadNu { nu: f64 },
    #[error("one-class SVM did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    NotConverged { iterations: usize, violation: f64 },
    #[error("LOF requires more training points than neighbors: n={n}, k={k}")]
    TooFewNeighbors { n: usize, k: usize },
    #[error("all {count} random projections are degenerate (MAD below threshold)")]
    DegenerateProjections { count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    // --- network engine ---
    #[error("network shape error: {0}")]
    Shape(String),
    #[error("non-finite value detected: {context}")]
    NonFinite { context: String },
    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    // --- metrics ---
    #[error("ROC AUC needs both classes present in the labels")]
    SingleClassAuc,
    #[error("scores and labels disagree in length: {scores} vs {labels}")]
    ScoreLabelLength { scores: usize, labels: usize },
    #[error("score at index {index} is NaN")]
    NanScore { index: usize },
    #[error("label at index {index} is {value}, expected 0 or 1")]
    BadLabel { index: usize, value: u8 },
    #[error("aggregation group {group} is missing cells: {missing:?}")]
    MissingCells { group: String, missing: Vec<String> },
    #[error("duplicate result cell: {key}")]
    DuplicateCell { key: String },

    // --- harness / config ---
    #[error("config error: {0}")]
    Config(String),
    #[error("{failed} of {total} experiment cells failed")]
    CellsFailed { failed: usize, total: usize },

    // --- I/O ---
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("TOML parse error: {0}")]
    Toml(String),
    #[error("JSON error: {0}")]
    Json(String),
}
