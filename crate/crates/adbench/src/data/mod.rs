//! Canonical data model: range profiles, sample roles, train/test splits.
//!
//! All types are immutable after construction and safe to share across
//! concurrent readers.

mod io;
mod rng;

pub use io::{load_dataset, save_dataset};
pub use rng::RngStream;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Number of range cells per profile.
pub const PROFILE_CELLS: usize = 200;
/// Number of target classes in a dataset.
pub const NUM_CLASSES: u8 = 4;
/// Fraction of every class held out for testing.
pub const TEST_FRACTION: f64 = 0.10;
/// Upper bound on pollution / labeled-anomaly ratios.
pub const MAX_CONTAMINATION_RATIO: f64 = 0.10;

/// One radar-like range profile: 200 non-negative amplitudes plus a label.
#[derive(Clone, Debug, PartialEq)]
pub struct RangeProfile {
    id: u64,
    class_id: u8,
    cells: Vec<f64>,
}

impl RangeProfile {
    /// Validates and constructs a profile.
    pub fn new(id: u64, class_id: u8, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != PROFILE_CELLS {
            return Err(Error::CellCount { id, expected: PROFILE_CELLS, found: cells.len() });
        }
        if class_id >= NUM_CLASSES {
            return Err(Error::UnknownClass { id, class_id: class_id as u32 });
        }
        for (i, &v) in cells.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadAmplitude { id, cell: i, value: v });
            }
        }
        Ok(Self { id, class_id, cells })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn class_id(&self) -> u8 {
        self.class_id
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    /// Sum of squared cell amplitudes.
    pub fn energy(&self) -> f64 {
        self.cells.iter().map(|v| v * v).sum()
    }
}

/// Role a sample plays inside a training set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SampleRole {
    /// Sample of the class chosen as normal.
    Normal,
    /// Anomalous sample contaminating the training set without a label.
    UnlabeledPollution,
    /// Known anomaly carrying the semi-supervised label -1.
    LabeledAnomaly,
}

impl SampleRole {
    /// Semi-supervised label: -1 for labeled anomalies, +1 otherwise.
    pub fn semi_supervised_label(self) -> i8 {
        match self {
            SampleRole::LabeledAnomaly => -1,
            _ => 1,
        }
    }
}

/// A reproducible train/test partition for one experiment cell.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSplit {
    /// Training samples with their roles.
    pub train: Vec<(RangeProfile, SampleRole)>,
    /// Held-out samples with binary ground truth (1 = anomalous).
    pub test: Vec<(RangeProfile, u8)>,
    /// Class id that defines normality for this split.
    pub normal_class: u8,
    /// Seed the split was drawn with.
    pub seed: u64,
}

impl DatasetSplit {
    /// Training feature matrix restricted to the given roles, in train order.
    pub fn train_matrix(&self, roles: &[SampleRole]) -> Matrix {
        let rows: Vec<&[f64]> = self
            .train
            .iter()
            .filter(|(_, r)| roles.contains(r))
            .map(|(p, _)| p.cells())
            .collect();
        matrix_from_slices(&rows)
    }

    /// Test feature matrix plus ground-truth labels, in test order.
    pub fn test_matrix(&self) -> (Matrix, Vec<u8>) {
        let rows: Vec<&[f64]> = self.test.iter().map(|(p, _)| p.cells()).collect();
        let labels = self.test.iter().map(|(_, y)| *y).collect();
        (matrix_from_slices(&rows), labels)
    }

    /// Distinct class ids present in the training set.
    pub fn train_classes(&self) -> Vec<u8> {
        let mut classes: Vec<u8> = self.train.iter().map(|(p, _)| p.class_id()).collect();
        classes.sort_unstable();
        classes.dedup();
        classes
    }
}

fn matrix_from_slices(rows: &[&[f64]]) -> Matrix {
    if rows.is_empty() {
        return Matrix::zeros(0, PROFILE_CELLS);
    }
    Matrix::from_rows(rows).expect("profiles share a fixed cell count")
}

/// Builds a train/test split.
///
/// The test set holds out 10% of every class (stratified), with ground
/// truth `anomalous = class_id != normal_class`. The training set contains
/// the remaining normal-class samples, optionally contaminated: either
/// `floor(ratio * n_normal_train)` unlabeled pollution samples from
/// `pollution`'s class, or the same count of labeled anomalies from
/// `labeled`'s class. Pollution and labeled anomalies never mix. Ratios
/// are capped at 0.10. At least two anomaly classes are always absent
/// from training.
pub fn make_split(
    profiles: &[RangeProfile],
    normal_class: u8,
    pollution: Option<(u8, f64)>,
    labeled: Option<(u8, f64)>,
    seed: u64,
) -> Result<DatasetSplit> {
    if pollution.is_some() && labeled.is_some() {
        return Err(Error::MixedContamination);
    }
    let contamination = pollution
        .map(|(c, r)| (c, r, SampleRole::UnlabeledPollution))
        .or_else(|| labeled.map(|(c, r)| (c, r, SampleRole::LabeledAnomaly)));
    if let Some((class, ratio, _)) = contamination {
        if !(0.0..=MAX_CONTAMINATION_RATIO).contains(&ratio) {
            return Err(Error::RatioOutOfRange { ratio, max: MAX_CONTAMINATION_RATIO });
        }
        if class == normal_class {
            return Err(Error::ContaminationEqualsNormal { class_id: class });
        }
    }

    // Per-class index lists in dataset order.
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES as usize];
    for (i, p) in profiles.iter().enumerate() {
        by_class[p.class_id() as usize].push(i);
    }
    if by_class[normal_class as usize].is_empty() {
        return Err(Error::EmptyClass { class_id: normal_class });
    }
    if let Some((class, _, _)) = contamination {
        if by_class[class as usize].is_empty() {
            return Err(Error::EmptyClass { class_id: class });
        }
    }

    let root = RngStream::from_root(seed);
    let mut test_idx: Vec<usize> = Vec::new();
    let mut remainder: Vec<Vec<usize>> = vec![Vec::new(); NUM_CLASSES as usize];
    for class in 0..NUM_CLASSES as usize {
        let mut idx = by_class[class].clone();
        let mut rng = root.fork("split.class", class as u64).rng();
        idx.shuffle(&mut rng);
        let n_test = (idx.len() as f64 * TEST_FRACTION).floor() as usize;
        test_idx.extend_from_slice(&idx[..n_test]);
        remainder[class] = idx[n_test..].to_vec();
    }

    let mut train: Vec<(RangeProfile, SampleRole)> = remainder[normal_class as usize]
        .iter()
        .map(|&i| (profiles[i].clone(), SampleRole::Normal))
        .collect();
    let n_normal_train = train.len();

    if let Some((class, ratio, role)) = contamination {
        let n_contam = (ratio * n_normal_train as f64).floor() as usize;
        let pool = &remainder[class as usize];
        let n_contam = n_contam.min(pool.len());
        train.extend(pool[..n_contam].iter().map(|&i| (profiles[i].clone(), role)));
    }

    let test: Vec<(RangeProfile, u8)> = test_idx
        .iter()
        .map(|&i| {
            let p = profiles[i].clone();
            let truth = u8::from(p.class_id() != normal_class);
            (p, truth)
        })
        .collect();

    let split = DatasetSplit { train, test, normal_class, seed };
    debug_assert!(split.train_classes().len() <= 2);
    Ok(split)
}
