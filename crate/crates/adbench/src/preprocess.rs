//! Preprocessing chain: energy preselection, min-max normalization, and
//! PCA retaining 95% of the variance.
//!
//! Normalization and PCA statistics are always fitted on training samples
//! only; fitted transforms are immutable and safe for concurrent use.
//! Shallow detectors may run either on raw cells or on minmax+PCA
//! features; deep detectors receive min-max normalization only.

use nalgebra::DMatrix;

use crate::data::RangeProfile;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Linear-interpolation empirical quantile of an ascending-sorted slice.
fn quantile_linear(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Keeps profiles whose total energy lies within the per-class empirical
/// quantile band `[low_q, high_q]` (inclusive bounds, linear interpolation).
///
/// Input order is preserved.
pub fn preselect_energy(
    profiles: &[RangeProfile],
    low_q: f64,
    high_q: f64,
) -> Result<Vec<RangeProfile>> {
    if !(0.0..=1.0).contains(&low_q) || !(0.0..=1.0).contains(&high_q) || low_q >= high_q {
        return Err(Error::QuantileOrder { low: low_q, high: high_q });
    }
    let mut classes: Vec<u8> = profiles.iter().map(|p| p.class_id()).collect();
    classes.sort_unstable();
    classes.dedup();

    let mut bounds = std::collections::HashMap::new();
    for &class in &classes {
        let mut energies: Vec<f64> =
            profiles.iter().filter(|p| p.class_id() == class).map(|p| p.energy()).collect();
        energies.sort_by(|a, b| a.partial_cmp(b).expect("energies are finite"));
        let lo = quantile_linear(&energies, low_q);
        let hi = quantile_linear(&energies, high_q);
        bounds.insert(class, (lo, hi));
    }
    Ok(profiles
        .iter()
        .filter(|p| {
            let (lo, hi) = bounds[&p.class_id()];
            let e = p.energy();
            e >= lo && e <= hi
        })
        .cloned()
        .collect())
}

/// Per-cell min/max statistics fitted on training data.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxStats {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl MinMaxStats {
    /// Fits per-cell minima and maxima.
    pub fn fit(train: &Matrix) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyTrain { context: "min-max fit" });
        }
        let d = train.ncols();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in train.rows_iter() {
            for i in 0..d {
                min[i] = min[i].min(row[i]);
                max[i] = max[i].max(row[i]);
            }
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    /// Maps each cell through `(x - min) / (max - min)`.
    ///
    /// Training data lands in [0, 1]; test data may exceed the interval (no
    /// clipping). A constant cell maps to 0.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.min.len() {
            return Err(Error::DimMismatch { expected: self.min.len(), found: x.len() });
        }
        Ok(x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let range = self.max[i] - self.min[i];
                if range > 0.0 {
                    (v - self.min[i]) / range
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Result<Matrix> {
        let rows: Result<Vec<Vec<f64>>> = m.rows_iter().map(|r| self.apply(r)).collect();
        Matrix::from_rows(&rows?)
    }
}

/// PCA model: mean, orthonormal components, and explained variances.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// `k` principal directions, each of input dimension.
    components: Vec<Vec<f64>>,
    /// Variance explained by each kept component, descending.
    explained_variance: Vec<f64>,
    /// Total variance of the training data.
    total_variance: f64,
}

impl PcaModel {
    /// Fits PCA on the training matrix via SVD of the centered data and
    /// keeps the smallest `k` whose cumulative explained variance ratio
    /// reaches `variance_target`, capped at the matrix rank.
    pub fn fit(train: &Matrix, variance_target: f64) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyTrain { context: "PCA fit" });
        }
        if !(0.0 < variance_target && variance_target <= 1.0) {
            return Err(Error::InvalidParam(format!("variance target {variance_target}")));
        }
        let n = train.nrows();
        let d = train.ncols();
        let mean = train.col_means();
        let mut centered = Vec::with_capacity(n * d);
        for row in train.rows_iter() {
            centered.extend(row.iter().zip(&mean).map(|(v, m)| v - m));
        }
        let svd = DMatrix::from_row_slice(n, d, &centered).svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
        let mut spectrum: Vec<(f64, Vec<f64>)> = svd
            .singular_values
            .iter()
            .enumerate()
            .map(|(i, &s)| (s * s / denom, v_t.row(i).iter().copied().collect()))
            .collect();
        spectrum.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("variances are finite"));

        let total_variance: f64 = spectrum.iter().map(|(v, _)| v).sum();
        let s_max = spectrum.first().map(|(v, _)| v.sqrt()).unwrap_or(0.0);
        let tol = (n.max(d) as f64) * f64::EPSILON * s_max.max(1.0);
        let rank = spectrum.iter().filter(|(v, _)| v.sqrt() > tol).count();

        if rank == 0 || total_variance <= 0.0 {
            // Degenerate training set (a single point or all-identical rows):
            // keep one arbitrary axis so projections stay well-formed.
            let mut e1 = vec![0.0; d];
            e1[0] = 1.0;
            return Ok(Self {
                mean,
                components: vec![e1],
                explained_variance: vec![0.0],
                total_variance: 0.0,
            });
        }

        let mut k = rank;
        let mut cumulative = 0.0;
        for (i, (v, _)) in spectrum.iter().take(rank).enumerate() {
            cumulative += v;
            if cumulative / total_variance >= variance_target {
                k = i + 1;
                break;
            }
        }
        let (explained_variance, components): (Vec<f64>, Vec<Vec<f64>>) =
            spectrum.into_iter().take(k).unzip();
        Ok(Self { mean, components, explained_variance, total_variance })
    }

    /// Number of components kept.
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    /// Fraction of total variance captured by the kept components.
    pub fn explained_ratio(&self) -> f64 {
        if self.total_variance > 0.0 {
            self.explained_variance.iter().sum::<f64>() / self.total_variance
        } else {
            1.0
        }
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Projects onto the kept principal directions.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimMismatch { expected: self.mean.len(), found: x.len() });
        }
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        Ok(self.components.iter().map(|c| dot(c, &centered)).collect())
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Result<Matrix> {
        let rows: Result<Vec<Vec<f64>>> = m.rows_iter().map(|r| self.apply(r)).collect();
        Matrix::from_rows(&rows?)
    }

    /// Inverse projection back into input space.
    pub fn reconstruct(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.components.len() {
            return Err(Error::DimMismatch { expected: self.components.len(), found: z.len() });
        }
        let mut out = self.mean.clone();
        for (zi, comp) in z.iter().zip(&self.components) {
            for (o, c) in out.iter_mut().zip(comp) {
                *o += zi * c;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{RngStream, PROFILE_CELLS};
    use crate::matrix::sq_dist;
    use crate::synth;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn profile_with_energy(id: u64, class: u8, level: f64) -> RangeProfile {
        let mut cells = vec![0.0; PROFILE_CELLS];
        cells[0] = level;
        RangeProfile::new(id, class, cells).unwrap()
    }

    #[test]
    fn full_band_is_identity() {
        let profiles: Vec<RangeProfile> =
            (0..20).map(|i| profile_with_energy(i, 0, i as f64 + 1.0)).collect();
        let kept = preselect_energy(&profiles, 0.0, 1.0).unwrap();
        assert_eq!(kept, profiles);
    }

    #[test]
    fn quantile_band_keeps_90_or_91_of_100() {
        let mut rng = RngStream::from_root(4).fork("preselect", 0).rng();
        let profiles: Vec<RangeProfile> = (0..100)
            .map(|i| {
                let z: f64 = StandardNormal.sample(&mut rng);
                profile_with_energy(i, 0, z.abs() + 0.1)
            })
            .collect();
        let kept = preselect_energy(&profiles, 0.05, 0.95).unwrap();

        // Sort-based oracle: count energies inside the interpolated band.
        let mut energies: Vec<f64> = profiles.iter().map(|p| p.energy()).collect();
        energies.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lo = quantile_linear(&energies, 0.05);
        let hi = quantile_linear(&energies, 0.95);
        let expected = energies.iter().filter(|&&e| e >= lo && e <= hi).count();
        assert_eq!(kept.len(), expected);
        assert!(kept.len() == 90 || kept.len() == 91, "kept {}", kept.len());
    }

    #[test]
    fn zero_profile_is_dropped_at_low_quantile() {
        let mut profiles = vec![profile_with_energy(0, 0, 0.0)];
        profiles.extend((1..100).map(|i| profile_with_energy(i, 0, 1.0 + i as f64)));
        let kept = preselect_energy(&profiles, 0.05, 1.0).unwrap();
        assert!(kept.iter().all(|p| p.id() != 0));
    }

    #[test]
    fn bad_quantile_order_rejected() {
        let profiles = vec![profile_with_energy(0, 0, 1.0)];
        assert!(preselect_energy(&profiles, 0.9, 0.1).is_err());
        assert!(preselect_energy(&profiles, 0.5, 0.5).is_err());
    }

    #[test]
    fn minmax_worked_example() {
        let train = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, 4.0]]).unwrap();
        let stats = MinMaxStats::fit(&train).unwrap();
        assert_eq!(stats.min(), &[0.0, 1.0]);
        assert_eq!(stats.max(), &[2.0, 4.0]);
        assert_eq!(stats.apply(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        // The train minimum vector maps to all zeros.
        assert_eq!(stats.apply(&[0.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        // Test values beyond the training range are not clipped.
        assert_eq!(stats.apply(&[0.0, 6.0]).unwrap()[1], 5.0 / 3.0);
    }

    #[test]
    fn constant_cell_maps_to_zero() {
        let train = Matrix::from_rows(&[vec![3.0, 1.0], vec![3.0, 2.0]]).unwrap();
        let stats = MinMaxStats::fit(&train).unwrap();
        assert_eq!(stats.apply(&[7.0, 1.5]).unwrap()[0], 0.0);
    }

    proptest! {
        #[test]
        fn minmax_is_order_preserving_per_cell(
            lo in -100.0f64..100.0,
            span in 0.1f64..50.0,
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
        ) {
            let train = Matrix::from_rows(&[vec![lo], vec![lo + span]]).unwrap();
            let stats = MinMaxStats::fit(&train).unwrap();
            let (x, y) = (lo + a * span, lo + b * span);
            let fx = stats.apply(&[x]).unwrap()[0];
            let fy = stats.apply(&[y]).unwrap()[0];
            prop_assert_eq!(x < y, fx < fy);
            prop_assert_eq!(x == y, fx == fy);
        }
    }

    #[test]
    fn points_on_a_line_need_one_component() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let pca = PcaModel::fit(&Matrix::from_rows(&rows).unwrap(), 0.95).unwrap();
        assert_eq!(pca.k(), 1);
        assert!((pca.explained_ratio() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isotropic_gaussian_needs_all_components() {
        let mut rng = RngStream::from_root(8).fork("pca.iso", 0).rng();
        let rows: Vec<Vec<f64>> = (0..500)
            .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let pca = PcaModel::fit(&Matrix::from_rows(&rows).unwrap(), 0.95).unwrap();
        assert_eq!(pca.k(), 3);
    }

    #[test]
    fn components_are_orthonormal() {
        let data = synth::generate_benchmark(50, 2).unwrap();
        let rows: Vec<Vec<f64>> = data.iter().map(|p| p.cells().to_vec()).collect();
        let pca = PcaModel::fit(&Matrix::from_rows(&rows).unwrap(), 0.95).unwrap();
        let comps = pca.components();
        for i in 0..comps.len() {
            for j in 0..comps.len() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot(&comps[i], &comps[j]) - expected).abs() < 1e-10,
                    "C^T C deviates at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn reconstruction_error_respects_variance_bound() {
        let data = synth::generate_benchmark(80, 5).unwrap();
        let rows: Vec<Vec<f64>> =
            data.iter().filter(|p| p.class_id() == 0).map(|p| p.cells().to_vec()).collect();
        let train = Matrix::from_rows(&rows).unwrap();
        let pca = PcaModel::fit(&train, 0.95).unwrap();
        let mean_err: f64 = train
            .rows_iter()
            .map(|r| {
                let rec = pca.reconstruct(&pca.apply(r).unwrap()).unwrap();
                sq_dist(r, &rec)
            })
            .sum::<f64>()
            / train.nrows() as f64;
        // PCA optimality: mean residual equals the discarded variance, which
        // is at most 5% of the total (times d vs n-1 normalization slack).
        let bound = (1.0 - 0.95) * pca.total_variance() * (train.nrows() as f64)
            / (train.nrows() as f64 - 1.0).max(1.0);
        assert!(mean_err <= bound + 1e-9, "mean_err {mean_err} > bound {bound}");
    }

    #[test]
    fn normal_class_choice_changes_the_model() {
        let data = synth::generate_benchmark(60, 9).unwrap();
        let rows_for = |class: u8| -> Matrix {
            let rows: Vec<Vec<f64>> = data
                .iter()
                .filter(|p| p.class_id() == class)
                .map(|p| p.cells().to_vec())
                .collect();
            Matrix::from_rows(&rows).unwrap()
        };
        let pca_a = PcaModel::fit(&rows_for(0), 0.95).unwrap();
        let pca_b = PcaModel::fit(&rows_for(3), 0.95).unwrap();
        assert_ne!(pca_a.components(), pca_b.components());
    }

    #[test]
    fn degenerate_rank_is_capped() {
        let train = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let pca = PcaModel::fit(&train, 0.95).unwrap();
        assert_eq!(pca.k(), 1);
        assert_eq!(pca.explained_variance(), &[0.0]);
        assert_eq!(pca.apply(&[1.0, 1.0]).unwrap(), vec![0.0]);
    }
}
