//! Neighborhood-masked Gaussian kernels over a view manifold and over the
//! ideal unit-circle manifold, plus the alignment measures that compare them.
//!
//! Every kernel entry is `exp(-d^2 / (2 sigma^2))` for pairs inside the
//! `n`-neighborhood and zero outside it. The mask is symmetrized by taking the
//! union of the two directed neighborhoods, and the diagonal is fixed at 1.
//! The bandwidth `sigma` is the median of the nonzero distances inside the
//! mask; when no such distance exists it falls back to 1 and the kernel is
//! marked degenerate.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{circle_embedding, circular_distance, column_distances, double_center, frobenius_inner, median};
use crate::manifold::CenteredBasis;

/// Where a kernel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSource {
    Manifold,
    IdealCircle,
    Predicted,
}

/// How the neighborhood of a manifold sample is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborhoodRule {
    /// The `n` nearest samples in feature space; ties fall back to pose distance.
    #[default]
    FeatureDistance,
    /// The `n` nearest samples in pose, regardless of feature distances.
    PoseLabels,
}

/// A symmetric affinity matrix with the settings used to build it.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: DMatrix<f64>,
    pub neighborhood_n: usize,
    pub bandwidth: f64,
    pub source: KernelSource,
    /// Set when the bandwidth fell back to 1 because no nonzero distance existed.
    pub degenerate: bool,
}

impl KernelMatrix {
    /// Wraps an arbitrary square matrix, e.g. a predicted kernel.
    pub fn from_values(values: DMatrix<f64>, source: KernelSource) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::DimensionMismatch {
                expected: values.nrows(),
                found: values.ncols(),
            });
        }
        Ok(Self {
            neighborhood_n: values.nrows().saturating_sub(1),
            values,
            bandwidth: 1.0,
            source,
            degenerate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `max(2, N / 4)`, capped at `N - 1`.
pub fn default_neighborhood(n: usize) -> usize {
    (n / 4).max(2).min(n.saturating_sub(1))
}

fn check_neighborhood(neighborhood_n: usize, len: usize) -> Result<()> {
    if neighborhood_n == 0 || neighborhood_n + 1 > len {
        return Err(Error::InvalidNeighborhood {
            n: neighborhood_n,
            max: len.saturating_sub(1),
        });
    }
    Ok(())
}

// Distances that differ only by rounding must tie so that the index decides.
fn quantize(d: f64, scale: f64) -> i64 {
    if scale > 0.0 {
        (d / scale * 1e9).round() as i64
    } else {
        0
    }
}

fn max_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().copied().fold(0.0, f64::max)
}

/// Symmetric neighborhood mask: `i` and `j` are linked when either is among
/// the other's `k` nearest by `primary`, then `secondary`, then index.
fn neighborhood_mask(primary: &DMatrix<f64>, secondary: &DMatrix<f64>, k: usize) -> DMatrix<bool> {
    let n = primary.nrows();
    let (ps, ss) = (max_entry(primary), max_entry(secondary));
    let mut mask = DMatrix::from_element(n, n, false);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        mask[(i, i)] = true;
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by_key(|&j| {
            (
                quantize(primary[(i, j)], ps),
                quantize(secondary[(i, j)], ss),
                j,
            )
        });
        for &j in order.iter().take(k) {
            mask[(i, j)] = true;
            mask[(j, i)] = true;
        }
    }
    mask
}

fn pose_distances(poses: &[f64]) -> DMatrix<f64> {
    let n = poses.len();
    DMatrix::from_fn(n, n, |i, j| circular_distance(poses[i], poses[j]))
}

fn masked_gaussian(
    distances: &DMatrix<f64>,
    mask: &DMatrix<bool>,
    neighborhood_n: usize,
    source: KernelSource,
) -> KernelMatrix {
    let n = distances.nrows();
    let mut inside: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distances[(i, j)];
            if mask[(i, j)] && d > 0.0 {
                inside.push(d);
            }
        }
    }
    let (bandwidth, degenerate) = match median(&mut inside) {
        Some(m) if m > 0.0 => (m, false),
        _ => (1.0, true),
    };
    let scale = 2.0 * bandwidth * bandwidth;
    let values = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else if mask[(i, j)] {
            (-distances[(i, j)].powi(2) / scale).exp()
        } else {
            0.0
        }
    });
    KernelMatrix {
        values,
        neighborhood_n,
        bandwidth,
        source,
        degenerate,
    }
}

/// Kernel of the ideal view manifold: poses embedded on the unit circle,
/// neighborhoods taken by circular pose distance.
pub fn ideal_circle_kernel(poses: &[f64], neighborhood_n: usize) -> Result<KernelMatrix> {
    check_neighborhood(neighborhood_n, poses.len())?;
    let pose_d = pose_distances(poses);
    let mask = neighborhood_mask(&pose_d, &pose_d, neighborhood_n);
    let chordal = column_distances(&circle_embedding(poses));
    Ok(masked_gaussian(
        &chordal,
        &mask,
        neighborhood_n,
        KernelSource::IdealCircle,
    ))
}

/// Kernel of a view manifold using the default [`NeighborhoodRule`].
pub fn manifold_kernel(
    basis: &CenteredBasis,
    poses: &[f64],
    neighborhood_n: usize,
) -> Result<KernelMatrix> {
    manifold_kernel_with(basis, poses, neighborhood_n, NeighborhoodRule::default())
}

/// Kernel of a view manifold over the Euclidean distances of its rebased samples.
pub fn manifold_kernel_with(
    basis: &CenteredBasis,
    poses: &[f64],
    neighborhood_n: usize,
    rule: NeighborhoodRule,
) -> Result<KernelMatrix> {
    if basis.len() != poses.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: poses.len(),
        });
    }
    check_neighborhood(neighborhood_n, poses.len())?;
    let feature_d = column_distances(&basis.rebased);
    let pose_d = pose_distances(poses);
    let mask = match rule {
        NeighborhoodRule::FeatureDistance => neighborhood_mask(&feature_d, &pose_d, neighborhood_n),
        NeighborhoodRule::PoseLabels => neighborhood_mask(&pose_d, &pose_d, neighborhood_n),
    };
    Ok(masked_gaussian(
        &feature_d,
        &mask,
        neighborhood_n,
        KernelSource::Manifold,
    ))
}

fn same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// Kernel target alignment `<A, B>_F / (|A|_F |B|_F)`; zero if either norm vanishes.
pub fn kta(a: &KernelMatrix, b: &KernelMatrix) -> Result<f64> {
    alignment(&a.values, &b.values)
}

/// [`kta`] on plain matrices.
pub fn alignment(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    same_shape(a, b)?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(frobenius_inner(a, b) / (na * nb))
}

/// Hilbert-Schmidt independence criterion `tr(A H B H) / (N - 1)^2`.
pub fn hsic(a: &KernelMatrix, b: &KernelMatrix) -> Result<f64> {
    hsic_values(&a.values, &b.values)
}

/// [`hsic`] on plain matrices.
pub fn hsic_values(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    same_shape(a, b)?;
    let n = a.nrows();
    if n < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: n,
        });
    }
    // tr(H A H B) = <H A H, B^T>_F
    let centered = double_center(a);
    let trace = frobenius_inner(&centered, &b.transpose());
    Ok(trace / ((n - 1) as f64).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn equally_spaced(n: usize) -> Vec<f64> {
        (0..n).map(|k| TAU * k as f64 / n as f64).collect()
    }

    #[test]
    fn full_neighborhood_is_dense() {
        let k = ideal_circle_kernel(&equally_spaced(4), 3).unwrap();
        for i in 0..4 {
            assert_eq!(k.values[(i, i)], 1.0);
            for j in 0..4 {
                assert!(k.values[(i, j)] > 0.0);
            }
        }
        assert!(!k.degenerate);
    }

    #[test]
    fn opposite_points_are_outside_small_neighborhood() {
        let k = ideal_circle_kernel(&equally_spaced(8), 2).unwrap();
        assert_eq!(k.values[(0, 4)], 0.0);
        assert!(k.values[(0, 1)] > 0.0 && k.values[(0, 7)] > 0.0);
    }

    #[test]
    fn ideal_kernel_row_sums_match_direct_formula() {
        let poses = equally_spaced(36);
        let k = ideal_circle_kernel(&poses, 35).unwrap();
        let mut all: Vec<f64> = Vec::new();
        for i in 0..36 {
            for j in (i + 1)..36 {
                let (dx, dy) = (poses[i].cos() - poses[j].cos(), poses[i].sin() - poses[j].sin());
                all.push((dx * dx + dy * dy).sqrt());
            }
        }
        let sigma = median(&mut all).unwrap();
        for i in 0..36 {
            let direct: f64 = (0..36)
                .map(|j| {
                    let (dx, dy) = (poses[i].cos() - poses[j].cos(), poses[i].sin() - poses[j].sin());
                    (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
                })
                .sum();
            let row: f64 = k.values.row(i).sum();
            assert!((row - direct).abs() < 1e-12, "row {i}: {row} vs {direct}");
        }
    }

    #[test]
    fn neighborhood_bounds() {
        let poses = equally_spaced(5);
        assert!(matches!(ideal_circle_kernel(&poses, 0), Err(Error::InvalidNeighborhood { .. })));
        assert!(matches!(ideal_circle_kernel(&poses, 5), Err(Error::InvalidNeighborhood { .. })));
        assert!(ideal_circle_kernel(&poses, 4).is_ok());
    }

    #[test]
    fn collapsed_manifold_gives_flagged_unit_kernel() {
        let basis = CenteredBasis::from_samples(&DMatrix::from_element(6, 3, 2.5)).unwrap();
        let poses = equally_spaced(6);
        for rule in [NeighborhoodRule::FeatureDistance, NeighborhoodRule::PoseLabels] {
            let k = manifold_kernel_with(&basis, &poses, 2, rule).unwrap();
            let ideal = ideal_circle_kernel(&poses, 2).unwrap();
            assert!(k.degenerate);
            assert_eq!(k.bandwidth, 1.0);
            for (v, w) in k.values.iter().zip(ideal.values.iter()) {
                assert_eq!(*v > 0.0, *w > 0.0);
                if *v > 0.0 {
                    assert_eq!(*v, 1.0);
                }
            }
        }
    }

    #[test]
    fn kta_self_and_scaled() {
        let k = ideal_circle_kernel(&equally_spaced(10), 3).unwrap();
        assert!((kta(&k, &k).unwrap() - 1.0).abs() < 1e-15);
        let scaled = KernelMatrix::from_values(&k.values * 3.7, KernelSource::Predicted).unwrap();
        assert!((kta(&scaled, &k).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kta_hand_matrices() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 1.0]);
        let b = DMatrix::from_row_slice(3, 3, &[1.0, 0.1, 0.3, 0.1, 1.0, 0.0, 0.3, 0.0, 1.0]);
        // <A,B> = 3 + 2*0.05 = 3.1; |A|^2 = 3 + 2*(0.25 + 0.04) = 3.58; |B|^2 = 3 + 2*(0.01 + 0.09) = 3.2
        let expected = 3.1 / (3.58f64.sqrt() * 3.2f64.sqrt());
        assert!((alignment(&a, &b).unwrap() - expected).abs() < 1e-15);
        assert_eq!(alignment(&a, &DMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert!(matches!(
            alignment(&a, &DMatrix::zeros(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn hsic_constant_kernel_vanishes_and_scales_linearly() {
        let a = ideal_circle_kernel(&equally_spaced(7), 2).unwrap();
        let ones = DMatrix::from_element(7, 7, 1.0);
        assert!(hsic_values(&a.values, &ones).unwrap().abs() < 1e-15);
        let b = ideal_circle_kernel(&equally_spaced(7), 4).unwrap();
        let base = hsic(&a, &b).unwrap();
        let scaled = hsic_values(&(&a.values * 2.5), &b.values).unwrap();
        assert!((scaled - 2.5 * base).abs() < 1e-14);
    }
}
