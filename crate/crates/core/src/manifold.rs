//! View manifolds as pose-ordered sample matrices, their centered
//! re-expression in an `N`-dimensional basis, and the two spectral measures
//! (nuclear norm and Effective-p).
//!
//! A manifold of `N` samples in a `d`-dimensional feature space always lies in
//! an affine subspace of dimension at most `N - 1`. [`center_and_rebase`]
//! removes the mean and rotates the samples into the orthonormal basis given by
//! the left singular vectors of the centered matrix, so every downstream
//! measure sees an `N x N` matrix regardless of `d`. The rotation preserves all
//! pairwise distances.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::thin_svd_left;

/// The samples of one object instance, ordered by ascending pose angle.
///
/// Row `i` of `samples` is the feature vector observed at `poses[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSlice {
    instance_id: String,
    category: String,
    poses: Vec<f64>,
    samples: DMatrix<f64>,
}

impl ManifoldSlice {
    /// Builds a slice whose rows are already sorted by pose.
    pub fn new(
        instance_id: impl Into<String>,
        category: impl Into<String>,
        poses: Vec<f64>,
        samples: DMatrix<f64>,
    ) -> Result<Self> {
        let slice = Self {
            instance_id: instance_id.into(),
            category: category.into(),
            poses,
            samples,
        };
        slice.validate()?;
        Ok(slice)
    }

    /// Builds a slice from rows in arbitrary order, sorting them by pose.
    pub fn from_unsorted(
        instance_id: impl Into<String>,
        category: impl Into<String>,
        poses: Vec<f64>,
        samples: DMatrix<f64>,
    ) -> Result<Self> {
        if poses.len() != samples.nrows() {
            return Err(Error::DimensionMismatch {
                expected: samples.nrows(),
                found: poses.len(),
            });
        }
        let mut order: Vec<usize> = (0..poses.len()).collect();
        order.sort_by(|&a, &b| poses[a].total_cmp(&poses[b]));
        let sorted_poses = order.iter().map(|&i| poses[i]).collect();
        let sorted = samples.select_rows(order.iter());
        Self::new(instance_id, category, sorted_poses, sorted)
    }

    fn validate(&self) -> Result<()> {
        let n = self.poses.len();
        if n != self.samples.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.nrows(),
                found: n,
            });
        }
        if n < 3 {
            return Err(Error::InvalidSlice(format!(
                "{}: need at least 3 samples, got {n}",
                self.instance_id
            )));
        }
        if self.samples.ncols() == 0 {
            return Err(Error::InvalidSlice(format!(
                "{}: zero feature columns",
                self.instance_id
            )));
        }
        for (i, &p) in self.poses.iter().enumerate() {
            if !p.is_finite() || !(0.0..TAU).contains(&p) {
                return Err(Error::InvalidSlice(format!(
                    "{}: pose {p} at row {i} outside [0, 2pi)",
                    self.instance_id
                )));
            }
        }
        if let Some(w) = self.poses.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSlice(format!(
                "{}: poses not strictly ascending at row {}",
                self.instance_id,
                w + 1
            )));
        }
        check_finite(&self.samples)
    }

    pub fn instance_id(&self) -> &str {
        &self.instance_id
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    /// Pose angles in radians, ascending.
    pub fn poses(&self) -> &[f64] {
        &self.poses
    }

    /// `N x d` sample matrix.
    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.ncols()
    }

    /// Same slice with every sample mapped through `f`.
    pub fn map_samples(&self, f: impl FnOnce(&DMatrix<f64>) -> DMatrix<f64>) -> Result<Self> {
        Self::new(
            self.instance_id.clone(),
            self.category.clone(),
            self.poses.clone(),
            f(&self.samples),
        )
    }
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            if !m[(row, col)].is_finite() {
                return Err(Error::NonFiniteInput { row, col });
            }
        }
    }
    Ok(())
}

/// Centered samples re-expressed in the basis of their own column space.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredBasis {
    /// `N x N`; column `i` holds sample `i` in the new basis.
    pub rebased: DMatrix<f64>,
    /// Singular values of the centered matrix, non-increasing, zero-padded to `N`.
    pub spectrum: Vec<f64>,
    /// Per-feature mean that was removed.
    pub mean: DVector<f64>,
}

impl CenteredBasis {
    /// Centers an `N x d` sample matrix and rotates it into an `N`-dimensional basis.
    pub fn from_samples(samples: &DMatrix<f64>) -> Result<Self> {
        check_finite(samples)?;
        let n = samples.nrows();
        let d = samples.ncols();
        if n == 0 || d == 0 {
            return Ok(Self {
                rebased: DMatrix::zeros(n, n),
                spectrum: vec![0.0; n],
                mean: DVector::zeros(d),
            });
        }

        // Shifted mean: exact for constant columns.
        let mean = DVector::from_iterator(
            d,
            samples.column_iter().map(|c| {
                let first = c[0];
                first + c.iter().map(|v| v - first).sum::<f64>() / n as f64
            }),
        );
        let mut centered = samples.clone();
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }

        // Rows are samples, so with X = U S V^T the rotated samples are the
        // columns of S U^T (equal to V^T X^T).
        let (u, sigma) = thin_svd_left(&centered)?;
        let mut rebased = DMatrix::zeros(n, n);
        let mut spectrum = vec![0.0; n];
        for (r, &s) in sigma.iter().enumerate() {
            spectrum[r] = s;
            for c in 0..n {
                rebased[(r, c)] = s * u[(c, r)];
            }
        }

        Ok(Self {
            rebased,
            spectrum,
            mean,
        })
    }

    /// Number of singular values above `N * eps * sigma_max`; rows of
    /// `rebased` past this index are zero padding.
    pub fn rank(&self) -> usize {
        let top = self.spectrum.first().copied().unwrap_or(0.0);
        let tol = self.spectrum.len() as f64 * f64::EPSILON * top;
        self.spectrum.iter().filter(|&&s| s > tol).count()
    }

    /// Number of samples `N`.
    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }
}

/// Centers the slice per instance and re-expresses it as an `N x N` matrix.
pub fn center_and_rebase(slice: &ManifoldSlice) -> CenteredBasis {
    CenteredBasis::from_samples(slice.samples()).expect("validated finite samples decompose")
}

/// Sum of singular values of the centered sample matrix.
pub fn nuclear_norm(basis: &CenteredBasis) -> f64 {
    basis.spectrum.iter().sum()
}

/// Smallest number of leading singular values whose share of the nuclear norm
/// reaches `p` percent. A zero spectrum (collapsed manifold) yields 0.
pub fn effective_p(basis: &CenteredBasis, p: f64) -> Result<usize> {
    effective_p_of_spectrum(&basis.spectrum, p)
}

/// [`effective_p`] on a raw non-increasing spectrum.
pub fn effective_p_of_spectrum(spectrum: &[f64], p: f64) -> Result<usize> {
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::InvalidPercentage(p));
    }
    let total: f64 = spectrum.iter().sum();
    if total <= 0.0 {
        return Ok(0);
    }
    let target = p / 100.0;
    let mut cumulative = 0.0;
    for (i, s) in spectrum.iter().enumerate() {
        cumulative += s;
        if cumulative / total >= target {
            return Ok(i + 1);
        }
    }
    // Same summation order as `total`, so the last step always reaches 1.
    Ok(spectrum.len())
}
