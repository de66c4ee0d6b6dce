//! Gaussian kernel ridge regression of pose onto features.
//!
//! Poses are regressed through their unit-circle embedding `(cos, sin)` and
//! decoded with `atan2`, which keeps the wraparound at `2pi` out of the
//! regression targets.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::pose::{pose_metrics, PoseMetrics};
use super::LabeledFeatureSet;
use crate::error::{Error, Result};
use crate::linalg::{median, row_distances};

pub const DEFAULT_RIDGE: f64 = 1e-3;

/// A fitted Gaussian kernel ridge regressor onto `(cos, sin)` pose targets.
#[derive(Debug, Clone)]
pub struct KernelRidge {
    train: DMatrix<f64>,
    /// `M x 2` dual coefficients.
    pub alpha: DMatrix<f64>,
    pub bandwidth: f64,
    pub ridge: f64,
}

/// Gaussian kernel between the rows of `a` and the rows of `b`.
pub fn gaussian_cross_kernel(a: &DMatrix<f64>, b: &DMatrix<f64>, bandwidth: f64) -> DMatrix<f64> {
    let scale = 2.0 * bandwidth * bandwidth;
    DMatrix::from_fn(a.nrows(), b.nrows(), |i, j| {
        let d2 = (a.row(i) - b.row(j)).norm_squared();
        (-d2 / scale).exp()
    })
}

/// Median of the nonzero pairwise distances between rows.
pub fn median_bandwidth(features: &DMatrix<f64>) -> Option<f64> {
    let dist = row_distances(features);
    let m = dist.nrows();
    let mut values: Vec<f64> = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for i in 0..m {
        for j in (i + 1)..m {
            if dist[(i, j)] > 0.0 {
                values.push(dist[(i, j)]);
            }
        }
    }
    median(&mut values)
}

impl KernelRidge {
    pub fn fit(train: &LabeledFeatureSet, ridge: f64) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyTrainSet);
        }
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(Error::InvalidSpec(format!("ridge must be finite and non-negative, got {ridge}")));
        }
        let bandwidth = median_bandwidth(&train.features).ok_or(Error::DegenerateKernel)?;
        let m = train.len();
        let mut gram = gaussian_cross_kernel(&train.features, &train.features, bandwidth);
        for i in 0..m {
            gram[(i, i)] += ridge;
        }
        let targets = DMatrix::from_fn(m, 2, |i, c| {
            if c == 0 {
                train.poses[i].cos()
            } else {
                train.poses[i].sin()
            }
        });
        let alpha = match gram.clone().cholesky() {
            Some(chol) => chol.solve(&targets),
            None => gram
                .lu()
                .solve(&targets)
                .ok_or(Error::SingularSystem { rcond: 0.0 })?,
        };
        Ok(Self {
            train: train.features.clone(),
            alpha,
            bandwidth,
            ridge,
        })
    }

    /// Raw `(cos, sin)` outputs, one row per query row.
    pub fn predict_embedding(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.ncols() != self.train.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.train.ncols(),
                found: features.ncols(),
            });
        }
        Ok(gaussian_cross_kernel(features, &self.train, self.bandwidth) * &self.alpha)
    }

    /// Predicted angles in `[0, 2pi)`.
    pub fn predict(&self, features: &DMatrix<f64>) -> Result<DVector<f64>> {
        let out = self.predict_embedding(features)?;
        Ok(DVector::from_iterator(
            out.nrows(),
            out.row_iter()
                .map(|r| r[1].atan2(r[0]).rem_euclid(std::f64::consts::TAU)),
        ))
    }
}

/// Predicted angles for the test split with their error summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseRegression {
    pub predictions: Vec<f64>,
    pub bandwidth: f64,
    pub ridge: f64,
    pub metrics: PoseMetrics,
}

pub fn kernel_pose_regression(train: &LabeledFeatureSet, test: &LabeledFeatureSet) -> Result<PoseRegression> {
    kernel_pose_regression_with(train, test, DEFAULT_RIDGE)
}

pub fn kernel_pose_regression_with(
    train: &LabeledFeatureSet,
    test: &LabeledFeatureSet,
    ridge: f64,
) -> Result<PoseRegression> {
    if test.is_empty() {
        return Err(Error::InvalidBundle("test split is empty".into()));
    }
    let model = KernelRidge::fit(train, ridge)?;
    let predictions: Vec<f64> = model.predict(&test.features)?.iter().copied().collect();
    let metrics = pose_metrics(&predictions, &test.poses)?;
    Ok(PoseRegression {
        predictions,
        bandwidth: model.bandwidth,
        ridge,
        metrics,
    })
}
