//! Probes of the pooled object-view manifold: KNN sweeps, linear
//! separability of categories, and kernel pose regression.

mod knn;
mod pose;
mod regression;
mod svm;

pub use knn::{knn_predictions, knn_sweep, KnnPrediction, KnnSweepResult, DEFAULT_K_VALUES};
pub use pose::{pose_error, pose_metrics, PoseError, PoseMetrics};
pub use regression::{
    gaussian_cross_kernel, kernel_pose_regression, kernel_pose_regression_with, median_bandwidth, KernelRidge,
    PoseRegression, DEFAULT_RIDGE,
};
pub use svm::{train_linear_svm, train_linear_svm_with, LinearSvm, SvmConfig};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// Pooled samples of many instances with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureSet {
    /// `M x d`.
    pub features: DMatrix<f64>,
    pub categories: Vec<String>,
    /// Radians.
    pub poses: Vec<f64>,
    pub instance_ids: Vec<String>,
    pub split: Split,
}

impl LabeledFeatureSet {
    /// Validates label lengths and finiteness. An empty set is allowed here
    /// and rejected by the operations that need samples.
    pub fn new(
        features: DMatrix<f64>,
        categories: Vec<String>,
        poses: Vec<f64>,
        instance_ids: Vec<String>,
        split: Split,
    ) -> Result<Self> {
        let m = features.nrows();
        for len in [categories.len(), poses.len(), instance_ids.len()] {
            if len != m {
                return Err(Error::LengthMismatch { rows: m, samples: len });
            }
        }
        for row in 0..m {
            for col in 0..features.ncols() {
                if !features[(row, col)].is_finite() {
                    return Err(Error::NonFiniteFeature { row, col });
                }
            }
        }
        if let Some(p) = poses.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidBundle(format!("non-finite pose {p}")));
        }
        Ok(Self {
            features,
            categories,
            poses,
            instance_ids,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Rows `rows`, in that order.
    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(rows.iter()),
            categories: rows.iter().map(|&i| self.categories[i].clone()).collect(),
            poses: rows.iter().map(|&i| self.poses[i]).collect(),
            instance_ids: rows.iter().map(|&i| self.instance_ids[i].clone()).collect(),
            split: self.split,
        }
    }

    /// Same labels with features replaced.
    pub fn with_features(&self, features: DMatrix<f64>) -> Result<Self> {
        Self::new(
            features,
            self.categories.clone(),
            self.poses.clone(),
            self.instance_ids.clone(),
            self.split,
        )
    }
}

/// Knobs of the global measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalConfig {
    pub k_values: Vec<usize>,
    pub svm: SvmConfig,
    pub ridge: f64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            k_values: DEFAULT_K_VALUES.to_vec(),
            svm: SvmConfig::default(),
            ridge: DEFAULT_RIDGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmSummary {
    pub accuracy: f64,
    pub selected_c: f64,
    pub classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub bandwidth: f64,
    pub metrics: PoseMetrics,
}

/// All global measures for one train/test pair. Probes that cannot run on
/// the given data are left empty and explained in `flags`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMeasures {
    pub train_size: usize,
    pub test_size: usize,
    pub knn: Option<KnnSweepResult>,
    pub svm: Option<SvmSummary>,
    pub regression: Option<RegressionSummary>,
    pub flags: Vec<String>,
}

pub fn measure_global(
    train: &LabeledFeatureSet,
    test: &LabeledFeatureSet,
    config: &GlobalConfig,
) -> Result<GlobalMeasures> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: test.dim(),
        });
    }
    let mut flags = Vec::new();
    let mut soft = |name: &str, e: Error| -> Result<()> {
        match e {
            Error::EmptyTrainSet
            | Error::KTooLarge { .. }
            | Error::SingleClassTrainSet
            | Error::DegenerateKernel
            | Error::SingularSystem { .. }
            | Error::InvalidBundle(_) => {
                flags.push(format!("{name}: {e}"));
                Ok(())
            }
            other => Err(other),
        }
    };

    let knn = match knn_sweep(train, test, &config.k_values) {
        Ok(r) => Some(r),
        Err(e) => {
            soft("knn", e)?;
            None
        }
    };
    let svm = match train_linear_svm_with(train, &config.svm) {
        Ok(model) => Some(SvmSummary {
            accuracy: model.accuracy(test),
            selected_c: model.c,
            classes: model.classes,
        }),
        Err(e) => {
            soft("svm", e)?;
            None
        }
    };
    let regression = match kernel_pose_regression_with(train, test, config.ridge) {
        Ok(r) => Some(RegressionSummary {
            bandwidth: r.bandwidth,
            metrics: r.metrics,
        }),
        Err(e) => {
            soft("regression", e)?;
            None
        }
    };
    Ok(GlobalMeasures {
        train_size: train.len(),
        test_size: test.len(),
        knn,
        svm,
        regression,
        flags,
    })
}
