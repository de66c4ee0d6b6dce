use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pose::pose_error;
use super::LabeledFeatureSet;
use crate::error::{Error, Result};

pub const DEFAULT_K_VALUES: [usize; 5] = [1, 3, 5, 7, 9];

/// Category and pose accuracy of KNN classifiers across neighborhood sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnSweepResult {
    pub k_values: Vec<usize>,
    pub category_accuracy: Vec<f64>,
    /// Fraction of test points whose pose error is below 22.5 degrees.
    pub pose_accuracy: Vec<f64>,
    /// Mean normalized circular pose error per `k`.
    pub pose_aaai_mean: Vec<f64>,
    /// Accuracy at the smallest `k` minus accuracy at the largest.
    pub category_gap: f64,
    pub pose_gap: f64,
}

/// A single KNN prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnPrediction {
    pub category: String,
    pub pose: f64,
}

/// Training indices ordered by Euclidean distance to `test` row `row`; ties keep index order.
fn ranked_neighbors(train: &LabeledFeatureSet, test: &LabeledFeatureSet, row: usize) -> Vec<usize> {
    let query = test.features.row(row);
    let mut ranked: Vec<(f64, usize)> = train
        .features
        .row_iter()
        .enumerate()
        .map(|(i, r)| ((r - query).norm_squared(), i))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked.into_iter().map(|(_, i)| i).collect()
}

fn vote(train: &LabeledFeatureSet, neighbors: &[usize]) -> KnnPrediction {
    // label -> (count, rank of its nearest occurrence)
    let mut tally: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let (mut sx, mut sy) = (0.0, 0.0);
    for (rank, &i) in neighbors.iter().enumerate() {
        let entry = tally.entry(train.categories[i].as_str()).or_insert((0, rank));
        entry.0 += 1;
        sx += train.poses[i].cos();
        sy += train.poses[i].sin();
    }
    let category = tally
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(label, _)| label.to_string())
        .expect("at least one neighbor");
    let pose = if sx.hypot(sy) <= 1e-12 * neighbors.len() as f64 {
        train.poses[neighbors[0]]
    } else {
        sy.atan2(sx).rem_euclid(std::f64::consts::TAU)
    };
    KnnPrediction { category, pose }
}

fn check_k(train: &LabeledFeatureSet, k_values: &[usize]) -> Result<()> {
    if train.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    for &k in k_values {
        if k == 0 || k > train.len() {
            return Err(Error::KTooLarge { k, size: train.len() });
        }
    }
    Ok(())
}

fn check_dims(train: &LabeledFeatureSet, test: &LabeledFeatureSet) -> Result<()> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: test.dim(),
        });
    }
    Ok(())
}

/// Majority-vote category and circular-mean pose of the `k` nearest training points.
pub fn knn_predictions(train: &LabeledFeatureSet, test: &LabeledFeatureSet, k: usize) -> Result<Vec<KnnPrediction>> {
    check_k(train, &[k])?;
    check_dims(train, test)?;
    Ok((0..test.len())
        .into_par_iter()
        .map(|row| vote(train, &ranked_neighbors(train, test, row)[..k]))
        .collect())
}

/// Sweeps `k_values`, scoring category and pose predictions on `test`.
pub fn knn_sweep(train: &LabeledFeatureSet, test: &LabeledFeatureSet, k_values: &[usize]) -> Result<KnnSweepResult> {
    check_k(train, k_values)?;
    check_dims(train, test)?;
    if k_values.is_empty() {
        return Err(Error::KTooLarge { k: 0, size: train.len() });
    }

    // Per test point and k: (category correct, error in degrees, normalized error).
    let per_point: Vec<Vec<(bool, f64, f64)>> = (0..test.len())
        .into_par_iter()
        .map(|row| {
            let ranked = ranked_neighbors(train, test, row);
            k_values
                .iter()
                .map(|&k| {
                    let p = vote(train, &ranked[..k]);
                    let err = pose_error(p.pose, test.poses[row]);
                    (p.category == test.categories[row], err.abs_err_deg, err.aaai)
                })
                .collect()
        })
        .collect();

    let m = test.len().max(1) as f64;
    let column = |ki: usize, f: &dyn Fn(&(bool, f64, f64)) -> f64| per_point.iter().map(|p| f(&p[ki])).sum::<f64>() / m;
    let category_accuracy: Vec<f64> = (0..k_values.len())
        .map(|ki| column(ki, &|p| if p.0 { 1.0 } else { 0.0 }))
        .collect();
    let pose_accuracy: Vec<f64> = (0..k_values.len())
        .map(|ki| column(ki, &|p| if p.1 < 22.5 { 1.0 } else { 0.0 }))
        .collect();
    let pose_aaai_mean: Vec<f64> = (0..k_values.len()).map(|ki| column(ki, &|p| p.2)).collect();

    let smallest = (0..k_values.len()).min_by_key(|&i| k_values[i]).expect("non-empty");
    let largest = (0..k_values.len()).max_by_key(|&i| k_values[i]).expect("non-empty");
    Ok(KnnSweepResult {
        k_values: k_values.to_vec(),
        category_gap: category_accuracy[smallest] - category_accuracy[largest],
        pose_gap: pose_accuracy[smallest] - pose_accuracy[largest],
        category_accuracy,
        pose_accuracy,
        pose_aaai_mean,
    })
}
