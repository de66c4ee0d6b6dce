//! Small dense helpers shared by the measure modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD returning the left singular vectors (`rows x min(rows, cols)`)
/// and the non-increasing singular values.
pub fn thin_svd_left(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|_| Error::ConvergenceFailure { iterations: 0 })?;
    let u = svd.U();
    let s = svd.S().column_vector();
    let k = s.nrows();
    Ok((
        DMatrix::from_fn(m.nrows(), k, |i, j| u[(i, j)]),
        (0..k).map(|i| s[i]).collect(),
    ))
}

/// Non-increasing singular values.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    to_faer(m)
        .singular_values()
        .map_err(|_| Error::ConvergenceFailure { iterations: 0 })
}

/// Euclidean distance matrix between the columns of `points`.
pub fn column_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.ncols();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (points.column(i) - points.column(j)).norm();
            out[(i, j)] = d;
            out[(j, i)] = d;
        }
    }
    out
}

/// Euclidean distance matrix between the rows of `points`.
pub fn row_distances(points: &DMatrix<f64>) -> DMatrix<f64> {
    column_distances(&points.transpose())
}

/// Median of a non-empty sample; the mean of the two middle values for even counts.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 0 {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    })
}

/// Reciprocal condition number `sigma_min / sigma_max`; zero for an all-zero matrix.
pub fn rcond(matrix: &DMatrix<f64>) -> f64 {
    if matrix.is_empty() {
        return 0.0;
    }
    let Ok(sv) = singular_values(matrix) else {
        return 0.0;
    };
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || !max.is_finite() {
        return 0.0;
    }
    (min / max).clamp(0.0, 1.0)
}

/// Frobenius inner product `<a, b>_F`.
pub fn frobenius_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Unit-circle embedding of pose angles, one column per pose.
pub fn circle_embedding(poses: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(2, poses.len(), |r, c| {
        if r == 0 {
            poses[c].cos()
        } else {
            poses[c].sin()
        }
    })
}

/// Circular distance between two angles in radians, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let diff = (a - b).rem_euclid(std::f64::consts::TAU);
    diff.min(std::f64::consts::TAU - diff)
}

/// Double-centering `H M H` with `H = I - 11^T / n`.
pub fn double_center(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() as f64;
    let row_means = DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.sum() / n));
    let col_means = DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / n));
    let grand = row_means.sum() / n;
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        m[(i, j)] - row_means[i] - col_means[j] + grand
    })
}
