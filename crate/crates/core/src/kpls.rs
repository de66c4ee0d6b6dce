//! Kernel partial least squares from a manifold kernel onto the ideal circle
//! kernel, and the two measures derived from the fit.
//!
//! The input Gram is the cosine similarity between kernel rows,
//! `G0 = (K K^T) / (b b^T)` with `b(i) = |K(i, :)|`, double-centered as in
//! standard KPLS. Components are extracted with the kernel NIPALS iteration
//!
//! ```text
//! t = G u / |G u|,   c = Y^T t,   u = Y c / |Y c|
//! ```
//!
//! followed by the symmetric deflation `G <- (I - t t^T) G (I - t t^T)` and
//! `Y <- Y - t t^T Y`. The target kernel rows `Y` are column-centered.
//!
//! The iteration's fixed point is `t ~ G Y c` with `c` the dominant
//! eigenvector of `Y^T G Y`. When the top eigenvalues nearly coincide (the
//! paired cosine and sine modes of a circle) the iteration crawls, so after
//! [`MAX_ITERATIONS`] steps the component is taken from a symmetric
//! eigendecomposition instead and counted in [`KplsModel::eigen_fallbacks`].

use nalgebra::{DMatrix, DVector, RowDVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::kernel::{alignment, KernelMatrix};
use crate::linalg::{double_center, rcond};

pub const DEFAULT_COMPONENTS: usize = 5;
pub const MAX_ITERATIONS: usize = 500;
pub const TOLERANCE: f64 = 1e-10;
const RESIDUAL_FLOOR: f64 = 1e-12;
const SINGULAR_RCOND: f64 = 1e-12;

/// A fitted KPLS model.
#[derive(Debug, Clone)]
pub struct KplsModel {
    /// Requested number of components.
    pub components_d: usize,
    /// Components actually extracted; fewer than requested after an early stop.
    pub extracted: usize,
    /// `N x extracted`, orthonormal columns.
    pub scores_t: DMatrix<f64>,
    /// `N x extracted`, unit columns.
    pub aux_u: DMatrix<f64>,
    /// Centered, row-normalized input Gram.
    pub gram_g0: DMatrix<f64>,
    /// Residual of `gram_g0` after the extracted deflations.
    pub gram_gd: DMatrix<f64>,
    /// Row norms of the input kernel (zeros replaced by 1).
    pub row_norms_b: DVector<f64>,
    /// Column means removed from the response.
    pub response_mean: RowDVector<f64>,
    /// Some input kernel row had zero norm.
    pub zero_row_norms: bool,
    /// The residual Gram or response vanished before `components_d` components.
    pub early_stop: bool,
    /// Components solved by eigendecomposition after the iteration stalled.
    pub eigen_fallbacks: usize,
}

impl KplsModel {
    pub fn len(&self) -> usize {
        self.gram_g0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.gram_g0.is_empty()
    }

    /// `|G0|_F == 0`.
    pub fn degenerate_gram(&self) -> bool {
        self.gram_g0.norm() == 0.0
    }
}

/// Row-normalized Gram `(K K^T) / (b b^T)` before centering, with the row norms used.
pub fn normalized_gram(kernel: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, bool) {
    let mut zero = false;
    let b = DVector::from_iterator(
        kernel.nrows(),
        kernel.row_iter().map(|r| {
            let n = r.norm();
            if n == 0.0 {
                zero = true;
                1.0
            } else {
                n
            }
        }),
    );
    let mut gram = kernel * kernel.transpose();
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            gram[(i, j)] /= b[i] * b[j];
        }
    }
    (gram, b, zero)
}

fn center_columns(y: &DMatrix<f64>) -> (DMatrix<f64>, RowDVector<f64>) {
    let mean = y.row_mean();
    let mut centered = y.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    (centered, mean)
}

/// Fits `d` KPLS components mapping `input_kernel` rows onto `target_kernel` rows.
pub fn fit_kpls(input_kernel: &KernelMatrix, target_kernel: &KernelMatrix, d: usize) -> Result<KplsModel> {
    let n = input_kernel.len();
    if target_kernel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target_kernel.len(),
        });
    }
    if d == 0 || d >= n {
        return Err(Error::InvalidComponents { d, n });
    }

    let (raw, row_norms_b, zero_row_norms) = normalized_gram(&input_kernel.values);
    let gram_g0 = double_center(&raw);
    let (y0, response_mean) = center_columns(&target_kernel.values);

    let g0_norm = gram_g0.norm();
    let y0_norm = y0.norm();
    let mut gram = gram_g0.clone();
    let mut response = y0.clone();
    let mut scores: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut aux: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut early_stop = false;
    let mut eigen_fallbacks = 0;

    for _ in 0..d {
        if gram.norm() <= RESIDUAL_FLOOR * g0_norm || response.norm() <= RESIDUAL_FLOOR * y0_norm {
            early_stop = true;
            break;
        }
        match extract_component(&gram, &response)? {
            Some((t, u, fallback)) => {
                eigen_fallbacks += usize::from(fallback);
                deflate_gram(&mut gram, &t);
                let proj = t.transpose() * &response;
                response -= &t * proj;
                scores.push(t);
                aux.push(u);
            }
            None => {
                early_stop = true;
                break;
            }
        }
    }

    let extracted = scores.len();
    let stack = |cols: &[DVector<f64>]| {
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(cols)
        }
    };
    Ok(KplsModel {
        components_d: d,
        extracted,
        scores_t: stack(&scores),
        aux_u: stack(&aux),
        gram_g0,
        gram_gd: gram,
        row_norms_b,
        response_mean,
        zero_row_norms,
        early_stop,
        eigen_fallbacks,
    })
}

/// One NIPALS component and whether it needed the eigen fallback; `None`
/// when the residual offers no further direction.
fn extract_component(
    gram: &DMatrix<f64>,
    response: &DMatrix<f64>,
) -> Result<Option<(DVector<f64>, DVector<f64>, bool)>> {
    let start = response
        .column_iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
        .map(|(_, c)| c.into_owned())
        .expect("response has columns");
    let mut u = start.normalize();
    let gram_norm = gram.norm();
    let mut previous: Option<DVector<f64>> = None;

    for _ in 0..MAX_ITERATIONS {
        let mut t = gram * &u;
        let t_norm = t.norm();
        if t_norm <= RESIDUAL_FLOOR * gram_norm {
            return Ok(None);
        }
        t /= t_norm;
        let c = response.transpose() * &t;
        let next_u = response * c;
        let u_norm = next_u.norm();
        if u_norm == 0.0 {
            return Ok(None);
        }
        u = next_u / u_norm;
        if let Some(prev) = &previous {
            if (&t - prev).norm() < TOLERANCE {
                return Ok(Some((t, u, false)));
            }
        }
        previous = Some(t);
    }
    eigen_component(gram, response, previous.as_ref())
}

/// The NIPALS fixed point from the dominant eigenvector of `Y^T G Y`, signed
/// to agree with the last iterate.
fn eigen_component(
    gram: &DMatrix<f64>,
    response: &DMatrix<f64>,
    last: Option<&DVector<f64>>,
) -> Result<Option<(DVector<f64>, DVector<f64>, bool)>> {
    let inner = response.transpose() * gram * response;
    let inner = (&inner + inner.transpose()) * 0.5;
    let eigen = SymmetricEigen::new(inner);
    let top = eigen.eigenvalues.imax();
    let c = eigen.eigenvectors.column(top).into_owned();
    let yc = response * c;
    let u_norm = yc.norm();
    if u_norm == 0.0 {
        return Ok(None);
    }
    let mut u = yc / u_norm;
    let mut t = gram * &u;
    let t_norm = t.norm();
    if t_norm <= RESIDUAL_FLOOR * gram.norm() {
        return Ok(None);
    }
    t /= t_norm;
    if last.is_some_and(|prev| prev.dot(&t) < 0.0) {
        t = -t;
        u = -u;
    }
    if t.iter().chain(u.iter()).any(|v| !v.is_finite()) {
        return Err(Error::ConvergenceFailure {
            iterations: MAX_ITERATIONS,
        });
    }
    Ok(Some((t, u, true)))
}

/// `G <- (I - t t^T) G (I - t t^T)` for unit `t`, in `O(N^2)`.
fn deflate_gram(gram: &mut DMatrix<f64>, t: &DVector<f64>) {
    let gt = &*gram * t;
    let s = t.dot(&gt);
    let n = gram.nrows();
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] += -t[i] * gt[j] - gt[i] * t[j] + s * t[i] * t[j];
        }
    }
}

/// Regression error `delta = 1 - KTA(predicted, target)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionError {
    pub delta: f64,
    /// `T^T G0 U` was singular; `delta` is reported as 1.
    pub singular: bool,
}

/// Predicted target kernel `G0 U (T^T G0 U)^-1 T^T Y + mean`, or `None` when
/// the inner system is singular.
pub fn predict_target(model: &KplsModel, target_kernel: &KernelMatrix) -> Result<Option<DMatrix<f64>>> {
    let n = model.len();
    if target_kernel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: target_kernel.len(),
        });
    }
    let (y0, mean) = center_columns(&target_kernel.values);
    let mut predicted = if model.extracted == 0 {
        DMatrix::zeros(n, y0.ncols())
    } else {
        let g0u = &model.gram_g0 * &model.aux_u;
        let inner = model.scores_t.transpose() * &g0u;
        if rcond(&inner) < SINGULAR_RCOND {
            return Ok(None);
        }
        let rhs = model.scores_t.transpose() * &y0;
        let Some(coef) = inner.lu().solve(&rhs) else {
            return Ok(None);
        };
        g0u * coef
    };
    for mut row in predicted.row_iter_mut() {
        row += &mean;
    }
    Ok(Some(predicted))
}

/// KPLS regression error of a fitted model.
pub fn kpls_regression_error(
    model: &KplsModel,
    input_kernel: &KernelMatrix,
    target_kernel: &KernelMatrix,
) -> Result<RegressionError> {
    if input_kernel.len() != model.len() {
        return Err(Error::DimensionMismatch {
            expected: model.len(),
            found: input_kernel.len(),
        });
    }
    match predict_target(model, target_kernel)? {
        Some(predicted) => {
            let kta = alignment(&predicted, &target_kernel.values)?;
            Ok(RegressionError {
                delta: (1.0 - kta).clamp(0.0, 1.0),
                singular: false,
            })
        }
        None => Ok(RegressionError {
            delta: 1.0,
            singular: true,
        }),
    }
}

/// Residual Gram energy `|G_d|_F / |G_0|_F`; zero for a degenerate Gram.
pub fn kpls_norm_ratio(model: &KplsModel) -> f64 {
    let g0 = model.gram_g0.norm();
    if g0 == 0.0 {
        return 0.0;
    }
    (model.gram_gd.norm() / g0).clamp(0.0, 1.0)
}
