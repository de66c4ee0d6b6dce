//! Regularized thin-plate-spline map from the unit circle onto a view
//! manifold, `gamma(x) = C psi(x)` with
//! `psi(x) = [phi(|x - z_1|), ..., phi(|x - z_N|), 1, x^T]^T` and `phi(r) = r^3`.
//!
//! The centers `z_i` are the circle points of the poses themselves. The
//! coefficients solve the block system
//!
//! ```text
//! [ K + lambda I   P ] C^T = [ A ]
//! [ P^T            0 ]       [ 0 ]
//! ```
//!
//! where `A` holds the rebased samples as rows and `P` has rows `[1, x_i^T]`.
//! Conditioning of the linear columns of `C` measures how well-behaved the
//! affine part of the map is.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{circle_embedding, column_distances, rcond, singular_values};
use crate::manifold::CenteredBasis;

pub const DEFAULT_LAMBDA: f64 = 1e-6;
/// Block systems below this reciprocal condition number are treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;
pub const MAX_ESCALATIONS: usize = 3;
/// Multiple of a block's estimated round-off below which its singular values vanish.
pub const ROUNDOFF_MARGIN: f64 = 10.0;
const POLY_TERMS: usize = 3;

/// A fitted thin-plate-spline map.
#[derive(Debug, Clone)]
pub struct TpsFit {
    /// `d x (N + 3)`: `N` radial columns, then the constant, then the two linear columns.
    pub coeff_c: DMatrix<f64>,
    /// Circle points, one column per center.
    pub centers_z: DMatrix<f64>,
    /// Regularization actually used.
    pub lambda: f64,
    /// Number of times `lambda` was escalated.
    pub escalations: usize,
    pub rcond_poly: f64,
    /// Taken over the rows that span the samples; padding rows are skipped.
    pub rcond_nonpoly: f64,
    /// Round-off in `coeff_c` estimated by one step of iterative refinement.
    /// Singular values of a block within [`ROUNDOFF_MARGIN`] times its error
    /// count as zero in both rcond measures.
    pub coeff_error: DMatrix<f64>,
    /// `|L C^T - R|_F / |R|_F` of the solved block system.
    pub residual: f64,
}

impl TpsFit {
    /// Maps an angle on the circle into the rebased feature space.
    pub fn map_angle(&self, angle: f64) -> DVector<f64> {
        let x = [angle.cos(), angle.sin()];
        let n = self.centers_z.ncols();
        let mut psi = DVector::zeros(n + POLY_TERMS);
        for j in 0..n {
            let r = ((x[0] - self.centers_z[(0, j)]).powi(2) + (x[1] - self.centers_z[(1, j)]).powi(2)).sqrt();
            psi[j] = r * r * r;
        }
        psi[n] = 1.0;
        psi[n + 1] = x[0];
        psi[n + 2] = x[1];
        &self.coeff_c * psi
    }

    /// Coefficients of the linear terms, `d x 2`.
    pub fn linear_block(&self) -> DMatrix<f64> {
        let n = self.centers_z.ncols();
        self.coeff_c.columns(n + 1, 2).into_owned()
    }

    /// Coefficients of the radial terms, `d x N`.
    pub fn radial_block(&self) -> DMatrix<f64> {
        let n = self.centers_z.ncols();
        self.coeff_c.columns(0, n).into_owned()
    }
}

/// Left-hand block matrix of the TPS system for circle points `x` (one per column).
pub fn block_matrix(points: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let n = points.ncols();
    let dist = column_distances(points);
    let mut lhs = DMatrix::zeros(n + POLY_TERMS, n + POLY_TERMS);
    for i in 0..n {
        for j in 0..n {
            let r = dist[(i, j)];
            lhs[(i, j)] = r * r * r;
        }
        lhs[(i, i)] += lambda;
        lhs[(i, n)] = 1.0;
        lhs[(n, i)] = 1.0;
        for e in 0..2 {
            lhs[(i, n + 1 + e)] = points[(e, i)];
            lhs[(n + 1 + e, i)] = points[(e, i)];
        }
    }
    lhs
}

/// Right-hand side `[A; 0]` with the rebased samples as rows.
pub fn block_rhs(basis: &CenteredBasis) -> DMatrix<f64> {
    let n = basis.len();
    let mut rhs = DMatrix::zeros(n + POLY_TERMS, basis.rebased.nrows());
    rhs.rows_mut(0, n).copy_from(&basis.rebased.transpose());
    rhs
}

/// Fits the circle-to-manifold map, escalating `lambda` tenfold (at most
/// [`MAX_ESCALATIONS`] times) while the block system is numerically singular.
pub fn fit_tps(basis: &CenteredBasis, poses: &[f64], lambda: f64) -> Result<TpsFit> {
    let n = basis.len();
    if poses.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: poses.len(),
        });
    }
    if n < 4 {
        return Err(Error::InvalidSlice(format!("thin-plate fit needs at least 4 samples, got {n}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidSpec(format!("lambda must be finite and non-negative, got {lambda}")));
    }

    let points = circle_embedding(poses);
    let rhs = block_rhs(basis);
    let mut lambda = lambda;
    let mut escalations = 0;
    let lhs = loop {
        let lhs = block_matrix(&points, lambda);
        let cond = rcond(&lhs);
        if cond >= SINGULAR_RCOND {
            break lhs;
        }
        if escalations == MAX_ESCALATIONS {
            return Err(Error::SingularSystem { rcond: cond });
        }
        lambda = if lambda == 0.0 { DEFAULT_LAMBDA } else { lambda * 10.0 };
        escalations += 1;
    };

    let lu = lhs.clone().lu();
    let solution = lu.solve(&rhs).ok_or(Error::SingularSystem { rcond: 0.0 })?;
    let correction = lu
        .solve(&(&rhs - &lhs * &solution))
        .ok_or(Error::SingularSystem { rcond: 0.0 })?;
    let rhs_norm = rhs.norm();
    let residual = if rhs_norm == 0.0 {
        (&lhs * &solution - &rhs).norm()
    } else {
        (&lhs * &solution - &rhs).norm() / rhs_norm
    };

    let coeff_c = solution.transpose();
    let mut fit = TpsFit {
        coeff_c,
        centers_z: points,
        lambda,
        escalations,
        rcond_poly: 0.0,
        rcond_nonpoly: 0.0,
        coeff_error: correction.transpose(),
        residual,
    };
    let rank = basis.rank();
    let linear_error = fit.coeff_error.columns(n + 1, 2).norm();
    let radial_error = fit.coeff_error.columns(0, n).rows(0, rank).norm();
    fit.rcond_poly = block_rcond(&fit.linear_block(), ROUNDOFF_MARGIN * linear_error);
    fit.rcond_nonpoly = block_rcond(
        &fit.radial_block().rows(0, rank).into_owned(),
        ROUNDOFF_MARGIN * radial_error,
    );
    Ok(fit)
}

/// `sigma_min / sigma_max`, or zero when `sigma_min` is within `floor`.
fn block_rcond(block: &DMatrix<f64>, floor: f64) -> f64 {
    match singular_values(block) {
        Ok(sv) if !sv.is_empty() => {
            let max = sv.iter().copied().fold(0.0, f64::max);
            let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
            if min <= floor || !max.is_finite() {
                0.0
            } else {
                (min / max).clamp(0.0, 1.0)
            }
        }
        _ => 0.0,
    }
}

/// `(rcond_poly, rcond_nonpoly)` of a fit.
pub fn tps_rcond_measures(fit: &TpsFit) -> (f64, f64) {
    (fit.rcond_poly, fit.rcond_nonpoly)
}
