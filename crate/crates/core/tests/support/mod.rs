//! Independent reference implementations used as oracles by the integration
//! tests. Nothing here calls into the library's numerical routines.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap();
        a.swap_rows(col, pivot);
        b.swap_rows(col, pivot);
        for row in (col + 1)..n {
            let f = a[(row, col)] / a[(col, col)];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[(row, k)] -= f * a[(col, k)];
            }
            for k in 0..b.ncols() {
                b[(row, k)] -= f * b[(col, k)];
            }
        }
    }
    let mut x = DMatrix::zeros(n, b.ncols());
    for k in 0..b.ncols() {
        for row in (0..n).rev() {
            let mut s = b[(row, k)];
            for j in (row + 1)..n {
                s -= a[(row, j)] * x[(j, k)];
            }
            x[(row, k)] = s / a[(row, row)];
        }
    }
    x
}

/// Nuclear norm of the column-centered matrix from the eigenvalues of its Gram matrix.
pub fn nuclear_norm_oracle(samples: &DMatrix<f64>) -> f64 {
    let n = samples.nrows();
    let mut centered = samples.clone();
    for c in 0..samples.ncols() {
        let mean = samples.column(c).sum() / n as f64;
        for r in 0..n {
            centered[(r, c)] -= mean;
        }
    }
    let gram = &centered * centered.transpose();
    let (values, _) = jacobi_eigen(&gram);
    let top = values.iter().copied().fold(0.0, f64::max);
    values.iter().filter(|&&v| v > 1e-12 * top).map(|v| v.sqrt()).sum()
}

/// Oracle KNN prediction: neighbors chosen by repeated minimum selection
/// (lowest index wins ties), majority vote with ties to the nearest label,
/// circular-mean pose.
pub fn brute_knn(
    train: &DMatrix<f64>,
    categories: &[String],
    poses: &[f64],
    query: &[f64],
    k: usize,
) -> (String, f64) {
    let dist: Vec<f64> = (0..train.nrows())
        .map(|i| (0..query.len()).map(|j| (train[(i, j)] - query[j]).powi(2)).sum())
        .collect();
    let mut taken = vec![false; dist.len()];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<usize> = None;
        for i in 0..dist.len() {
            if !taken[i] && best.is_none_or(|b| dist[i] < dist[b]) {
                best = Some(i);
            }
        }
        let b = best.unwrap();
        taken[b] = true;
        chosen.push(b);
    }
    let mut best_label = categories[chosen[0]].clone();
    let mut best_count = 0;
    let mut best_rank = usize::MAX;
    for &i in &chosen {
        let label = &categories[i];
        let count = chosen.iter().filter(|&&j| &categories[j] == label).count();
        let first = chosen.iter().position(|&j| &categories[j] == label).unwrap();
        if count > best_count || (count == best_count && first < best_rank) {
            best_label = label.clone();
            best_count = count;
            best_rank = first;
        }
    }
    let (mut sx, mut sy) = (0.0, 0.0);
    for &i in &chosen {
        sx += poses[i].cos();
        sy += poses[i].sin();
    }
    let pose = if sx.hypot(sy) <= 1e-12 * k as f64 {
        poses[chosen[0]]
    } else {
        sy.atan2(sx).rem_euclid(TAU)
    };
    (best_label, pose)
}

/// Median of the nonzero pairwise row distances.
pub fn median_nonzero_distance(x: &DMatrix<f64>) -> f64 {
    let mut d = Vec::new();
    for i in 0..x.nrows() {
        for j in (i + 1)..x.nrows() {
            let v = (x.row(i) - x.row(j)).norm();
            if v > 0.0 {
                d.push(v);
            }
        }
    }
    d.sort_by(f64::total_cmp);
    let m = d.len() / 2;
    if d.len() % 2 == 0 {
        0.5 * (d[m - 1] + d[m])
    } else {
        d[m]
    }
}

/// Kernel ridge `(cos, sin)` outputs by a dense solve of `(K + ridge I) alpha = Y`.
pub fn kernel_ridge_oracle(
    train: &DMatrix<f64>,
    poses: &[f64],
    test: &DMatrix<f64>,
    ridge: f64,
) -> DMatrix<f64> {
    let sigma = median_nonzero_distance(train);
    let k = |a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize| {
        (-(a.row(i) - b.row(j)).norm_squared() / (2.0 * sigma * sigma)).exp()
    };
    let m = train.nrows();
    let gram = DMatrix::from_fn(m, m, |i, j| k(train, i, train, j) + if i == j { ridge } else { 0.0 });
    let y = DMatrix::from_fn(m, 2, |i, c| if c == 0 { poses[i].cos() } else { poses[i].sin() });
    let alpha = gauss_solve(&gram, &y);
    DMatrix::from_fn(test.nrows(), m, |i, j| k(test, i, train, j)) * alpha
}

/// TPS coefficients `C` (`rows x (N + 3)`) from an independent assembly and solve.
pub fn tps_oracle(rebased: &DMatrix<f64>, poses: &[f64], lambda: f64) -> DMatrix<f64> {
    let n = poses.len();
    let mut lhs = DMatrix::zeros(n + 3, n + 3);
    for i in 0..n {
        for j in 0..n {
            let r = ((poses[i].cos() - poses[j].cos()).powi(2) + (poses[i].sin() - poses[j].sin()).powi(2)).sqrt();
            lhs[(i, j)] = r * r * r + if i == j { lambda } else { 0.0 };
        }
        let p = [1.0, poses[i].cos(), poses[i].sin()];
        for e in 0..3 {
            lhs[(i, n + e)] = p[e];
            lhs[(n + e, i)] = p[e];
        }
    }
    let mut rhs = DMatrix::zeros(n + 3, rebased.nrows());
    for i in 0..n {
        for r in 0..rebased.nrows() {
            rhs[(i, r)] = rebased[(r, i)];
        }
    }
    gauss_solve(&lhs, &rhs).transpose()
}

/// `min(|a-b|, 2pi-|a-b|)/pi` for angles already reduced to `[0, 2pi)`.
pub fn aaai_oracle(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(TAU - d) / PI
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, d, d).qr().q()
}

/// `n` sorted poses in `[0, 2pi)` with gaps of at least `0.2` radians.
pub fn spread_poses(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let slack = TAU - 0.2 * n as f64;
    let mut cuts: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * slack).collect();
    cuts.sort_by(f64::total_cmp);
    let offset = rng.random::<f64>() * 0.1;
    cuts.iter()
        .enumerate()
        .map(|(i, c)| (offset + c + 0.2 * i as f64).min(TAU - 1e-9))
        .collect()
}
