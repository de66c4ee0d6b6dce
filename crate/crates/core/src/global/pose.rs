use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular error between a predicted and a true pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseError {
    /// Normalized circular error in `[0, 1]`.
    pub aaai: f64,
    /// Absolute angular error in degrees, `[0, 180]`.
    pub abs_err_deg: f64,
}

/// `min(|a - b|, 2pi - |a - b|) / pi` after reducing the difference modulo `2pi`.
pub fn pose_error(theta_pred: f64, theta_true: f64) -> PoseError {
    let diff = (theta_pred - theta_true).rem_euclid(TAU);
    let aaai = diff.min(TAU - diff) / PI;
    PoseError {
        aaai,
        abs_err_deg: 180.0 * aaai,
    }
}

/// Summary of pose predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseMetrics {
    pub count: usize,
    /// Mean normalized circular error.
    pub aaai_mean: f64,
    /// Fraction of samples with absolute error below 22.5 degrees.
    pub within_22_5: f64,
    /// Fraction of samples with absolute error below 45 degrees.
    pub within_45: f64,
}

pub fn pose_metrics(predicted: &[f64], truth: &[f64]) -> Result<PoseMetrics> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    if predicted.iter().chain(truth).any(|a| !a.is_finite()) {
        return Err(Error::InvalidBundle("non-finite angle".into()));
    }
    let count = truth.len();
    if count == 0 {
        return Ok(PoseMetrics {
            count,
            aaai_mean: 0.0,
            within_22_5: 0.0,
            within_45: 0.0,
        });
    }
    let errors: Vec<PoseError> = predicted.iter().zip(truth).map(|(&p, &t)| pose_error(p, t)).collect();
    let frac = |limit: f64| errors.iter().filter(|e| e.abs_err_deg < limit).count() as f64 / count as f64;
    Ok(PoseMetrics {
        count,
        aaai_mean: errors.iter().map(|e| e.aaai).sum::<f64>() / count as f64,
        within_22_5: frac(22.5),
        within_45: frac(45.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(pose_error(0.0, 0.0).aaai, 0.0);
        assert_eq!(pose_error(0.0, PI).aaai, 1.0);
        assert_eq!(pose_error(0.0, 3.0 * PI / 2.0).aaai, 0.5);
        assert_eq!(pose_error(0.0, PI).abs_err_deg, 180.0);
    }

    #[test]
    fn symmetric_and_periodic() {
        let (a, b) = (0.7, 5.1);
        assert!((pose_error(a, b).aaai - pose_error(b, a).aaai).abs() < 1e-15);
        assert!((pose_error(a + TAU, b).aaai - pose_error(a, b).aaai).abs() < 1e-12);
    }

    #[test]
    fn metrics_of_opposite_predictions() {
        let truth = [0.0, 1.0, 2.0, 4.0];
        let pred: Vec<f64> = truth.iter().map(|t| t + PI).collect();
        let m = pose_metrics(&pred, &truth).unwrap();
        assert!((m.aaai_mean - 1.0).abs() < 1e-12);
        assert_eq!(m.within_45, 0.0);
    }

    #[test]
    fn thresholds_are_strict() {
        let d = |deg: f64| deg.to_radians();
        let m = pose_metrics(&[d(22.4), d(22.6), d(44.0), d(90.0)], &[0.0; 4]).unwrap();
        assert_eq!(m.within_22_5, 0.25);
        assert_eq!(m.within_45, 0.75);
    }
}
