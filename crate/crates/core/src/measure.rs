//! Per-instance measurement pipeline: spectrum, kernel alignment, KPLS and
//! thin-plate-spline measures of every view manifold, grouped by layer.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{default_neighborhood, hsic, ideal_circle_kernel, kta, manifold_kernel_with, NeighborhoodRule};
use crate::kpls::{fit_kpls, kpls_norm_ratio, kpls_regression_error, DEFAULT_COMPONENTS};
use crate::manifold::{center_and_rebase, effective_p, nuclear_norm, ManifoldSlice};
use crate::tps::{fit_tps, DEFAULT_LAMBDA};

/// Environment variable capping the worker count (0 or unset: all cores).
pub const THREADS_ENV: &str = "MANIFOLD_PROBE_THREADS";

/// Names of the per-instance measures, in report order.
pub const MEASURE_NAMES: [&str; 8] = [
    "nuclear_norm",
    "effective_p",
    "kta",
    "hsic",
    "kpls_delta",
    "kpls_norm_ratio",
    "tps_rcond_poly",
    "tps_rcond_nonpoly",
];

/// How Gaussian kernel bandwidths are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthPolicy {
    /// Median of the nonzero distances inside the neighborhood mask.
    #[default]
    MedianMaskedNonzero,
}

/// Every knob of a local measurement run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalConfig {
    /// Kernel neighborhood size; `None` picks `max(2, N/4)` per instance.
    pub neighborhood_n: Option<usize>,
    pub neighborhood_rule: NeighborhoodRule,
    /// Energy percentage for effective dimensionality.
    pub p: f64,
    pub kpls_d: usize,
    pub tps_lambda: f64,
    pub bandwidth_policy: BandwidthPolicy,
    /// Recorded for reproducibility; the local measures draw no random numbers.
    pub seed: u64,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            neighborhood_n: None,
            neighborhood_rule: NeighborhoodRule::default(),
            p: 90.0,
            kpls_d: DEFAULT_COMPONENTS,
            tps_lambda: DEFAULT_LAMBDA,
            bandwidth_policy: BandwidthPolicy::default(),
            seed: 0,
        }
    }
}

impl LocalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 100.0) {
            return Err(Error::InvalidPercentage(self.p));
        }
        if self.kpls_d == 0 {
            return Err(Error::InvalidComponents { d: 0, n: 0 });
        }
        if !(self.tps_lambda >= 0.0 && self.tps_lambda.is_finite()) {
            return Err(Error::InvalidSpec(format!("tps_lambda must be non-negative, got {}", self.tps_lambda)));
        }
        Ok(())
    }
}

/// Measures of one view manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeasures {
    pub category: String,
    pub samples: usize,
    pub dim: usize,
    pub neighborhood_n: usize,
    pub nuclear_norm: f64,
    pub effective_p: usize,
    pub kta: f64,
    pub hsic: f64,
    pub kpls_delta: f64,
    pub kpls_norm_ratio: f64,
    pub tps_rcond_poly: f64,
    pub tps_rcond_nonpoly: f64,
    /// Regularization the TPS fit ended up using.
    pub tps_lambda: f64,
    /// Degeneracy markers; empty for a clean run.
    pub flags: Vec<String>,
}

impl InstanceMeasures {
    /// Value of a measure listed in [`MEASURE_NAMES`].
    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "nuclear_norm" => self.nuclear_norm,
            "effective_p" => self.effective_p as f64,
            "kta" => self.kta,
            "hsic" => self.hsic,
            "kpls_delta" => self.kpls_delta,
            "kpls_norm_ratio" => self.kpls_norm_ratio,
            "tps_rcond_poly" => self.tps_rcond_poly,
            "tps_rcond_nonpoly" => self.tps_rcond_nonpoly,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Measures of every instance in one feature layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layer: String,
    pub per_instance: BTreeMap<String, InstanceMeasures>,
    pub aggregates: BTreeMap<String, Aggregate>,
}

/// Local measures of one or more layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub config: LocalConfig,
    pub layers: Vec<LayerReport>,
}

/// Mean and population standard deviation of each measure, in instance-id order.
pub fn aggregate(per_instance: &BTreeMap<String, InstanceMeasures>) -> BTreeMap<String, Aggregate> {
    let mut out = BTreeMap::new();
    if per_instance.is_empty() {
        return out;
    }
    let count = per_instance.len() as f64;
    for name in MEASURE_NAMES {
        let values: Vec<f64> = per_instance.values().map(|m| m.get(name).expect("known measure")).collect();
        let mean = values.iter().sum::<f64>() / count;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
        out.insert(name.to_string(), Aggregate { mean, std: var.sqrt() });
    }
    out
}

/// Runs every local measure on one manifold.
pub fn measure_instance(slice: &ManifoldSlice, config: &LocalConfig) -> Result<InstanceMeasures> {
    config.validate()?;
    let mut flags = Vec::new();
    let basis = center_and_rebase(slice);
    let n = config.neighborhood_n.unwrap_or_else(|| default_neighborhood(slice.len()));

    let manifold = manifold_kernel_with(&basis, slice.poses(), n, config.neighborhood_rule)?;
    let ideal = ideal_circle_kernel(slice.poses(), n)?;
    if manifold.degenerate {
        flags.push("manifold_kernel_degenerate".to_string());
    }

    let model = fit_kpls(&manifold, &ideal, config.kpls_d)?;
    if model.early_stop {
        flags.push(format!("kpls_early_stop:{}", model.extracted));
    }
    if model.eigen_fallbacks > 0 {
        flags.push(format!("kpls_eigen_fallback:{}", model.eigen_fallbacks));
    }
    if model.zero_row_norms {
        flags.push("kpls_zero_row_norm".to_string());
    }
    let regression = kpls_regression_error(&model, &manifold, &ideal)?;
    if regression.singular {
        flags.push("kpls_singular_prediction".to_string());
    }

    let (tps_rcond_poly, tps_rcond_nonpoly, tps_lambda) = match fit_tps(&basis, slice.poses(), config.tps_lambda) {
        Ok(fit) => {
            if fit.escalations > 0 {
                flags.push(format!("tps_lambda_escalated:{}", fit.escalations));
            }
            (fit.rcond_poly, fit.rcond_nonpoly, fit.lambda)
        }
        Err(Error::SingularSystem { .. }) => {
            flags.push("tps_singular".to_string());
            (0.0, 0.0, config.tps_lambda)
        }
        Err(e) => return Err(e),
    };

    Ok(InstanceMeasures {
        category: slice.category().to_string(),
        samples: slice.len(),
        dim: slice.dim(),
        neighborhood_n: n,
        nuclear_norm: nuclear_norm(&basis),
        effective_p: effective_p(&basis, config.p)?,
        kta: kta(&manifold, &ideal)?,
        hsic: hsic(&manifold, &ideal)?,
        kpls_delta: regression.delta,
        kpls_norm_ratio: kpls_norm_ratio(&model),
        tps_rcond_poly,
        tps_rcond_nonpoly,
        tps_lambda,
        flags,
    })
}

/// Measures every slice of a layer in parallel.
pub fn measure_layer(layer: &str, slices: &[ManifoldSlice], config: &LocalConfig) -> Result<LayerReport> {
    config.validate()?;
    let results: Vec<InstanceMeasures> = slices
        .par_iter()
        .map(|s| measure_instance(s, config))
        .collect::<Result<_>>()?;
    let mut per_instance = BTreeMap::new();
    for (slice, measures) in slices.iter().zip(results) {
        if per_instance.insert(slice.instance_id().to_string(), measures).is_some() {
            return Err(Error::InvalidBundle(format!(
                "instance {} appears twice in layer {layer}",
                slice.instance_id()
            )));
        }
    }
    Ok(LayerReport {
        layer: layer.to_string(),
        aggregates: aggregate(&per_instance),
        per_instance,
    })
}

/// Measures each `(layer, slices)` group on a pool sized by [`THREADS_ENV`].
pub fn measure_local(layers: &[(String, Vec<ManifoldSlice>)], config: &LocalConfig) -> Result<MeasureReport> {
    let pool = thread_pool()?;
    let layers = pool.install(|| {
        layers
            .iter()
            .map(|(name, slices)| measure_layer(name, slices, config))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(MeasureReport {
        config: config.clone(),
        layers,
    })
}

/// A rayon pool honoring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidSpec(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot build thread pool: {e}")))
}
