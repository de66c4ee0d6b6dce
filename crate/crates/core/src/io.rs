//! Feature bundles: a headerless float CSV (one row per sample) paired with a
//! JSON sidecar naming the instance, category and pose of every row.
//!
//! ```json
//! {"name": "toy", "layer": "conv5",
//!  "samples": [{"instance": "mug-1", "category": "mug", "pose_deg": 0.0}]}
//! ```
//!
//! Poses are stored in degrees and converted to radians on load. Bundles
//! sharing a directory are paired by file stem (`stem.csv` + `stem.json`).

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::{LabeledFeatureSet, Split};
use crate::manifold::ManifoldSlice;

/// Labels of one bundle row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub instance: String,
    pub category: String,
    pub pose_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BundleMeta {
    name: String,
    layer: String,
    samples: Vec<SampleMeta>,
}

/// An in-memory feature bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBundle {
    pub name: String,
    pub layer: String,
    /// `M x d`; row `i` belongs to `samples[i]`.
    pub features: DMatrix<f64>,
    pub samples: Vec<SampleMeta>,
}

/// A validated bundle in both pooled and per-instance form.
#[derive(Debug, Clone)]
pub struct LoadedBundle {
    pub bundle: FeatureBundle,
    pub set: LabeledFeatureSet,
    /// One pose-sorted slice per instance, ordered by instance id.
    pub slices: Vec<ManifoldSlice>,
}

fn to_radians(deg: f64) -> f64 {
    let r = deg.to_radians();
    if r >= TAU {
        f64::from_bits(TAU.to_bits() - 1)
    } else {
        r
    }
}

impl FeatureBundle {
    /// Packs slices of equal dimension into one bundle.
    pub fn from_slices(name: impl Into<String>, layer: impl Into<String>, slices: &[ManifoldSlice]) -> Result<Self> {
        let dim = slices.first().map_or(0, ManifoldSlice::dim);
        let rows: usize = slices.iter().map(ManifoldSlice::len).sum();
        let mut features = DMatrix::zeros(rows, dim);
        let mut samples = Vec::with_capacity(rows);
        let mut at = 0;
        for slice in slices {
            if slice.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: slice.dim(),
                });
            }
            features.rows_mut(at, slice.len()).copy_from(slice.samples());
            at += slice.len();
            for &pose in slice.poses() {
                samples.push(SampleMeta {
                    instance: slice.instance_id().to_string(),
                    category: slice.category().to_string(),
                    pose_deg: pose.to_degrees() % 360.0,
                });
            }
        }
        let bundle = Self {
            name: name.into(),
            layer: layer.into(),
            features,
            samples,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.nrows() != self.samples.len() {
            return Err(Error::LengthMismatch {
                rows: self.features.nrows(),
                samples: self.samples.len(),
            });
        }
        for row in 0..self.features.nrows() {
            for col in 0..self.features.ncols() {
                if !self.features[(row, col)].is_finite() {
                    return Err(Error::NonFiniteFeature { row, col });
                }
            }
        }
        if self.name.is_empty() || self.layer.is_empty() {
            return Err(Error::InvalidBundle("name and layer must be non-empty".into()));
        }
        let mut seen = HashSet::new();
        let mut categories: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            if s.instance.is_empty() || s.category.is_empty() {
                return Err(Error::InvalidBundle(format!("sample {i} has an empty label")));
            }
            if !(0.0..360.0).contains(&s.pose_deg) {
                return Err(Error::InvalidBundle(format!(
                    "sample {i} pose {} deg outside [0, 360)",
                    s.pose_deg
                )));
            }
            if !seen.insert((s.instance.as_str(), s.pose_deg.to_bits())) {
                return Err(Error::DuplicatePose {
                    instance: s.instance.clone(),
                    pose_deg: s.pose_deg,
                });
            }
            let category = categories.entry(&s.instance).or_insert(&s.category);
            if *category != s.category {
                return Err(Error::InvalidBundle(format!(
                    "instance {} appears under categories {} and {}",
                    s.instance, category, s.category
                )));
            }
        }
        Ok(())
    }

    /// Pooled rows with radian poses.
    pub fn to_feature_set(&self, split: Split) -> Result<LabeledFeatureSet> {
        self.validate()?;
        LabeledFeatureSet::new(
            self.features.clone(),
            self.samples.iter().map(|s| s.category.clone()).collect(),
            self.samples.iter().map(|s| to_radians(s.pose_deg)).collect(),
            self.samples.iter().map(|s| s.instance.clone()).collect(),
            split,
        )
    }

    /// Rows grouped by instance into pose-sorted slices, ordered by instance id.
    pub fn to_slices(&self) -> Result<Vec<ManifoldSlice>> {
        self.validate()?;
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            groups.entry(&s.instance).or_default().push(i);
        }
        groups
            .into_iter()
            .map(|(instance, rows)| {
                let poses = rows.iter().map(|&i| to_radians(self.samples[i].pose_deg)).collect();
                let category = self.samples[rows[0]].category.clone();
                ManifoldSlice::from_unsorted(instance, category, poses, self.features.select_rows(rows.iter()))
            })
            .collect()
    }
}

/// Shortest decimal that parses back to the same bits, in exponent form for
/// very large or small magnitudes.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `(stem.csv, stem.json)` for a bundle stem path.
pub fn bundle_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("csv"), stem.with_extension("json"))
}

/// Writes `stem.csv` and `stem.json` under `dir`.
pub fn save_bundle(bundle: &FeatureBundle, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    bundle.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (csv_path, json_path) = bundle_paths(&dir.join(stem));

    let mut text = String::new();
    for row in bundle.features.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;

    let meta = BundleMeta {
        name: bundle.name.clone(),
        layer: bundle.layer.clone(),
        samples: bundle.samples.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).expect("bundle metadata serializes");
    fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn read_features(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_error(path, e.to_string()))?;
        if *width.get_or_insert(record.len()) != record.len() {
            return Err(parse_error(path, format!("row {row} has {} columns", record.len())));
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(path, format!("row {row}, column {col}: not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature { row, col });
            }
            values.push(v);
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, width.unwrap_or(0), &values))
}

/// Reads a bundle from its CSV and JSON files.
pub fn read_bundle(features_path: &Path, meta_path: &Path) -> Result<FeatureBundle> {
    let features = read_features(features_path)?;
    let text = fs::read_to_string(meta_path).map_err(|e| Error::io(meta_path, e))?;
    let meta: BundleMeta = serde_json::from_str(&text).map_err(|e| parse_error(meta_path, e.to_string()))?;
    let bundle = FeatureBundle {
        name: meta.name,
        layer: meta.layer,
        features,
        samples: meta.samples,
    };
    bundle.validate()?;
    Ok(bundle)
}

/// Reads and splits a bundle into pooled and per-instance forms.
pub fn load_bundle(features_path: &Path, meta_path: &Path, split: Split) -> Result<LoadedBundle> {
    let bundle = read_bundle(features_path, meta_path)?;
    let set = bundle.to_feature_set(split)?;
    let slices = bundle.to_slices()?;
    Ok(LoadedBundle { bundle, set, slices })
}

/// Bundle stems found at `path`: every `*.json` with a sibling `*.csv` in a
/// directory (sorted by name), or the stem of a single `.csv`/`.json` file.
pub fn find_bundles(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut stems = Vec::new();
        for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let p = entry.map_err(|e| Error::io(path, e))?.path();
            if p.extension().is_some_and(|e| e == "json") && p.with_extension("csv").is_file() {
                stems.push(p.with_extension(""));
            }
        }
        stems.sort();
        Ok(stems)
    } else if path.exists() {
        Ok(vec![path.with_extension("")])
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        ))
    }
}

/// Reads every bundle at `path` (see [`find_bundles`]).
pub fn read_bundles(path: &Path) -> Result<Vec<FeatureBundle>> {
    find_bundles(path)?
        .iter()
        .map(|stem| {
            let (csv_path, json_path) = bundle_paths(stem);
            read_bundle(&csv_path, &json_path)
        })
        .collect()
}

/// Concatenates bundles of equal dimension into one labeled set.
pub fn merge_feature_sets(bundles: &[FeatureBundle], split: Split) -> Result<LabeledFeatureSet> {
    let dim = bundles.first().map_or(0, |b| b.features.ncols());
    let rows: usize = bundles.iter().map(FeatureBundle::len).sum();
    let mut features = DMatrix::zeros(rows, dim);
    let (mut categories, mut poses, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    let mut at = 0;
    for b in bundles {
        if b.features.ncols() != dim && b.len() > 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: b.features.ncols(),
            });
        }
        let set = b.to_feature_set(split)?;
        features.rows_mut(at, set.len()).copy_from(&set.features);
        at += set.len();
        categories.extend(set.categories);
        poses.extend(set.poses);
        ids.extend(set.instance_ids);
    }
    LabeledFeatureSet::new(features, categories, poses, ids, split)
}
