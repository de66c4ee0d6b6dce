//! Report documents and their plot-row companions.
//!
//! Reports are JSON with a `"kind"` tag (`"local"` or `"global"`) and fixed
//! key order. Plot rows are a tidy CSV with the header
//! `layer,instance,measure,value`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::{GlobalConfig, GlobalMeasures};
use crate::io::format_float;
use crate::measure::{MeasureReport, MEASURE_NAMES};

/// Global measures with the inputs and knobs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMeasureReport {
    pub config: GlobalConfig,
    /// Bundle names of the training split.
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub layer: String,
    pub measures: GlobalMeasures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Local(MeasureReport),
    Global(GlobalMeasureReport),
}

/// One tidy plot row.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub layer: String,
    pub instance: String,
    pub measure: String,
    pub value: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn plot_rows(&self) -> Vec<PlotRow> {
        let mut rows = Vec::new();
        let mut push = |layer: &str, instance: &str, measure: String, value: f64| {
            rows.push(PlotRow {
                layer: layer.to_string(),
                instance: instance.to_string(),
                measure,
                value,
            })
        };
        match self {
            Report::Local(r) => {
                for layer in &r.layers {
                    for (id, m) in &layer.per_instance {
                        for name in MEASURE_NAMES {
                            push(&layer.layer, id, name.to_string(), m.get(name).expect("known measure"));
                        }
                    }
                }
            }
            Report::Global(g) => {
                let m = &g.measures;
                if let Some(knn) = &m.knn {
                    for (i, k) in knn.k_values.iter().enumerate() {
                        push(&g.layer, "all", format!("knn_category_accuracy_k{k}"), knn.category_accuracy[i]);
                        push(&g.layer, "all", format!("knn_pose_accuracy_k{k}"), knn.pose_accuracy[i]);
                        push(&g.layer, "all", format!("knn_pose_aaai_k{k}"), knn.pose_aaai_mean[i]);
                    }
                    push(&g.layer, "all", "knn_category_gap".into(), knn.category_gap);
                    push(&g.layer, "all", "knn_pose_gap".into(), knn.pose_gap);
                }
                if let Some(svm) = &m.svm {
                    push(&g.layer, "all", "svm_accuracy".into(), svm.accuracy);
                }
                if let Some(reg) = &m.regression {
                    push(&g.layer, "all", "regression_aaai".into(), reg.metrics.aaai_mean);
                    push(&g.layer, "all", "regression_within_22_5".into(), reg.metrics.within_22_5);
                    push(&g.layer, "all", "regression_within_45".into(), reg.metrics.within_45);
                }
            }
        }
        rows
    }
}

/// Plot rows as CSV text with a header line.
pub fn plot_rows_csv(rows: &[PlotRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["layer", "instance", "measure", "value"])
        .expect("in-memory write");
    for r in rows {
        writer
            .write_record([r.layer.as_str(), r.instance.as_str(), r.measure.as_str(), &format_float(r.value)])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Companion plot-row path: `report.json` -> `report.csv`.
pub fn plot_rows_path(report_path: &Path) -> PathBuf {
    report_path.with_extension("csv")
}

/// Writes the report JSON to `path` and its plot rows next to it.
pub fn write_report(report: &Report, path: &Path) -> Result<PathBuf> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, report.to_json()).map_err(|e| Error::io(path, e))?;
    let csv_path = plot_rows_path(path);
    write_plot_rows(report, &csv_path)?;
    Ok(csv_path)
}

pub fn write_plot_rows(report: &Report, path: &Path) -> Result<()> {
    fs::write(path, plot_rows_csv(&report.plot_rows())).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
