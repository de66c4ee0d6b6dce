//! KNN, linear SVM and kernel pose regression over a pool of instances.
//!
//! Four synthetic objects in two categories are viewed from 36 poses; even
//! poses train, odd poses test.

use manifold_probe::global::{measure_global, GlobalConfig, LabeledFeatureSet, Split};
use manifold_probe::synth::{generate, SynthSpec};
use nalgebra::DMatrix;

fn pooled(split: Split) -> Result<LabeledFeatureSet, Box<dyn std::error::Error>> {
    let objects = [(1u8, 11u64, "ring", 0.0), (1, 12, "ring", 3.0), (4, 13, "saddle", 6.0), (4, 14, "saddle", 9.0)];
    let keep = |k: usize| (k % 2 == 0) == (split == Split::Train);
    let (mut rows, mut categories, mut poses, mut ids) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (family, seed, category, offset) in objects {
        let slice = generate(&SynthSpec::new(family, 36, 3, seed))?;
        for k in (0..slice.len()).filter(|&k| keep(k)) {
            rows.push(slice.samples().row(k).add_scalar(offset));
            categories.push(category.to_string());
            poses.push(slice.poses()[k]);
            ids.push(format!("{category}-{seed}"));
        }
    }
    Ok(LabeledFeatureSet::new(DMatrix::from_rows(&rows), categories, poses, ids, split)?)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let train = pooled(Split::Train)?;
    let test = pooled(Split::Test)?;
    let result = measure_global(&train, &test, &GlobalConfig::default())?;
    let knn = result.knn.as_ref().expect("knn runs on this data");
    for (i, k) in knn.k_values.iter().enumerate() {
        println!(
            "k={k}: category {:.3}  pose<22.5 {:.3}  aaai {:.4}",
            knn.category_accuracy[i], knn.pose_accuracy[i], knn.pose_aaai_mean[i]
        );
    }
    println!("gaps: category {:.3}  pose {:.3}", knn.category_gap, knn.pose_gap);
    if let Some(svm) = &result.svm {
        println!("svm accuracy {:.3} (C = {})", svm.accuracy, svm.selected_c);
    }
    if let Some(reg) = &result.regression {
        println!(
            "pose regression: aaai {:.4}  <22.5 {:.3}  <45 {:.3}",
            reg.metrics.aaai_mean, reg.metrics.within_22_5, reg.metrics.within_45
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
