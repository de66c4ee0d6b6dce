//! Invariants of the measures under randomized inputs.

mod support;

use std::f64::consts::TAU;

use manifold_probe::global::{
    knn_predictions, pose_error, train_linear_svm_with, KernelRidge, LabeledFeatureSet, Split, SvmConfig,
};
use manifold_probe::io::{format_float, read_bundle, save_bundle, FeatureBundle, SampleMeta};
use manifold_probe::kernel::{ideal_circle_kernel, kta, manifold_kernel};
use manifold_probe::kpls::{fit_kpls, kpls_norm_ratio};
use manifold_probe::{center_and_rebase, effective_p, nuclear_norm, CenteredBasis, ManifoldSlice};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::*;

fn slice_from(seed: u64, n: usize, d: usize) -> ManifoldSlice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = gaussian_matrix(&mut rng, n, d);
    ManifoldSlice::new("p", "c", spread_poses(&mut rng, n), samples).unwrap()
}

fn labeled(features: DMatrix<f64>, categories: Vec<String>, poses: Vec<f64>, split: Split) -> LabeledFeatureSet {
    let ids = (0..features.nrows()).map(|i| format!("i{i}")).collect();
    LabeledFeatureSet::new(features, categories, poses, ids, split).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, m: usize, d: usize, classes: usize, split: Split) -> LabeledFeatureSet {
    let features = gaussian_matrix(rng, m, d);
    let cats = (0..m).map(|i| format!("c{}", i % classes)).collect();
    let poses = (0..m).map(|_| rng.random::<f64>() * TAU).collect();
    labeled(features, cats, poses, split)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nuclear_norm_scales_with_absolute_factor(seed in any::<u64>(), n in 2usize..14, d in 1usize..12, c in -50.0f64..50.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian_matrix(&mut rng, n, d);
        let base = nuclear_norm(&CenteredBasis::from_samples(&x).unwrap());
        let scaled = nuclear_norm(&CenteredBasis::from_samples(&(&x * c)).unwrap());
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (c.abs() * base).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn spectrum_ignores_translation_and_rotation(seed in any::<u64>(), n in 2usize..14, d in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian_matrix(&mut rng, n, d);
        let q = random_orthogonal(&mut rng, d);
        let shift = gaussian_matrix(&mut rng, 1, d) * 100.0;
        let moved = DMatrix::from_fn(n, d, |i, j| (&x * &q)[(i, j)] + shift[(0, j)]);
        let a = CenteredBasis::from_samples(&x).unwrap();
        let b = CenteredBasis::from_samples(&moved).unwrap();
        for (s, t) in a.spectrum.iter().zip(&b.spectrum) {
            prop_assert!((s - t).abs() <= 1e-9 * a.spectrum[0].max(1.0));
        }
    }

    #[test]
    fn effective_dimension_grows_with_percentage(seed in any::<u64>(), n in 3usize..20, d in 1usize..10, p in 1.0f64..99.0) {
        let basis = center_and_rebase(&slice_from(seed, n, d));
        let lo = effective_p(&basis, p).unwrap();
        let hi = effective_p(&basis, p + 1.0).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(hi <= n.min(d).max(1));
        prop_assert!(effective_p(&basis, 100.0).unwrap() <= n);
    }

    #[test]
    fn pose_error_is_a_symmetric_periodic_metric(a in -20.0f64..20.0, b in -20.0f64..20.0, k in -3i32..3) {
        let e = pose_error(a, b).aaai;
        prop_assert!((0.0..=1.0).contains(&e));
        prop_assert!((e - pose_error(b, a).aaai).abs() < 1e-12);
        prop_assert!((e - pose_error(a + k as f64 * TAU, b).aaai).abs() < 1e-9);
        prop_assert!(pose_error(a, a).aaai == 0.0);
    }

    #[test]
    fn kernel_alignment_ignores_feature_scale(seed in any::<u64>(), n in 6usize..20, d in 2usize..6, c in 0.01f64..100.0) {
        let slice = slice_from(seed, n, d);
        let nb = (n / 4).max(2);
        let ideal = ideal_circle_kernel(slice.poses(), nb).unwrap();
        let base = manifold_kernel(&center_and_rebase(&slice), slice.poses(), nb).unwrap();
        let scaled_slice = slice.map_samples(|s| s * c).unwrap();
        let scaled = manifold_kernel(&center_and_rebase(&scaled_slice), slice.poses(), nb).unwrap();
        let (a, b) = (kta(&base, &ideal).unwrap(), kta(&scaled, &ideal).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&a));
        prop_assert!((kta(&ideal, &base).unwrap() - a).abs() < 1e-15);
    }

    #[test]
    fn residual_gram_shrinks_with_components(seed in any::<u64>(), n in 8usize..20, d in 2usize..6) {
        let slice = slice_from(seed, n, d);
        let nb = (n / 4).max(2);
        let input = manifold_kernel(&center_and_rebase(&slice), slice.poses(), nb).unwrap();
        let target = ideal_circle_kernel(slice.poses(), nb).unwrap();
        let mut previous = 1.0 + 1e-12;
        for comps in 1..6 {
            let ratio = kpls_norm_ratio(&fit_kpls(&input, &target, comps).unwrap());
            prop_assert!(ratio <= previous + 1e-9);
            previous = ratio;
        }
    }

    #[test]
    fn nearest_neighbor_recovers_training_points(seed in any::<u64>(), m in 2usize..30, d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let train = random_set(&mut rng, m, d, 3, Split::Train);
        let test = LabeledFeatureSet { split: Split::Test, ..train.clone() };
        for (i, p) in knn_predictions(&train, &test, 1).unwrap().iter().enumerate() {
            prop_assert_eq!(&p.category, &train.categories[i]);
            prop_assert!(pose_error(p.pose, train.poses[i]).aaai < 1e-12);
        }
    }

    #[test]
    fn svm_is_equivariant_to_power_of_two_scaling(seed in any::<u64>(), m in 10usize..40, d in 1usize..5, e in -4i32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let train = random_set(&mut rng, m, d, 3, Split::Train);
        let test = random_set(&mut rng, 10, d, 3, Split::Test);
        let s = 2f64.powi(e);
        let base_cfg = SvmConfig::default();
        let scaled_cfg = SvmConfig {
            c_grid: base_cfg.c_grid.iter().map(|c| c / (s * s)).collect(),
            bias: base_cfg.bias * s,
            ..base_cfg.clone()
        };
        let a = train_linear_svm_with(&train, &base_cfg).unwrap();
        let b = train_linear_svm_with(&train.with_features(&train.features * s).unwrap(), &scaled_cfg).unwrap();
        prop_assert_eq!(a.c / (s * s), b.c);
        for row in test.features.row_iter() {
            let x: Vec<f64> = row.iter().copied().collect();
            let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
            prop_assert_eq!(a.predict(&x), b.predict(&xs));
        }
    }

    #[test]
    fn pose_regression_ignores_rotations(seed in any::<u64>(), m in 5usize..25, d in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let train = random_set(&mut rng, m, d, 2, Split::Train);
        let test = gaussian_matrix(&mut rng, 4, d);
        let q = random_orthogonal(&mut rng, d);
        let a = KernelRidge::fit(&train, 1e-3).unwrap().predict_embedding(&test).unwrap();
        let rotated = train.with_features(&train.features * &q).unwrap();
        let b = KernelRidge::fit(&rotated, 1e-3).unwrap().predict_embedding(&(&test * &q)).unwrap();
        prop_assert!((&a - &b).amax() <= 1e-8 * a.amax().max(1.0));
    }

    #[test]
    fn floats_survive_text_formatting(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let back: f64 = format_float(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bundles_round_trip_exactly(
        rows in prop::collection::vec(prop::collection::vec(-1e300f64..1e300, 3), 1..12),
        poses in prop::collection::vec(0.0f64..359.999, 12),
    ) {
        let m = rows.len();
        let features = DMatrix::from_fn(m, 3, |i, j| rows[i][j]);
        let samples = (0..m)
            .map(|i| SampleMeta {
                instance: format!("obj{}", i % 2),
                category: if i % 2 == 0 { "even".into() } else { "odd, \"quoted\"".into() },
                pose_deg: poses[i] / 2.0 + 180.0 * (i / 2 % 2) as f64,
            })
            .collect();
        let bundle = FeatureBundle { name: "prop".into(), layer: "l".into(), features, samples };
        prop_assume!(bundle.validate().is_ok());
        let dir = tempfile::tempdir().unwrap();
        let (csv, json) = save_bundle(&bundle, dir.path(), "prop").unwrap();
        prop_assert_eq!(read_bundle(&csv, &json).unwrap(), bundle);
    }
}
