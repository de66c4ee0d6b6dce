//! Synthetic corpus, bundle files and reports working together.

use std::collections::BTreeMap;

use manifold_probe::global::Split;
use manifold_probe::io::{find_bundles, load_bundle, merge_feature_sets, read_bundles, save_bundle, FeatureBundle};
use manifold_probe::linalg::row_distances;
use manifold_probe::measure::{measure_local, LocalConfig, MEASURE_NAMES};
use manifold_probe::report::{plot_rows_path, read_report, write_report, Report};
use manifold_probe::synth::{corpus_specs, default_corpus, generate, SynthSpec};
use manifold_probe::{center_and_rebase, nuclear_norm, ManifoldSlice};

#[test]
fn corpus_survives_a_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = default_corpus(11);
    let mut expected = BTreeMap::new();
    for (spec, slice) in &corpus {
        let bundle = FeatureBundle::from_slices(spec.label(), "synthetic", std::slice::from_ref(slice)).unwrap();
        save_bundle(&bundle, dir.path(), &spec.label()).unwrap();
        expected.insert(spec.label(), nuclear_norm(&center_and_rebase(slice)));
    }
    let bundles = read_bundles(dir.path()).unwrap();
    assert_eq!(bundles.len(), corpus.len());
    for b in &bundles {
        let slices = b.to_slices().unwrap();
        let got = nuclear_norm(&center_and_rebase(&slices[0]));
        let want = expected[slices[0].instance_id()];
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{}", b.name);
    }

    let layers = vec![("synthetic".to_string(), bundles.iter().flat_map(|b| b.to_slices().unwrap()).collect())];
    let report = Report::Local(measure_local(&layers, &LocalConfig::default()).unwrap());
    let path = dir.path().join("out").join("report.json");
    let csv = write_report(&report, &path).unwrap();
    assert_eq!(csv, plot_rows_path(&path));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + corpus.len() * MEASURE_NAMES.len());
    assert_eq!(read_report(&path).unwrap(), report);
}

#[test]
fn circle_geometry_does_not_depend_on_the_embedding_seed() {
    let a = generate(&SynthSpec::new(1, 30, 50, 1)).unwrap();
    let b = generate(&SynthSpec::new(1, 30, 50, 2)).unwrap();
    assert_ne!(a.samples(), b.samples());
    let diff = (row_distances(a.samples()) - row_distances(b.samples())).amax();
    assert!(diff < 1e-12);
}

#[test]
fn collapsed_family_is_tiny_next_to_a_circle() {
    let circle = nuclear_norm(&center_and_rebase(&generate(&SynthSpec::new(1, 100, 100, 4)).unwrap()));
    let collapsed = nuclear_norm(&center_and_rebase(&generate(&SynthSpec::new(10, 100, 100, 4)).unwrap()));
    assert!(collapsed < 0.5 * circle, "{collapsed} vs {circle}");
}

#[test]
fn corpus_is_reproducible_and_seeded() {
    let a = corpus_specs(5);
    assert_eq!(a, corpus_specs(5));
    assert_ne!(a, corpus_specs(6));
    let first = &default_corpus(5)[0].1;
    assert_eq!(first, &generate(&a[0]).unwrap());
}

#[test]
fn layers_and_splits_come_from_bundle_files() {
    let dir = tempfile::tempdir().unwrap();
    for (layer, family) in [("conv", 1u8), ("fc", 2)] {
        let renamed: Vec<ManifoldSlice> = (0..3)
            .map(|i| {
                let s = generate(&SynthSpec::new(family, 12, 6, i)).unwrap();
                ManifoldSlice::new(format!("{layer}-{i}"), s.category(), s.poses().to_vec(), s.samples().clone()).unwrap()
            })
            .collect();
        let bundle = FeatureBundle::from_slices(layer, layer, &renamed).unwrap();
        save_bundle(&bundle, dir.path(), layer).unwrap();
    }
    let found = find_bundles(dir.path()).unwrap();
    assert_eq!(found.len(), 2);
    let bundles = read_bundles(dir.path()).unwrap();
    let set = merge_feature_sets(&bundles, Split::Test).unwrap();
    assert_eq!(set.len(), 2 * 3 * 12);
    assert_eq!(set.split, Split::Test);

    let (csv, json) = manifold_probe::io::bundle_paths(&dir.path().join("conv"));
    let loaded = load_bundle(&csv, &json, Split::Train).unwrap();
    assert_eq!(loaded.slices.len(), 3);
    assert_eq!(loaded.set.len(), 36);
    assert_eq!(loaded.bundle.layer, "conv");
}
