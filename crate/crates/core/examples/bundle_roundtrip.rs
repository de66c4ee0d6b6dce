//! Saves synthetic manifolds as a feature bundle, reads it back and checks
//! that the measures survive the trip unchanged.

use manifold_probe::global::Split;
use manifold_probe::io::{bundle_paths, load_bundle, save_bundle, FeatureBundle};
use manifold_probe::synth::{generate, SynthSpec};
use manifold_probe::{center_and_rebase, nuclear_norm};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let slices = vec![generate(&SynthSpec::new(1, 48, 12, 5))?, generate(&SynthSpec::new(9, 48, 12, 6))?];
    let bundle = FeatureBundle::from_slices("demo", "synthetic", &slices)?;
    let dir = std::env::temp_dir().join("manifold-probe-bundle-demo");
    save_bundle(&bundle, &dir, "demo")?;
    let (csv, json) = bundle_paths(&dir.join("demo"));
    let loaded = load_bundle(&csv, &json, Split::Train)?;
    assert_eq!(loaded.bundle, bundle);
    for (before, after) in slices.iter().zip(&loaded.slices) {
        let a = nuclear_norm(&center_and_rebase(before));
        let b = nuclear_norm(&center_and_rebase(after));
        println!("{:<14} nuclear {a:.12} -> {b:.12}", after.instance_id());
    }
    println!("{} rows x {} columns at {}", loaded.set.len(), loaded.set.dim(), csv.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
