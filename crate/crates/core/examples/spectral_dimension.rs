//! Spread and effective dimensionality of a few synthetic view manifolds.

use manifold_probe::synth::{generate, SynthSpec};
use manifold_probe::{center_and_rebase, effective_p, nuclear_norm};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [
        SynthSpec::new(1, 100, 300, 1),
        SynthSpec::new(4, 100, 3, 2).with_radius(50.0),
        SynthSpec::new(6, 100, 3, 3),
        SynthSpec::new(9, 100, 100, 4),
        SynthSpec::new(10, 100, 100, 5),
    ];
    println!("{:<18} {:>12} {:>6} {:>6} {:>6}", "instance", "nuclear", "p=80", "p=90", "p=99");
    for spec in &specs {
        let basis = center_and_rebase(&generate(spec)?);
        println!(
            "{:<18} {:>12.4} {:>6} {:>6} {:>6}",
            spec.label(),
            nuclear_norm(&basis),
            effective_p(&basis, 80.0)?,
            effective_p(&basis, 90.0)?,
            effective_p(&basis, 99.0)?
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
