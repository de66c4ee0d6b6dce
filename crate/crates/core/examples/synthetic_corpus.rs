//! The seeded reference corpus: every parameterization of the ten families.

use std::collections::BTreeMap;

use manifold_probe::synth::default_corpus;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = default_corpus(7);
    let mut per_family: BTreeMap<u8, Vec<String>> = BTreeMap::new();
    for (spec, slice) in &corpus {
        per_family
            .entry(spec.family)
            .or_default()
            .push(format!("{}x{}", slice.len(), slice.dim()));
    }
    for (family, shapes) in &per_family {
        println!("family {family:>2}: {:>2} items  {}", shapes.len(), shapes.join(" "));
    }
    println!("{} items", corpus.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
