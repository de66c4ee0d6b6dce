//! Measures the whole reference corpus and writes a report with plot rows.

use std::time::Instant;

use manifold_probe::measure::{measure_local, LocalConfig};
use manifold_probe::report::{write_report, Report};
use manifold_probe::synth::default_corpus;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let slices: Vec<_> = default_corpus(2024).into_iter().map(|(_, s)| s).collect();
    let report = measure_local(&[("synthetic".to_string(), slices)], &LocalConfig::default())?;
    let layer = &report.layers[0];
    println!(
        "{:<18} {:>10} {:>4} {:>7} {:>7} {:>7} {:>7}  flags",
        "instance", "nuclear", "eff", "kta", "delta", "ratio", "rcond"
    );
    for (id, m) in &layer.per_instance {
        println!(
            "{:<18} {:>10.3} {:>4} {:>7.4} {:>7.4} {:>7.4} {:>7.4}  {}",
            id,
            m.nuclear_norm,
            m.effective_p,
            m.kta,
            m.kpls_delta,
            m.kpls_norm_ratio,
            m.tps_rcond_poly,
            m.flags.join(",")
        );
    }
    let out = std::env::temp_dir().join("manifold-probe-corpus-report.json");
    let rows = write_report(&Report::Local(report), &out)?;
    println!("wrote {} and {} in {:.2?}", out.display(), rows.display(), start.elapsed());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
