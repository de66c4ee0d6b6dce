//! Circular pose errors and their summary.

use std::f64::consts::PI;

use manifold_probe::global::{pose_error, pose_metrics};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (pred, truth) in [(0.0, 0.0), (0.0, PI), (0.0, 1.5 * PI), (0.1, 2.0 * PI - 0.1)] {
        let e = pose_error(pred, truth);
        println!("pred {pred:.3} truth {truth:.3}: aaai {:.4}  {:.2} deg", e.aaai, e.abs_err_deg);
    }
    let truth: Vec<f64> = (0..8).map(|k| k as f64 * PI / 4.0).collect();
    let pred: Vec<f64> = truth.iter().enumerate().map(|(k, t)| t + 0.15 * k as f64).collect();
    let m = pose_metrics(&pred, &truth)?;
    println!(
        "n={} aaai {:.4}  <22.5 {:.1}%  <45 {:.1}%",
        m.count,
        m.aaai_mean,
        100.0 * m.within_22_5,
        100.0 * m.within_45
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
