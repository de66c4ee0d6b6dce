//! KPLS from manifold kernels onto the ideal circle kernel: regression error
//! and residual Gram energy as the number of components grows.

use manifold_probe::center_and_rebase;
use manifold_probe::kernel::{default_neighborhood, ideal_circle_kernel, manifold_kernel};
use manifold_probe::kpls::{fit_kpls, kpls_norm_ratio, kpls_regression_error};
use manifold_probe::synth::{generate, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for spec in [SynthSpec::new(2, 60, 50, 1), SynthSpec::new(9, 60, 50, 2), SynthSpec::new(10, 60, 50, 3)] {
        let slice = generate(&spec)?;
        let basis = center_and_rebase(&slice);
        let n = default_neighborhood(slice.len());
        let input = manifold_kernel(&basis, slice.poses(), n)?;
        let target = ideal_circle_kernel(slice.poses(), n)?;
        print!("{:<14}", spec.label());
        for d in 1..=6 {
            let model = fit_kpls(&input, &target, d)?;
            let err = kpls_regression_error(&model, &input, &target)?;
            print!("  d={d}: delta {:.3} ratio {:.3}", err.delta, kpls_norm_ratio(&model));
        }
        println!();
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
