//! Alignment of manifold kernels with the ideal circle kernel.
//!
//! A smooth closed curve keeps the neighborhood structure of the circle and
//! scores close to 1; a random cloud does not.

use manifold_probe::center_and_rebase;
use manifold_probe::kernel::{
    default_neighborhood, hsic, ideal_circle_kernel, kta, manifold_kernel_with, NeighborhoodRule,
};
use manifold_probe::synth::{generate, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for spec in [
        SynthSpec::new(1, 80, 20, 1),
        SynthSpec::new(6, 80, 3, 2),
        SynthSpec::new(7, 80, 3, 3),
        SynthSpec::new(8, 80, 20, 4),
    ] {
        let slice = generate(&spec)?;
        let basis = center_and_rebase(&slice);
        let n = default_neighborhood(slice.len());
        let ideal = ideal_circle_kernel(slice.poses(), n)?;
        for rule in [NeighborhoodRule::FeatureDistance, NeighborhoodRule::PoseLabels] {
            let k = manifold_kernel_with(&basis, slice.poses(), n, rule)?;
            println!(
                "{:<14} {:<16} kta {:.4}  hsic {:.3e}  sigma {:.4}",
                spec.label(),
                format!("{rule:?}"),
                kta(&k, &ideal)?,
                hsic(&k, &ideal)?,
                k.bandwidth
            );
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
