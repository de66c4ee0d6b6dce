//! Thin-plate-spline maps from the circle onto view manifolds and the
//! conditioning of their linear and radial coefficient blocks.

use manifold_probe::center_and_rebase;
use manifold_probe::synth::{generate, SynthSpec};
use manifold_probe::tps::{fit_tps, DEFAULT_LAMBDA};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for spec in [
        SynthSpec::new(1, 60, 10, 1),
        SynthSpec::new(3, 60, 3, 2),
        SynthSpec::new(4, 60, 3, 3),
        SynthSpec::new(7, 60, 3, 4),
        SynthSpec::new(8, 60, 10, 5),
    ] {
        let slice = generate(&spec)?;
        let basis = center_and_rebase(&slice);
        let fit = fit_tps(&basis, slice.poses(), DEFAULT_LAMBDA)?;
        let mid = 0.5 * (slice.poses()[0] + slice.poses()[1]);
        println!(
            "{:<14} rcond_poly {:.4}  rcond_nonpoly {:.3e}  residual {:.1e}  |map(mid)| {:.4}",
            spec.label(),
            fit.rcond_poly,
            fit.rcond_nonpoly,
            fit.residual,
            fit.map_angle(mid).norm()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
