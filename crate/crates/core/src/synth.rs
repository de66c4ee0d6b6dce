//! Deterministic generators for ten families of synthetic view manifolds.
//!
//! Every family samples `n` equally spaced parameters `t_k = 2 pi k / n`, which
//! also serve as pose labels:
//!
//! | family | construction |
//! |--------|--------------|
//! | 1, 2   | unit circle mapped into `d` dimensions by a random orthonormal 2-frame |
//! | 3      | `(x, y, sin(3x) cos(2y)^2)` over the unit circle |
//! | 4      | `r (sin phi cos t, sin phi sin t, cos phi)` with `phi = pi/4 sin(t) + pi/2` |
//! | 5      | family 4 plus Gaussian noise (`sigma = 0.01`) added after scaling |
//! | 6      | as 4 with `phi = pi/4 sin(5t) + pi/2` |
//! | 7      | as 4 with `phi = pi/4 tan(0.75t) + pi/2`, offset clamped to `pi/2 - 1e-3` |
//! | 8      | uniform points in `[0, 1)^d` |
//! | 9      | standard normal points in `R^d` |
//! | 10     | `n/4` points drawn from `N(0, 0.01^2)`, tiled to `n` rows |
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`; normal variates use the ziggurat sampler
//! of `rand_distr::StandardNormal`. Both are platform independent, so a
//! `(spec, seed)` pair reproduces bit for bit everywhere.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::ManifoldSlice;

/// Clamp on `|phi - pi/2|` for family 7.
pub const TAN_CLAMP: f64 = FRAC_PI_2 - 1e-3;
pub const DEFAULT_NOISE: f64 = 0.01;

/// Parameters of one synthetic manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub family: u8,
    pub n_points: usize,
    pub dim: usize,
    /// Sphere radius for families 4-7.
    pub radius_r: f64,
    /// Additive noise for family 5; spread of the seed points for family 10.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Spec with the family's default radius (1) and noise.
    pub fn new(family: u8, n_points: usize, dim: usize, seed: u64) -> Self {
        Self {
            family,
            n_points,
            dim,
            radius_r: 1.0,
            noise_sigma: if matches!(family, 5 | 10) { DEFAULT_NOISE } else { 0.0 },
            seed,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius_r = radius;
        self
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(1..=10).contains(&self.family) {
            return bad(format!("family {} outside 1..=10", self.family));
        }
        let min_points = if self.family == 10 { 4 } else { 3 };
        if self.n_points < min_points {
            return bad(format!("family {} needs at least {min_points} points", self.family));
        }
        match self.family {
            1 | 2 if self.dim < 2 => return bad(format!("family {} needs dim >= 2", self.family)),
            3..=7 if self.dim != 3 => return bad(format!("family {} lives in 3 dimensions", self.family)),
            _ if self.dim == 0 => return bad("dim must be positive".into()),
            _ => {}
        }
        if !(self.radius_r > 0.0 && self.radius_r.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius_r));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise sigma must be non-negative, got {}", self.noise_sigma));
        }
        Ok(())
    }

    /// Instance id, e.g. `f04-n100-d3-r50`.
    pub fn label(&self) -> String {
        let mut s = format!("f{:02}-n{}-d{}", self.family, self.n_points, self.dim);
        if (4..=7).contains(&self.family) {
            s.push_str(&format!("-r{}", self.radius_r));
        }
        s
    }

    /// Category label, e.g. `family-04`.
    pub fn category(&self) -> String {
        format!("family-{:02}", self.family)
    }
}

/// Pose parameters `2 pi k / n`.
pub fn pose_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// Generates the manifold described by `spec`.
pub fn generate(spec: &SynthSpec) -> Result<ManifoldSlice> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let t = pose_grid(spec.n_points);
    let n = spec.n_points;
    let samples = match spec.family {
        1 | 2 => {
            let frame = orthonormal_frame(spec.dim, 2, &mut rng);
            DMatrix::from_fn(n, spec.dim, |r, c| t[r].cos() * frame[(c, 0)] + t[r].sin() * frame[(c, 1)])
        }
        3 => DMatrix::from_fn(n, 3, |r, c| {
            let (x, y) = (t[r].cos(), t[r].sin());
            match c {
                0 => x,
                1 => y,
                _ => (3.0 * x).sin() * (2.0 * y).cos().powi(2),
            }
        }),
        4..=7 => {
            let mut m = DMatrix::from_fn(n, 3, |r, c| {
                let theta = t[r];
                let phi = sphere_latitude(spec.family, theta);
                spec.radius_r
                    * match c {
                        0 => phi.sin() * theta.cos(),
                        1 => phi.sin() * theta.sin(),
                        _ => phi.cos(),
                    }
            });
            if spec.family == 5 {
                for v in m.iter_mut() {
                    *v += spec.noise_sigma * rng.sample::<f64, _>(StandardNormal);
                }
            }
            m
        }
        8 => {
            let values: Vec<f64> = (0..n * spec.dim).map(|_| rng.random::<f64>()).collect();
            DMatrix::from_row_slice(n, spec.dim, &values)
        }
        9 => {
            let values: Vec<f64> = (0..n * spec.dim).map(|_| rng.sample(StandardNormal)).collect();
            DMatrix::from_row_slice(n, spec.dim, &values)
        }
        10 => {
            let m = n / 4;
            let values: Vec<f64> = (0..m * spec.dim)
                .map(|_| spec.noise_sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let seeds = DMatrix::from_row_slice(m, spec.dim, &values);
            DMatrix::from_fn(n, spec.dim, |r, c| seeds[(r % m, c)])
        }
        _ => unreachable!("validated family"),
    };
    ManifoldSlice::new(spec.label(), spec.category(), t, samples)
}

/// Latitude `phi(theta)` of the sphere families.
fn sphere_latitude(family: u8, theta: f64) -> f64 {
    match family {
        4 | 5 => FRAC_PI_4 * theta.sin() + FRAC_PI_2,
        6 => FRAC_PI_4 * (5.0 * theta).sin() + FRAC_PI_2,
        7 => (FRAC_PI_4 * (0.75 * theta).tan()).clamp(-TAN_CLAMP, TAN_CLAMP) + FRAC_PI_2,
        _ => unreachable!("sphere families are 4-7"),
    }
}

/// `dim x k` matrix with orthonormal columns, from the QR factorization of a
/// standard normal matrix.
fn orthonormal_frame(dim: usize, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let values: Vec<f64> = (0..dim * k).map(|_| rng.sample(StandardNormal)).collect();
    let gaussian = DMatrix::from_row_slice(dim, k, &values);
    gaussian.qr().q()
}

/// Every parameterization of the reference grids, with per-item seeds drawn
/// from `seed`.
pub fn corpus_specs(seed: u64) -> Vec<SynthSpec> {
    let mut specs = Vec::new();
    for d in [10, 300, 600, 900, 1200, 1500, 1800] {
        specs.push(SynthSpec::new(1, 100, d, 0));
    }
    for n in [50, 150, 250, 350, 450, 550, 650, 750] {
        specs.push(SynthSpec::new(2, n, 500, 0));
    }
    specs.push(SynthSpec::new(3, 100, 3, 0));
    for family in 4..=7 {
        for r in [1.0, 50.0, 100.0, 150.0] {
            specs.push(SynthSpec::new(family, 100, 3, 0).with_radius(r));
        }
    }
    for d in [10, 100, 500, 1000, 4000] {
        specs.push(SynthSpec::new(8, 100, d, 0));
    }
    for n in (20..=200).step_by(20) {
        specs.push(SynthSpec::new(9, n, 100, 0));
    }
    for d in [10, 100, 500, 1000, 4000] {
        specs.push(SynthSpec::new(10, 100, d, 0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for spec in &mut specs {
        spec.seed = rng.next_u64();
    }
    specs
}

/// The full reference corpus.
pub fn default_corpus(seed: u64) -> Vec<(SynthSpec, ManifoldSlice)> {
    use rayon::prelude::*;
    corpus_specs(seed)
        .into_par_iter()
        .map(|spec| {
            let slice = generate(&spec).expect("reference grid specs are valid");
            (spec, slice)
        })
        .collect()
}
