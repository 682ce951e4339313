//! Deterministic and seeded test paths.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;

/// Seed used by the benchmark and trend examples unless overridden.
pub const DEFAULT_SEED: u64 = 20_210_301;

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    Ok(())
}

/// Upper unit half-circle from `(1, 0)` to `(-1, 0)`.
pub fn half_circle(samples: usize) -> Result<PiecewiseLinearPath> {
    check_samples(samples)?;
    let points = (0..samples)
        .map(|j| {
            let a = PI * j as f64 / (samples - 1) as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    PiecewiseLinearPath::new(points)
}

/// Two turns of a conical spiral climbing the `z` axis.
pub fn spiral(samples: usize) -> Result<PiecewiseLinearPath> {
    check_samples(samples)?;
    let points = (0..samples)
        .map(|j| {
            let s = j as f64 / (samples - 1) as f64;
            let r = 1.0 - 0.5 * s;
            let a = 4.0 * PI * s;
            vec![r * a.cos(), r * a.sin(), s]
        })
        .collect();
    PiecewiseLinearPath::new(points)
}

/// Straight line from `start` to `end` sampled at `samples` points.
pub fn sampled_line(start: &[f64], end: &[f64], samples: usize) -> Result<PiecewiseLinearPath> {
    check_samples(samples)?;
    let points = (0..samples)
        .map(|j| {
            let w = j as f64 / (samples - 1) as f64;
            start
                .iter()
                .zip(end)
                .map(|(a, b)| a + w * (b - a))
                .collect()
        })
        .collect();
    PiecewiseLinearPath::new(points)
}

/// Path with `pieces` segments starting at the origin, every later vertex
/// drawn uniformly in `[0, 1]^dim`.
pub fn random_unit_cube_path<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    pieces: usize,
) -> Result<PiecewiseLinearPath> {
    if dim == 0 || pieces == 0 {
        return Err(Error::InvalidArgument(
            "dimension and piece count must be positive".into(),
        ));
    }
    let mut points = vec![vec![0.0; dim]];
    for _ in 0..pieces {
        points.push((0..dim).map(|_| rng.random::<f64>()).collect());
    }
    PiecewiseLinearPath::new(points)
}

/// `count` benchmark paths with 10 pieces each.
pub fn bench_paths(seed: u64, dim: usize, count: usize) -> Result<Vec<PiecewiseLinearPath>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_unit_cube_path(&mut rng, dim, 10))
        .collect()
}

/// AR(1) noise `e_j = φ e_{j-1} + σ ξ_j`, `ξ_j ~ N(0, 1)`, `e_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Noise {
    pub phi: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl Default for Ar1Noise {
    fn default() -> Self {
        Ar1Noise {
            phi: 0.5,
            sigma: 0.1,
            seed: DEFAULT_SEED,
        }
    }
}

impl Ar1Noise {
    pub fn sample(&self, len: usize) -> Result<Vec<f64>> {
        if !(self.phi.abs() < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "AR(1) coefficient must satisfy |phi| < 1, got {}",
                self.phi
            )));
        }
        let normal = Normal::new(0.0, self.sigma)
            .map_err(|e| Error::InvalidArgument(format!("noise scale: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut e = 0.0;
        Ok((0..len)
            .map(|_| {
                e = self.phi * e + normal.sample(&mut rng);
                e
            })
            .collect())
    }
}

/// Time-augmented series `(t_j, cos(2π t_j) + e_j)` on a uniform grid of
/// `[0, 1]`. Returns `(noisy, clean)`.
pub fn noisy_cosine(
    samples: usize,
    noise: &Ar1Noise,
) -> Result<(PiecewiseLinearPath, PiecewiseLinearPath)> {
    check_samples(samples)?;
    let e = noise.sample(samples)?;
    let mut noisy = Vec::with_capacity(samples);
    let mut clean = Vec::with_capacity(samples);
    for (j, ej) in e.iter().enumerate() {
        let t = j as f64 / (samples - 1) as f64;
        let c = (2.0 * PI * t).cos();
        clean.push(vec![t, c]);
        noisy.push(vec![t, c + ej]);
    }
    Ok((
        PiecewiseLinearPath::new(noisy)?,
        PiecewiseLinearPath::new(clean)?,
    ))
}
