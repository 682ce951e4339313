#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siginv::{PiecewiseLinearPath, TensorLevel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut impl Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn random_path(rng: &mut impl Rng, dim: usize, pieces: usize) -> PiecewiseLinearPath {
    let points = (0..=pieces).map(|_| random_vec(rng, dim, 1.0)).collect();
    PiecewiseLinearPath::new(points).unwrap()
}

pub fn random_level(rng: &mut impl Rng, dim: usize, degree: usize) -> TensorLevel {
    let len = dim.pow(degree as u32);
    TensorLevel::new(dim, degree, random_vec(rng, len, 1.0)).unwrap()
}

/// Planar path with given segment lengths and signed turning angles.
pub fn turning_path(lengths: &[f64], turns: &[f64], heading: f64) -> PiecewiseLinearPath {
    let mut points = vec![vec![0.0, 0.0]];
    let mut h = heading;
    for (i, len) in lengths.iter().enumerate() {
        if i > 0 {
            h += turns[i - 1];
        }
        let last = points.last().unwrap().clone();
        points.push(vec![last[0] + len * h.cos(), last[1] + len * h.sin()]);
    }
    PiecewiseLinearPath::new(points).unwrap()
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
