//! Round-trip reconstruction, error metrics and trend extraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::insertion::{invert_signature, InversionResult};
use crate::path::{norm, sub, PiecewiseLinearPath};
use crate::signature::path_signature;

/// Number of arc-length samples used by the curve error metrics.
pub const RESAMPLE_POINTS: usize = 200;

/// `count` points equally spaced in arc length along the polyline.
pub fn resample_arc_length(points: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    assert!(!points.is_empty() && count >= 2);
    let mut cumulative = Vec::with_capacity(points.len());
    cumulative.push(0.0);
    for w in points.windows(2) {
        let last = *cumulative.last().unwrap();
        cumulative.push(last + norm(&sub(&w[1], &w[0])));
    }
    let total = *cumulative.last().unwrap();
    if total == 0.0 {
        return vec![points[0].clone(); count];
    }
    let mut seg = 1;
    (0..count)
        .map(|j| {
            let s = total * j as f64 / (count - 1) as f64;
            while seg < points.len() - 1 && cumulative[seg] < s {
                seg += 1;
            }
            let (s0, s1) = (cumulative[seg - 1], cumulative[seg]);
            let w = if s1 > s0 {
                ((s - s0) / (s1 - s0)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            points[seg - 1]
                .iter()
                .zip(&points[seg])
                .map(|(a, b)| a + w * (b - a))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveError {
    pub mean: f64,
    pub max: f64,
}

/// Pointwise distance between two curves after translating `candidate` to
/// start where `reference` starts and resampling both by arc length.
pub fn curve_error(reference: &[Vec<f64>], candidate: &[Vec<f64>]) -> Result<CurveError> {
    if reference.is_empty() || candidate.is_empty() {
        return Err(Error::InvalidPath("empty curve".into()));
    }
    if reference[0].len() != candidate[0].len() {
        return Err(Error::DimensionMismatch {
            expected: reference[0].len(),
            found: candidate[0].len(),
        });
    }
    let shift = sub(&reference[0], &candidate[0]);
    let moved: Vec<Vec<f64>> = candidate
        .iter()
        .map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect())
        .collect();
    let a = resample_arc_length(reference, RESAMPLE_POINTS);
    let b = resample_arc_length(&moved, RESAMPLE_POINTS);
    let dists: Vec<f64> = a.iter().zip(&b).map(|(x, y)| norm(&sub(x, y))).collect();
    Ok(CurveError {
        mean: dists.iter().sum::<f64>() / dists.len() as f64,
        max: dists.iter().cloned().fold(0.0, f64::max),
    })
}

/// Mean `|x_2 - f(x_1)|` over arc-length samples of a curve in the plane,
/// the distance of a time-augmented series to the graph of `f`.
pub fn mean_graph_residual(curve: &[Vec<f64>], f: impl Fn(f64) -> f64) -> Result<f64> {
    if curve.is_empty() || curve[0].len() != 2 {
        return Err(Error::InvalidPath(
            "expected a non-empty planar curve".into(),
        ));
    }
    let r = resample_arc_length(curve, RESAMPLE_POINTS);
    Ok(r.iter().map(|p| (p[1] - f(p[0])).abs()).sum::<f64>() / r.len() as f64)
}

/// Largest distance between any two vertices.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(norm(&sub(a, b)));
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundtripRow {
    pub depth: usize,
    pub mean: f64,
    pub max: f64,
}

/// Sign at each depth, invert from the path's own start and measure the
/// reconstruction error.
pub fn roundtrip_errors(path: &PiecewiseLinearPath, depths: &[usize]) -> Result<Vec<RoundtripRow>> {
    depths
        .iter()
        .map(|&n| {
            let rec = reconstruct(path, n)?;
            let err = curve_error(path.points(), rec.path.points())?;
            Ok(RoundtripRow {
                depth: n,
                mean: err.mean,
                max: err.max,
            })
        })
        .collect()
}

/// Depth-`n` inversion of the path's signature anchored at its first point.
///
/// Used both for round trips and as a trend estimate: smaller depths give
/// coarser, smoother output with `n + 1` vertices.
pub fn reconstruct(path: &PiecewiseLinearPath, depth: usize) -> Result<InversionResult> {
    let sig = path_signature(path, depth)?;
    invert_signature(&sig, path.start())
}
