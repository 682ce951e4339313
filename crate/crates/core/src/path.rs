//! Piecewise linear paths and their segment geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles closer than this to 0 or π raise the corresponding flag.
pub const ANGLE_TOL: f64 = 1e-7;

/// Ordered points `X_{t_0}, ..., X_{t_M}` joined by straight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearPath {
    dim: usize,
    points: Vec<Vec<f64>>,
    times: Vec<f64>,
}

impl PiecewiseLinearPath {
    /// Path on the uniform grid `t_i = i/M`.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.len().saturating_sub(1).max(1) as f64;
        let times = (0..points.len()).map(|i| i as f64 / m).collect();
        Self::with_times(points, times)
    }

    /// Path with explicit strictly increasing times. Times are mapped
    /// affinely onto `[0, 1]`; the signature does not depend on them.
    pub fn with_times(points: Vec<Vec<f64>>, times: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidPath("points must have dimension >= 1".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidPath("non-finite coordinate".into()));
            }
        }
        if times.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "{} times for {} points",
                times.len(),
                points.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(
                "times must be strictly increasing".into(),
            ));
        }
        let (t0, t1) = (times[0], times[times.len() - 1]);
        let times = if t0 == 0.0 && t1 == 1.0 {
            times
        } else {
            let span = t1 - t0;
            let mut scaled: Vec<f64> = times.iter().map(|t| (t - t0) / span).collect();
            let last = scaled.len() - 1;
            scaled[0] = 0.0;
            scaled[last] = 1.0;
            scaled
        };
        Ok(PiecewiseLinearPath { dim, points, times })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        &self.points[self.points.len() - 1]
    }

    /// Segment increments `X_{t_i} - X_{t_{i-1}}`.
    pub fn increments(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.points.windows(2).map(|w| sub(&w[1], &w[0]))
    }

    pub fn total_variation(&self) -> f64 {
        self.increments().map(|v| norm(&v)).sum()
    }

    /// Position at time `t` (clamped to `[0, 1]`).
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let t = t.clamp(0.0, 1.0);
        let i = match self.times.partition_point(|&s| s <= t) {
            0 => 1,
            i if i >= self.times.len() => self.times.len() - 1,
            i => i,
        };
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.points[i - 1]
            .iter()
            .zip(&self.points[i])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: offset.len(),
            });
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(offset).map(|(a, b)| a + b).collect())
            .collect();
        Ok(PiecewiseLinearPath {
            dim: self.dim,
            points,
            times: self.times.clone(),
        })
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|x| alpha * x).collect())
            .collect();
        PiecewiseLinearPath {
            dim: self.dim,
            points,
            times: self.times.clone(),
        }
    }

    /// Drop points equal to their predecessor. Returns `None` when fewer
    /// than two distinct points remain.
    pub fn merged(&self) -> Option<Self> {
        let mut points = vec![self.points[0].clone()];
        let mut times = vec![self.times[0]];
        for (p, &t) in self.points.iter().zip(&self.times).skip(1) {
            if p != points.last().unwrap() {
                points.push(p.clone());
                times.push(t);
            }
        }
        if points.len() < 2 {
            return None;
        }
        // Keep the time span intact when the final point was a repeat.
        *times.last_mut().unwrap() = 1.0;
        Some(PiecewiseLinearPath {
            dim: self.dim,
            points,
            times,
        })
    }

    /// Restriction to `[u, v]`, re-timed onto `[0, 1]`.
    pub fn restrict(&self, u: f64, v: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&u) || v <= u || v > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "invalid restriction interval [{u}, {v}]"
            )));
        }
        let mut points = vec![self.point_at(u)];
        let mut times = vec![u];
        for (p, &t) in self.points.iter().zip(&self.times) {
            if t > u && t < v {
                points.push(p.clone());
                times.push(t);
            }
        }
        points.push(self.point_at(v));
        times.push(v);
        Self::with_times(points, times)
    }
}

/// Slopes, lengths and turning angles of a path's non-degenerate segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentGeometry {
    /// `β_i = (X_{t_i} - X_{t_{i-1}}) / (t_i - t_{i-1})`.
    pub slopes: Vec<Vec<f64>>,
    /// `‖β_i‖ (t_i - t_{i-1})`.
    pub lengths: Vec<f64>,
    /// Breakpoints of the merged path.
    pub times: Vec<f64>,
    pub total_variation: f64,
    /// `ω_i` between segments `i` and `i+1`, in `[0, π]`.
    pub angles: Vec<f64>,
    /// `min_i ω_i`, absent for a single segment.
    pub min_angle: Option<f64>,
    /// Some `ω_i` is 0: the partition is not minimal.
    pub non_minimal: bool,
    /// Some `ω_i` is π: a segment retraces its predecessor.
    pub tree_like: bool,
}

impl SegmentGeometry {
    pub fn num_segments(&self) -> usize {
        self.slopes.len()
    }

    pub fn shortest_segment(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Smallest interior angle `π - ω_i` at a vertex, absent for a single
    /// segment. A sharp turn has a small vertex angle.
    pub fn min_vertex_angle(&self) -> Option<f64> {
        self.angles
            .iter()
            .copied()
            .reduce(f64::max)
            .map(|w| std::f64::consts::PI - w)
    }

    /// Assumption (A1): every turning angle lies strictly inside (0, π).
    pub fn satisfies_a1(&self) -> bool {
        !self.non_minimal && !self.tree_like
    }
}

pub fn segment_geometry(path: &PiecewiseLinearPath) -> Result<SegmentGeometry> {
    let merged = path.merged().ok_or(Error::ZeroLength)?;
    let times = merged.times().to_vec();
    let increments: Vec<Vec<f64>> = merged.increments().collect();
    let slopes: Vec<Vec<f64>> = increments
        .iter()
        .zip(times.windows(2))
        .map(|(dx, w)| dx.iter().map(|x| x / (w[1] - w[0])).collect())
        .collect();
    let lengths: Vec<f64> = increments.iter().map(|v| norm(v)).collect();
    let angles: Vec<f64> = slopes
        .windows(2)
        .map(|w| angle_between(&w[0], &w[1]))
        .collect();
    let min_angle = angles.iter().copied().reduce(f64::min);
    let non_minimal = angles.iter().any(|&w| w < ANGLE_TOL);
    let tree_like = angles.iter().any(|&w| w > std::f64::consts::PI - ANGLE_TOL);
    Ok(SegmentGeometry {
        total_variation: lengths.iter().sum(),
        slopes,
        lengths,
        times,
        angles,
        min_angle,
        non_minimal,
        tree_like,
    })
}

/// Re-time the path so that every slope has norm equal to its length ℓ.
pub fn constant_speed_reparam(path: &PiecewiseLinearPath) -> Result<PiecewiseLinearPath> {
    let merged = path.merged().ok_or(Error::ZeroLength)?;
    let lengths: Vec<f64> = merged.increments().map(|v| norm(&v)).collect();
    let total: f64 = lengths.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroLength);
    }
    let mut times = Vec::with_capacity(lengths.len() + 1);
    let mut acc = 0.0;
    times.push(0.0);
    for len in &lengths {
        acc += len;
        times.push(acc / total);
    }
    *times.last_mut().unwrap() = 1.0;
    PiecewiseLinearPath::with_times(merged.points, times)
}

/// Angle in `[0, π]` between two non-zero vectors.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b) / (norm(a) * norm(b));
    c.clamp(-1.0, 1.0).acos()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
