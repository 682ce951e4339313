//! Hyperbolic development of piecewise linear paths.
//!
//! `F(y)` is the `(d+1)×(d+1)` matrix with `y` in the last column and last
//! row and zeros elsewhere. The controlled equation `dΓ = F(dX) Γ`, `Γ_0 = I`,
//! has the exact solution on a linear piece with increment `v`
//!
//! ```text
//! exp(F(v)) = I + sinh(r)/r F(v) + (cosh(r) - 1)/r² F(v)²,   r = ‖v‖
//! ```
//!
//! because `F(v)³ = r² F(v)`. Every `Γ_t` preserves the Lorentz form
//! `B(x, y) = Σ_{i≤d} x_i y_i - x_{d+1} y_{d+1}`, so `Γ_t y_0` stays on the
//! hyperboloid `B(y, y) = -1` with `y_0 = (0, ..., 0, 1)`.
//!
//! The pieces map to geodesics when isometries are composed in path order,
//! `Y_i = T(v_1) ⋯ T(v_i) y_0`. Each `T(v)` is symmetric, so this is
//! `Γ_{t_i}ᵀ y_0`; operator norm and `d(y_0, Γ_1 y_0)` agree for `Γ_1` and
//! `Γ_1ᵀ`, which is all the lower bound needs.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{segment_geometry, PiecewiseLinearPath};
use crate::tensor::TruncatedSignature;

/// Slack allowed on `lhs <= rhs` for rounding.
pub const BOUND_REL_TOL: f64 = 1e-9;

/// Tolerance on `|ℓ - 1|` for a path treated as unit length.
pub const UNIT_LENGTH_TOL: f64 = 1e-9;

/// `F(y)`.
pub fn f_map(y: &[f64]) -> DMatrix<f64> {
    let d = y.len();
    let mut m = DMatrix::zeros(d + 1, d + 1);
    for (i, &yi) in y.iter().enumerate() {
        m[(i, d)] = yi;
        m[(d, i)] = yi;
    }
    m
}

/// Lorentz form `B`.
pub fn lorentz_form(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let d = x.len() - 1;
    x.rows(0, d).dot(&y.rows(0, d)) - x[d] * y[d]
}

/// Hyperbolic distance `arcosh(-B(x, y))`, argument clamped to `>= 1`.
pub fn hyperbolic_distance(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (-lorentz_form(x, y)).max(1.0).acosh()
}

/// Base point `y_0 = (0, ..., 0, 1)` of the hyperboloid in `R^{d+1}`.
pub fn base_point(dim: usize) -> DVector<f64> {
    let mut y = DVector::zeros(dim + 1);
    y[dim] = 1.0;
    y
}

/// An element `Γ` of the group preserving `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct DevelopmentMatrix {
    dim: usize,
    matrix: DMatrix<f64>,
}

impl DevelopmentMatrix {
    pub fn identity(dim: usize) -> Self {
        DevelopmentMatrix {
            dim,
            matrix: DMatrix::identity(dim + 1, dim + 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `self * other`.
    pub fn compose(&self, other: &DevelopmentMatrix) -> DevelopmentMatrix {
        DevelopmentMatrix {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn transpose(&self) -> DevelopmentMatrix {
        DevelopmentMatrix {
            dim: self.dim,
            matrix: self.matrix.transpose(),
        }
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.matrix.singular_values().max()
    }

    /// `Γ y_0`.
    pub fn developed_point(&self) -> DVector<f64> {
        self.matrix.column(self.dim).into_owned()
    }

    /// `d(y_0, Γ y_0) = arcosh(Γ_{d+1,d+1})`.
    pub fn distance_from_base(&self) -> f64 {
        self.matrix[(self.dim, self.dim)].max(1.0).acosh()
    }

    /// `max_{i,j} |B(Γe_i, Γe_j) - B(e_i, e_j)|`.
    pub fn b_defect(&self) -> f64 {
        let d = self.dim;
        let mut j = DMatrix::identity(d + 1, d + 1);
        j[(d, d)] = -1.0;
        let gram = self.matrix.transpose() * &j * &self.matrix;
        (gram - j).abs().max()
    }
}

/// `exp(F(v))`: transport along one linear piece with increment `v`.
pub fn segment_transport(v: &[f64]) -> DevelopmentMatrix {
    let d = v.len();
    let r2: f64 = v.iter().map(|x| x * x).sum();
    let r = r2.sqrt();
    // sinh(r)/r and (cosh(r)-1)/r² by series near zero.
    let (a, b) = if r < 1e-4 {
        (1.0 + r2 / 6.0, 0.5 + r2 / 24.0)
    } else {
        (r.sinh() / r, (r.cosh() - 1.0) / r2)
    };
    let mut m = DMatrix::identity(d + 1, d + 1);
    for i in 0..d {
        m[(i, d)] += a * v[i];
        m[(d, i)] += a * v[i];
        for k in 0..d {
            m[(i, k)] += b * v[i] * v[k];
        }
    }
    m[(d, d)] += b * r2;
    DevelopmentMatrix { dim: d, matrix: m }
}

/// `Γ_{t_i}` after each piece, `i = 1..=M` (left-multiplied running product).
pub fn develop_running(path: &PiecewiseLinearPath) -> Vec<DevelopmentMatrix> {
    let mut gamma = DevelopmentMatrix::identity(path.dim());
    path.increments()
        .map(|v| {
            gamma = segment_transport(&v).compose(&gamma);
            gamma.clone()
        })
        .collect()
}

/// `Γ_1 = T(ΔX_M) ⋯ T(ΔX_1)`.
pub fn develop(path: &PiecewiseLinearPath) -> DevelopmentMatrix {
    develop_running(path)
        .pop()
        .unwrap_or_else(|| DevelopmentMatrix::identity(path.dim()))
}

/// Vertices `y_0, Y_1, ..., Y_M` of the geodesic polygon traced by the path.
pub fn developed_vertices(path: &PiecewiseLinearPath) -> Vec<DVector<f64>> {
    let y0 = base_point(path.dim());
    let mut frame = DevelopmentMatrix::identity(path.dim());
    let mut out = vec![y0.clone()];
    for v in path.increments() {
        frame = frame.compose(&segment_transport(&v));
        out.push(&frame.matrix * &y0);
    }
    out
}

/// Tangent at `from` of the geodesic towards `to`.
fn tangent_towards(from: &DVector<f64>, to: &DVector<f64>) -> DVector<f64> {
    to + from * lorentz_form(from, to)
}

/// Turning angle of the developed polygon at each interior vertex.
///
/// Degenerate pieces should be merged first.
pub fn geodesic_turning_angles(path: &PiecewiseLinearPath) -> Vec<f64> {
    let ys = developed_vertices(path);
    ys.windows(3)
        .map(|w| {
            let incoming = -tangent_towards(&w[1], &w[0]);
            let outgoing = tangent_towards(&w[1], &w[2]);
            let c = lorentz_form(&incoming, &outgoing)
                / (lorentz_form(&incoming, &incoming) * lorentz_form(&outgoing, &outgoing)).sqrt();
            c.clamp(-1.0, 1.0).acos()
        })
        .collect()
}

/// `K(ω) = log(2 / (1 - cos(ω/2)))`.
pub fn k_omega(omega: f64) -> f64 {
    (2.0 / (1.0 - (omega / 2.0).cos())).ln()
}

/// `n_1 = ⌊4 e^{2(M-1)K(ω)}⌋`, saturating at `u64::MAX`.
pub fn n1(segments: usize, k: f64) -> u64 {
    let v = (4.0 * (2.0 * (segments.saturating_sub(1)) as f64 * k).exp()).floor();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Outcome of the operator-norm lower bound check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Smallest interior vertex angle; `None` for a single piece.
    pub omega: Option<f64>,
    /// `K(ω)`, zero when there is no kink.
    pub k_omega: f64,
    pub n1: u64,
    pub alpha: f64,
    /// `K(ω)/D`; `alpha` must exceed it.
    pub min_alpha: f64,
    /// `e^{α - (M-1)K(ω)}`.
    pub lhs: f64,
    /// `‖Γ_1^α‖`.
    pub rhs: f64,
    /// `d(y_0, Γ_1^α y_0)`.
    pub geodesic_distance: f64,
    /// `lhs <= e^{d(y_0, Γ y_0)} <= rhs`, up to [`BOUND_REL_TOL`].
    pub satisfied: bool,
    pub segments: usize,
    pub shortest_segment: f64,
}

/// Check `‖Γ_1^α‖ >= e^{d(y_0, Γ_1^α y_0)} >= e^{α - (M-1)K(ω)}` for the
/// development of `α X`, where `X` has unit length.
///
/// `ω` is the smallest interior angle between consecutive geodesic pieces,
/// `π - max_i ω_i` in terms of the slope angles: `K` has to grow as a
/// turn approaches a backtrack, where most of the length is lost.
pub fn norm_lower_bound_check(path: &PiecewiseLinearPath, alpha: f64) -> Result<BoundReport> {
    let geom = segment_geometry(path)?;
    if (geom.total_variation - 1.0).abs() > UNIT_LENGTH_TOL {
        return Err(Error::NotNormalized(geom.total_variation));
    }
    if geom.tree_like {
        return Err(Error::AssumptionViolated(
            "a segment retraces its predecessor (angle π)".into(),
        ));
    }
    if geom.non_minimal {
        return Err(Error::AssumptionViolated(
            "consecutive segments are collinear (angle 0)".into(),
        ));
    }
    let segments = geom.num_segments();
    let shortest = geom.shortest_segment();
    let omega = geom.min_vertex_angle();
    let k = omega.map(k_omega).unwrap_or(0.0);
    let min_alpha = k / shortest;
    if !(alpha > min_alpha) || !(alpha > 0.0) {
        return Err(Error::AlphaTooSmall {
            alpha,
            min: min_alpha,
        });
    }
    let merged = path.merged().ok_or(Error::ZeroLength)?;
    let gamma = develop(&merged.scaled(alpha));
    let rhs = gamma.operator_norm();
    let geodesic_distance = gamma.distance_from_base();
    let lhs = (alpha - (segments - 1) as f64 * k).exp();
    let slack = 1.0 + BOUND_REL_TOL;
    let satisfied =
        lhs <= geodesic_distance.exp() * slack && geodesic_distance.exp() <= rhs * slack;
    Ok(BoundReport {
        omega,
        k_omega: k,
        n1: n1(segments, k),
        alpha,
        min_alpha,
        lhs,
        rhs,
        geodesic_distance,
        satisfied,
        segments,
        shortest_segment: shortest,
    })
}

/// Scale a path to unit total variation (degenerate pieces merged).
pub fn normalize_unit_length(path: &PiecewiseLinearPath) -> Result<PiecewiseLinearPath> {
    let merged = path.merged().ok_or(Error::ZeroLength)?;
    let len = merged.total_variation();
    Ok(merged.scaled(1.0 / len))
}

/// `1 + Σ_{k=1..depth} α^k ‖X^k‖` with the Euclidean norm.
///
/// Diagnostic only: since `‖·‖_2 <= ‖·‖_π`, this under-estimates the
/// projective-norm majorant of `‖Γ_1^α‖`, so it is not itself an upper bound.
pub fn chen_lower_bound_chain(sig: &TruncatedSignature, alpha: f64) -> f64 {
    let mut factor = 1.0;
    let mut total = 1.0;
    for level in &sig.levels()[1..] {
        factor *= alpha;
        total += factor * level.norm();
    }
    total
}
