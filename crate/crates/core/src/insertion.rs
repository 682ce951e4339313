//! Signature inversion by insertion.
//!
//! The insertion map `L^n_p(y)` places a vector `y` as the `p`-th tensor
//! factor inside the order-`n` signature, giving an order-`n+1` tensor. In
//! flat layout this is a broadcast: with `outer = d^(p-1)` and
//! `inner = d^(n+1-p)`,
//!
//! ```text
//! L(y)[(o, j, i)] = y[j] * X^n[(o, i)]
//! ```
//!
//! Its matrix `A_p` has exactly one non-zero per row, so `A_pᵀ A_p` is
//! `‖X^n‖² I_d` and the least-squares problem
//! `min_y ‖L^n_p(y) - (n+1) X^{n+1}‖` is solved by
//! `y* = (n+1) A_pᵀ X^{n+1} / ‖X^n‖²`. `A_p` is never materialised.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::signature::path_signature;
use crate::tensor::{TensorLevel, TruncatedSignature};

/// Default threshold under which `‖X^n‖` is treated as zero.
pub const DEFAULT_EPS_NORM: f64 = 1e-12;

fn check_position(degree: usize, p: usize) -> Result<()> {
    if p == 0 || p > degree + 1 {
        return Err(Error::InsertionPosition { p, max: degree + 1 });
    }
    Ok(())
}

/// `(outer, inner)` block sizes around insertion axis `p` for a degree-`n` tensor.
fn blocks(dim: usize, degree: usize, p: usize) -> (usize, usize) {
    (dim.pow((p - 1) as u32), dim.pow((degree + 1 - p) as u32))
}

/// Insert `y` at position `p` (1-based) of `sig_n`.
pub fn insertion_apply(sig_n: &TensorLevel, y: &[f64], p: usize) -> Result<TensorLevel> {
    let dim = sig_n.dim();
    if y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y.len(),
        });
    }
    let n = sig_n.degree();
    check_position(n, p)?;
    let (outer, inner) = blocks(dim, n, p);
    let src = sig_n.coeffs();
    let mut out = Vec::with_capacity(src.len() * dim);
    for o in 0..outer {
        let block = &src[o * inner..(o + 1) * inner];
        for &yj in y {
            out.extend(block.iter().map(|&s| yj * s));
        }
    }
    Ok(TensorLevel::from_raw(dim, n + 1, out))
}

/// `A_pᵀ z` for the insertion matrix built from `sig_n`.
///
/// Component `j` sums `sig_n[I \ i_p] * z[I]` over all `I` with `i_p = j`.
pub fn adjoint_contract(sig_n: &TensorLevel, z: &TensorLevel, p: usize) -> Result<Vec<f64>> {
    let dim = sig_n.dim();
    if z.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: z.dim(),
        });
    }
    let n = sig_n.degree();
    if z.degree() != n + 1 {
        return Err(Error::DegreeMismatch {
            expected: n + 1,
            found: z.degree(),
        });
    }
    check_position(n, p)?;
    let (outer, inner) = blocks(dim, n, p);
    let s = sig_n.coeffs();
    let zc = z.coeffs();
    let mut out = vec![0.0; dim];
    for o in 0..outer {
        let sb = &s[o * inner..(o + 1) * inner];
        for (j, acc) in out.iter_mut().enumerate() {
            let start = (o * dim + j) * inner;
            let zb = &zc[start..start + inner];
            *acc += sb.iter().zip(zb).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    Ok(out)
}

/// Exact minimiser of `‖L^n_p(y) - (n+1) X^{n+1}‖` in the Euclidean tensor norm.
pub fn solve_slope(
    sig_n: &TensorLevel,
    sig_np1: &TensorLevel,
    p: usize,
    eps_norm: f64,
) -> Result<Vec<f64>> {
    let norm_sq = sig_n.norm_sq();
    let norm = norm_sq.sqrt();
    if !(norm > eps_norm) {
        return Err(Error::NormTooSmall {
            norm,
            threshold: eps_norm,
        });
    }
    let factor = (sig_n.degree() + 1) as f64 / norm_sq;
    Ok(adjoint_contract(sig_n, sig_np1, p)?
        .into_iter()
        .map(|v| v * factor)
        .collect())
}

/// Reconstructed path on the grid `p/n` and the recovered slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionResult {
    pub path: PiecewiseLinearPath,
    /// `y*_{p,n}` for `p = 1..=n`.
    pub slopes: Vec<Vec<f64>>,
    pub start_point: Vec<f64>,
}

/// Tunables for [`invert_signature_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub eps_norm: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            eps_norm: DEFAULT_EPS_NORM,
        }
    }
}

/// `ln λ` for the graded rescaling used by [`invert_signature_with`].
///
/// `ρ = max_k (k! ‖X^k‖)^{1/k}` stands in for the unknown length ℓ (for a
/// line it is ℓ). With `λ = ((n-1)!)^{1/(n-1)} / ρ`, a path of length ρ
/// scaled by λ has `‖X^{n-1}‖` of order one. `None` when every level above 0
/// vanishes.
fn log_rescale(sig: &TruncatedSignature) -> Option<f64> {
    let n = sig.depth();
    let mut ln_fact = 0.0;
    let mut ln_fact_lower = 0.0;
    let mut ln_rho = f64::NEG_INFINITY;
    for k in 1..=n {
        ln_fact += (k as f64).ln();
        if k == n - 1 {
            ln_fact_lower = ln_fact;
        }
        let norm = sig.level(k).norm();
        if norm > 0.0 {
            ln_rho = ln_rho.max((ln_fact + norm.ln()) / k as f64);
        }
    }
    ln_rho
        .is_finite()
        .then(|| ln_fact_lower / (n - 1) as f64 - ln_rho)
}

/// The two top levels of a signature after the graded rescaling.
pub(crate) struct ScaledTop {
    lower: TensorLevel,
    upper: TensorLevel,
    ln_lambda: f64,
    eps_norm: f64,
}

impl ScaledTop {
    pub(crate) fn new(sig: &TruncatedSignature, eps_norm: f64) -> Result<Self> {
        let n = sig.depth();
        if n < 2 {
            return Err(Error::DepthTooSmall { depth: n, min: 2 });
        }
        let ln_lambda = log_rescale(sig).ok_or(Error::NormTooSmall {
            norm: 0.0,
            threshold: eps_norm,
        })?;
        Ok(ScaledTop {
            lower: sig.level(n - 1).scaled(((n - 1) as f64 * ln_lambda).exp()),
            upper: sig.level(n).scaled((n as f64 * ln_lambda).exp()),
            ln_lambda,
            eps_norm,
        })
    }

    /// [`solve_slope`] on the rescaled levels, mapped back to the input scale.
    pub(crate) fn slope(&self, p: usize) -> Result<Vec<f64>> {
        let unscale = (-self.ln_lambda).exp();
        Ok(solve_slope(&self.lower, &self.upper, p, self.eps_norm)?
            .into_iter()
            .map(|v| v * unscale)
            .collect())
    }
}

/// Rebuild an `n`-piece path from a depth-`n` signature.
///
/// Uses the two top levels: for `p = 1..=n`,
/// `y*_p = n A_pᵀ X^n / ‖X^{n-1}‖²` with `A_p` built from `X^{n-1}`, then
/// `X̃_{p/n} = X̃_{(p-1)/n} + y*_p / n`.
///
/// Level `k` is first multiplied by `λ^k` so that `X^{n-1}` has norm of
/// order one, and the slopes are divided by `λ` afterwards. The slopes are
/// unchanged in exact arithmetic, but `‖X^{n-1}‖ ≈ ℓ^{n-1}/(n-1)!` no longer
/// falls under `eps_norm` just because `n` is large, so the norm guard only
/// fires for signatures that are degenerate relative to their own scale.
pub fn invert_signature(sig: &TruncatedSignature, start: &[f64]) -> Result<InversionResult> {
    invert_signature_with(sig, start, InversionOptions::default())
}

pub fn invert_signature_with(
    sig: &TruncatedSignature,
    start: &[f64],
    options: InversionOptions,
) -> Result<InversionResult> {
    let n = sig.depth();
    if n < 2 {
        return Err(Error::DepthTooSmall { depth: n, min: 2 });
    }
    let dim = sig.dim();
    if start.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: start.len(),
        });
    }
    let top = ScaledTop::new(sig, options.eps_norm)?;
    let mut slopes = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n + 1);
    points.push(start.to_vec());
    for p in 1..=n {
        let y = top.slope(p)?;
        let next: Vec<f64> = points[p - 1]
            .iter()
            .zip(&y)
            .map(|(x, v)| x + v / n as f64)
            .collect();
        points.push(next);
        slopes.push(y);
    }
    let times = (0..=n).map(|p| p as f64 / n as f64).collect();
    Ok(InversionResult {
        path: PiecewiseLinearPath::with_times(points, times)?,
        slopes,
        start_point: start.to_vec(),
    })
}

/// Invert many signatures sharing `(d, n)`; results follow input order.
///
/// With the `parallel` feature the records are processed on the rayon pool.
pub fn batch_invert(
    sigs: &[TruncatedSignature],
    starts: &[Vec<f64>],
) -> Result<Vec<Result<InversionResult>>> {
    if sigs.len() != starts.len() {
        return Err(Error::InvalidArgument(format!(
            "{} signatures but {} start points",
            sigs.len(),
            starts.len()
        )));
    }
    if let Some(first) = sigs.first() {
        for s in sigs {
            if s.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: s.dim(),
                });
            }
            if s.depth() != first.depth() {
                return Err(Error::DepthMismatch {
                    expected: first.depth(),
                    found: s.depth(),
                });
            }
        }
    }
    Ok(map_maybe_parallel(sigs, starts, invert_signature))
}

#[cfg(feature = "parallel")]
fn map_maybe_parallel<T, F>(sigs: &[TruncatedSignature], starts: &[Vec<f64>], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&TruncatedSignature, &[f64]) -> T + Sync,
{
    use rayon::prelude::*;
    sigs.par_iter()
        .zip(starts.par_iter())
        .map(|(s, x0)| f(s, x0))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_maybe_parallel<T, F>(sigs: &[TruncatedSignature], starts: &[Vec<f64>], f: F) -> Vec<T>
where
    F: Fn(&TruncatedSignature, &[f64]) -> T,
{
    sigs.iter().zip(starts).map(|(s, x0)| f(s, x0)).collect()
}

/// `L^n_p(y)` over the whole path, evaluated through a split at time `v`:
///
/// ```text
/// Σ_{k<p} X^k_{[0,v]} ⊗ L^{n-k}_{p-k,[v,1]}(y) + Σ_{k>=p} L^k_{p,[0,v]}(y) ⊗ X^{n-k}_{[v,1]}
/// ```
///
/// Exists as an independent check on [`insertion_apply`].
pub fn insertion_chen_split(
    path: &PiecewiseLinearPath,
    n: usize,
    p: usize,
    y: &[f64],
    v: f64,
) -> Result<TensorLevel> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::SplitOutOfRange(v));
    }
    check_position(n, p)?;
    let dim = path.dim();
    if y.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y.len(),
        });
    }
    let left = path_signature(&path.restrict(0.0, v)?, n)?;
    let right = path_signature(&path.restrict(v, 1.0)?, n)?;
    let mut out = TensorLevel::zeros(dim, n + 1);
    for k in 0..p {
        let inserted = insertion_apply(right.level(n - k), y, p - k)?;
        out = out.add(&left.level(k).tensor(&inserted)?)?;
    }
    for k in p..=n {
        let inserted = insertion_apply(left.level(k), y, p)?;
        out = out.add(&inserted.tensor(right.level(n - k))?)?;
    }
    Ok(out)
}
