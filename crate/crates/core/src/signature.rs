//! Truncated signatures of piecewise linear paths.
//!
//! A linear piece with increment `v` has signature `exp(v) = (1, v, v⊗v/2!, ...)`.
//! Pieces are glued with Chen's identity
//! `(a·b)_n = Σ_{k=0..n} a_k ⊗ b_{n-k}`.
//! [`path_signature`] applies each segment in place with a Horner scheme so
//! the cost per segment is `O(d^n)` rather than `O(n d^n)`.

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::tensor::{check_capacity, flat_len, TensorLevel, TruncatedSignature};

/// Riemann oracle work ceiling: `steps * flat_len(d, n)`.
pub const ORACLE_MAX_WORK: usize = 2_000_000_000;

/// Signature of the straight line `t -> β t` over a time span `dt`.
pub fn linear_signature(beta: &[f64], dt: f64, depth: usize) -> Result<TruncatedSignature> {
    if beta.is_empty() {
        return Err(Error::InvalidArgument(
            "slope must have dimension >= 1".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time span must be positive, got {dt}"
        )));
    }
    check_capacity(beta.len(), depth)?;
    let increment: Vec<f64> = beta.iter().map(|b| b * dt).collect();
    Ok(exp_increment(&increment, depth))
}

/// `(1, v, v^{⊗2}/2!, ..., v^{⊗n}/n!)`.
fn exp_increment(v: &[f64], depth: usize) -> TruncatedSignature {
    let dim = v.len();
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(TensorLevel::scalar(dim, 1.0));
    for k in 1..=depth {
        let prev: &TensorLevel = &levels[k - 1];
        let inv_k = 1.0 / k as f64;
        let mut coeffs = Vec::with_capacity(prev.len() * dim);
        for &a in prev.coeffs() {
            coeffs.extend(v.iter().map(|&b| a * b * inv_k));
        }
        levels.push(TensorLevel::from_raw(dim, k, coeffs));
    }
    TruncatedSignature::from_levels_unchecked(dim, levels)
}

/// Chen product of the signatures of two consecutive pieces.
pub fn chen_concat(a: &TruncatedSignature, b: &TruncatedSignature) -> Result<TruncatedSignature> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.depth() != b.depth() {
        return Err(Error::DepthMismatch {
            expected: a.depth(),
            found: b.depth(),
        });
    }
    let dim = a.dim();
    let levels = (0..=a.depth())
        .map(|n| {
            let mut out = vec![0.0; dim.pow(n as u32)];
            for k in 0..=n {
                a.level(k).tensor_into(b.level(n - k), &mut out);
            }
            TensorLevel::from_raw(dim, n, out)
        })
        .collect();
    Ok(TruncatedSignature::from_levels_unchecked(dim, levels))
}

/// Right-multiply `levels` by `exp(v)` in place.
///
/// Levels are updated from the top down so lower levels still hold their
/// old values when used:
/// `S'_m = ((S_0 ⊗ v/m + S_1) ⊗ v/(m-1) + ... + S_{m-1}) ⊗ v + S_m`.
fn mul_exp_in_place(
    levels: &mut [TensorLevel],
    v: &[f64],
    scratch: &mut Vec<f64>,
    next: &mut Vec<f64>,
) {
    let depth = levels.len() - 1;
    let dim = v.len();
    for m in (1..=depth).rev() {
        scratch.clear();
        scratch.extend_from_slice(levels[0].coeffs());
        for (k, level) in levels.iter().enumerate().take(m + 1).skip(1) {
            let factor = 1.0 / (m - k + 1) as f64;
            next.clear();
            next.reserve(scratch.len() * dim);
            for &a in scratch.iter() {
                let a = a * factor;
                next.extend(v.iter().map(|&b| a * b));
            }
            for (acc, &s) in next.iter_mut().zip(level.coeffs()) {
                *acc += s;
            }
            std::mem::swap(scratch, next);
        }
        levels[m].coeffs_mut().copy_from_slice(scratch);
    }
}

/// Truncated signature of a piecewise linear path.
///
/// Degenerate (zero) segments are skipped; a path with no displacement has
/// the identity signature.
pub fn path_signature(path: &PiecewiseLinearPath, depth: usize) -> Result<TruncatedSignature> {
    let dim = path.dim();
    check_capacity(dim, depth)?;
    let mut levels = TruncatedSignature::identity(dim, depth).into_levels();
    let mut scratch = Vec::new();
    let mut next = Vec::new();
    for v in path.increments() {
        if v.iter().all(|&x| x == 0.0) {
            continue;
        }
        mul_exp_in_place(&mut levels, &v, &mut scratch, &mut next);
    }
    Ok(TruncatedSignature::from_levels_unchecked(dim, levels))
}

/// Brute-force signature by discrete iterated sums on a uniform time grid.
///
/// The path is sampled at `t_j = j/steps` and the simplex integral is
/// replaced by the strictly ordered sum
/// `Σ_{j_1 < ... < j_k} ΔX_{j_1} ⊗ ... ⊗ ΔX_{j_k}`, a left Riemann sum whose
/// error is `O(1/steps)`. Test oracle only.
pub fn riemann_oracle(
    path: &PiecewiseLinearPath,
    depth: usize,
    steps: usize,
) -> Result<TruncatedSignature> {
    if steps < 10 {
        return Err(Error::OracleBudget(format!(
            "steps must be >= 10, got {steps}"
        )));
    }
    let dim = path.dim();
    check_capacity(dim, depth)?;
    let work = steps.saturating_mul(flat_len(dim, depth));
    if work > ORACLE_MAX_WORK {
        return Err(Error::OracleBudget(format!(
            "{work} operations exceed the budget of {ORACLE_MAX_WORK}"
        )));
    }
    let mut levels = TruncatedSignature::identity(dim, depth).into_levels();
    let mut prev = path.point_at(0.0);
    for j in 1..=steps {
        let cur = path.point_at(j as f64 / steps as f64);
        let dx = TensorLevel::vector(&crate::path::sub(&cur, &prev));
        for m in (1..=depth).rev() {
            let (lower, upper) = levels.split_at_mut(m);
            lower[m - 1].tensor_into(&dx, upper[0].coeffs_mut());
        }
        prev = cur;
    }
    Ok(TruncatedSignature::from_levels_unchecked(dim, levels))
}
