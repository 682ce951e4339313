//! Truncated tensor algebra over `R^d`.
//!
//! A homogeneous tensor of degree `k` is stored as a flat row-major array of
//! `d^k` coefficients: the multi-index `(i_1, ..., i_k)` (0-based here) lives
//! at offset `sum_j i_j * d^(k-j)`. A [`TruncatedSignature`] is the graded
//! sequence of levels `0..=depth` sharing one dimension.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on `d^(depth+1)`.
pub const DEFAULT_MAX_COEFFS: usize = 100_000_000;

static MAX_COEFFS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_COEFFS);

/// Override the process-wide allocation cap.
pub fn set_max_coeffs(limit: usize) {
    MAX_COEFFS.store(limit.max(1), Ordering::Relaxed);
}

pub fn max_coeffs() -> usize {
    MAX_COEFFS.load(Ordering::Relaxed)
}

/// `d^k` as u128, saturating.
fn pow_u128(d: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(d as u128);
    }
    acc
}

/// Refuse work whose next level `d^(depth+1)` would exceed the cap.
pub fn check_capacity(dim: usize, depth: usize) -> Result<()> {
    let requested = pow_u128(dim, depth + 1);
    let limit = max_coeffs();
    if requested > limit as u128 {
        return Err(Error::AllocationCap { requested, limit });
    }
    Ok(())
}

/// Multi-index `(i_1, ..., i_k)` with 0-based entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    /// Build from the 1-based convention `i_j in 1..=d`.
    pub fn from_one_based(entries: &[usize]) -> Self {
        MultiIndex(entries.iter().map(|&i| i - 1).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn offset(&self, dim: usize) -> usize {
        self.0.iter().fold(0, |acc, &i| {
            debug_assert!(i < dim);
            acc * dim + i
        })
    }

    pub fn from_offset(mut offset: usize, dim: usize, degree: usize) -> Self {
        let mut entries = vec![0; degree];
        for slot in entries.iter_mut().rev() {
            *slot = offset % dim;
            offset /= dim;
        }
        MultiIndex(entries)
    }
}

/// One homogeneous tensor in `(R^d)^{⊗k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorLevel {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl TensorLevel {
    pub fn new(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let expected = pow_u128(dim, degree);
        if expected != coeffs.len() as u128 {
            return Err(Error::CoefficientCount {
                dim,
                degree,
                expected: expected.min(usize::MAX as u128) as usize,
                found: coeffs.len(),
            });
        }
        Ok(TensorLevel {
            dim,
            degree,
            coeffs,
        })
    }

    pub fn zeros(dim: usize, degree: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        TensorLevel {
            dim,
            degree,
            coeffs: vec![0.0; dim.pow(degree as u32)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        assert!(dim > 0, "dimension must be positive");
        TensorLevel {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    /// Degree-1 tensor holding a vector.
    pub fn vector(v: &[f64]) -> Self {
        assert!(!v.is_empty(), "dimension must be positive");
        TensorLevel {
            dim: v.len(),
            degree: 1,
            coeffs: v.to_vec(),
        }
    }

    pub(crate) fn from_raw(dim: usize, degree: usize, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), dim.pow(degree as u32));
        TensorLevel {
            dim,
            degree,
            coeffs,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, index: &MultiIndex) -> f64 {
        assert_eq!(index.degree(), self.degree, "multi-index degree");
        self.coeffs[index.offset(self.dim)]
    }

    /// Outer product `a ⊗ b` in flat layout.
    pub fn tensor(&self, other: &TensorLevel) -> Result<TensorLevel> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = Vec::with_capacity(self.len() * other.len());
        for &a in &self.coeffs {
            out.extend(other.coeffs.iter().map(|&b| a * b));
        }
        Ok(TensorLevel::from_raw(
            self.dim,
            self.degree + other.degree,
            out,
        ))
    }

    /// Accumulate `self ⊗ other` into `out` (unchecked shapes).
    pub(crate) fn tensor_into(&self, other: &TensorLevel, out: &mut [f64]) {
        let m = other.len();
        debug_assert_eq!(out.len(), self.len() * m);
        for (chunk, &a) in out.chunks_exact_mut(m).zip(&self.coeffs) {
            if a == 0.0 {
                continue;
            }
            for (o, &b) in chunk.iter_mut().zip(&other.coeffs) {
                *o += a * b;
            }
        }
    }

    /// Euclidean (Hilbert-Schmidt) tensor norm.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn dot(&self, other: &TensorLevel) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn scaled(&self, factor: f64) -> TensorLevel {
        TensorLevel::from_raw(
            self.dim,
            self.degree,
            self.coeffs.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn add(&self, other: &TensorLevel) -> Result<TensorLevel> {
        self.check_same_shape(other)?;
        Ok(TensorLevel::from_raw(
            self.dim,
            self.degree,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &TensorLevel) -> Result<TensorLevel> {
        self.add(&other.scaled(-1.0))
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &TensorLevel) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Permute tensor factors: `σ(a) = Σ_I a_I e_{i_σ(1)} ⊗ … ⊗ e_{i_σ(k)}`.
    ///
    /// `sigma` uses 1-based values, `sigma[m-1] = σ(m)`. The coefficient
    /// `a_I` moves to the multi-index `J` with `J_m = I_{σ(m)}`.
    pub fn permute(&self, sigma: &[usize]) -> Result<TensorLevel> {
        let k = self.degree;
        let invalid = || Error::InvalidPermutation {
            degree: k,
            sigma: sigma.to_vec(),
        };
        if sigma.len() != k {
            return Err(invalid());
        }
        let mut seen = vec![false; k];
        for &s in sigma {
            if s == 0 || s > k || seen[s - 1] {
                return Err(invalid());
            }
            seen[s - 1] = true;
        }
        let d = self.dim;
        let strides: Vec<usize> = (0..k).map(|j| d.pow((k - 1 - j) as u32)).collect();
        let mut out = vec![0.0; self.len()];
        for (offset, &c) in self.coeffs.iter().enumerate() {
            let source = MultiIndex::from_offset(offset, d, k);
            let target: usize = sigma
                .iter()
                .zip(&strides)
                .map(|(&s, &stride)| source.0[s - 1] * stride)
                .sum();
            out[target] = c;
        }
        Ok(TensorLevel::from_raw(d, k, out))
    }

    fn check_same_shape(&self, other: &TensorLevel) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }
}

/// Graded element `(a_0, a_1, ..., a_n)` of the truncated tensor algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSignature {
    dim: usize,
    depth: usize,
    levels: Vec<TensorLevel>,
}

impl TruncatedSignature {
    pub fn new(levels: Vec<TensorLevel>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::InvalidArgument("a signature needs at least level 0".into()))?;
        let dim = first.dim();
        for (k, level) in levels.iter().enumerate() {
            if level.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: level.dim(),
                });
            }
            if level.degree() != k {
                return Err(Error::DegreeMismatch {
                    expected: k,
                    found: level.degree(),
                });
            }
        }
        Ok(TruncatedSignature {
            dim,
            depth: levels.len() - 1,
            levels,
        })
    }

    /// Build from raw per-level coefficient arrays.
    pub fn from_level_coeffs(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(k, c)| TensorLevel::new(dim, k, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels)
    }

    /// The unit `(1, 0, ..., 0)`: signature of a constant path.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut levels = Vec::with_capacity(depth + 1);
        levels.push(TensorLevel::scalar(dim, 1.0));
        levels.extend((1..=depth).map(|k| TensorLevel::zeros(dim, k)));
        TruncatedSignature { dim, depth, levels }
    }

    pub(crate) fn from_levels_unchecked(dim: usize, levels: Vec<TensorLevel>) -> Self {
        TruncatedSignature {
            dim,
            depth: levels.len() - 1,
            levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, k: usize) -> &TensorLevel {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[TensorLevel] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<TensorLevel> {
        self.levels
    }

    /// Keep levels `0..=depth`.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        if depth > self.depth {
            return Err(Error::DepthMismatch {
                expected: depth,
                found: self.depth,
            });
        }
        Ok(Self::from_levels_unchecked(
            self.dim,
            self.levels[..=depth].to_vec(),
        ))
    }

    /// Multiply level `k` by `alpha^k`: the signature of the path scaled by `alpha`.
    pub fn graded_scale(&self, alpha: f64) -> Self {
        let mut factor = 1.0;
        let levels = self
            .levels
            .iter()
            .map(|level| {
                let scaled = level.scaled(factor);
                factor *= alpha;
                scaled
            })
            .collect();
        Self::from_levels_unchecked(self.dim, levels)
    }

    /// All levels concatenated, of length `(d^{n+1}-1)/(d-1)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| l.coeffs().iter().copied())
            .collect()
    }

    pub fn from_flat(dim: usize, depth: usize, flat: &[f64]) -> Result<Self> {
        let mut levels = Vec::with_capacity(depth + 1);
        let mut start = 0;
        for k in 0..=depth {
            let len = dim.pow(k as u32);
            let end = start + len;
            if end > flat.len() {
                return Err(Error::InvalidArgument(format!(
                    "flat signature too short for dim {dim}, depth {depth}"
                )));
            }
            levels.push(TensorLevel::from_raw(dim, k, flat[start..end].to_vec()));
            start = end;
        }
        if start != flat.len() {
            return Err(Error::InvalidArgument(format!(
                "flat signature too long for dim {dim}, depth {depth}"
            )));
        }
        Ok(Self::from_levels_unchecked(dim, levels))
    }

    /// Largest coefficient difference over all levels.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                expected: self.depth,
                found: other.depth,
            });
        }
        self.levels
            .iter()
            .zip(&other.levels)
            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(a.max_abs_diff(b)?)))
    }
}

/// Flattened length of a depth-`n` signature over `R^d`.
pub fn flat_len(dim: usize, depth: usize) -> usize {
    (0..=depth).map(|k| dim.pow(k as u32)).sum()
}
