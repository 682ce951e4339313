//! Numeric envelopes for slope recovery and their comparison with measured errors.

use serde::{Deserialize, Serialize};

use crate::development::{k_omega, n1};
use crate::error::{Error, Result};
use crate::insertion::{insertion_apply, ScaledTop, DEFAULT_EPS_NORM};
use crate::path::{constant_speed_reparam, norm, segment_geometry, sub, PiecewiseLinearPath};
use crate::signature::path_signature;

/// Inputs of the slope-recovery bound for segment `segment` of an `M`-piece path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremBoundInput {
    /// Breakpoints `0 = t_0 < ... < t_M = 1`.
    pub times: Vec<f64>,
    /// 1-based segment index `i`.
    pub segment: usize,
    /// Path length ℓ.
    pub ell: f64,
    /// Smallest interior vertex angle ω; ignored when `M = 1`.
    pub omega: f64,
    pub depth: usize,
    /// Probe depth `k_n`; defaults to `depth`.
    pub k_n: Option<usize>,
}

impl TheoremBoundInput {
    pub fn segments(&self) -> usize {
        self.times.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremBound {
    pub value: f64,
    /// `⌊(3 t_i + t_{i-1})(n+1)/4⌋`.
    pub p: usize,
    pub n1: u64,
    /// Whether `n > max(n_1, 2/Δ)`; reported, never enforced.
    pub precondition_met: bool,
}

/// `⌊(3 t_i + t_{i-1})(n+1)/4⌋`.
pub fn theorem_p(t_prev: f64, t_i: f64, n: usize) -> usize {
    ((3.0 * t_i + t_prev) * (n + 1) as f64 / 4.0).floor() as usize
}

/// `4ℓ e^{(M-1)K(ω)} (√((1-Δ)/Δ)/√(k+1) + 4 e^{-kΔ²/16})` with `Δ = t_i - t_{i-1}`.
pub fn theorem_bound(inp: &TheoremBoundInput) -> Result<TheoremBound> {
    let m = inp.segments();
    if m == 0 || inp.segment == 0 || inp.segment > m {
        return Err(Error::InvalidArgument(format!(
            "segment {} outside 1..={m}",
            inp.segment
        )));
    }
    let (t_prev, t_i) = (inp.times[inp.segment - 1], inp.times[inp.segment]);
    let delta = t_i - t_prev;
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "segment duration must be positive, got {delta}"
        )));
    }
    let k = if m > 1 {
        if !(inp.omega > 0.0 && inp.omega < std::f64::consts::PI) {
            return Err(Error::AssumptionViolated(format!(
                "omega = {} not in (0, π)",
                inp.omega
            )));
        }
        k_omega(inp.omega)
    } else {
        0.0
    };
    let kn = inp.k_n.unwrap_or(inp.depth) as f64;
    let bracket = ((1.0 - delta) / delta).sqrt() / (kn + 1.0).sqrt()
        + 4.0 * (-kn * delta * delta / 16.0).exp();
    let value = 4.0 * inp.ell * ((m - 1) as f64 * k).exp() * bracket;
    let n1 = n1(m, k);
    let n = inp.depth as f64;
    Ok(TheoremBound {
        value,
        p: theorem_p(t_prev, t_i, inp.depth),
        n1,
        precondition_met: n > n1 as f64 && n > 2.0 / delta,
    })
}

/// `ℓ^{n+1}/n! (√((1-Δ)/Δ)/√(n+1) + 4 e^{-nΔ²/16})`.
pub fn residual_bound(ell: f64, delta: f64, n: usize) -> f64 {
    let mut scale = ell;
    for k in 1..=n {
        scale *= ell / k as f64;
    }
    let nf = n as f64;
    let bracket = ((1.0 - delta) / delta).sqrt() / (nf + 1.0).sqrt()
        + 4.0 * (-nf * delta * delta / 16.0).exp();
    scale * bracket
}

/// Residual `‖L^n_p(β_i) - (n+1) X^{n+1}‖` at the bound's choice of `p`,
/// for a constant-speed path. Returns `(residual, p)`.
pub fn insertion_residual(
    path: &PiecewiseLinearPath,
    n: usize,
    segment: usize,
) -> Result<(f64, usize)> {
    let geom = segment_geometry(path)?;
    if segment == 0 || segment > geom.num_segments() {
        return Err(Error::InvalidArgument(format!(
            "segment {segment} outside 1..={}",
            geom.num_segments()
        )));
    }
    let p = theorem_p(geom.times[segment - 1], geom.times[segment], n).clamp(1, n + 1);
    let sig = path_signature(path, n + 1)?;
    let inserted = insertion_apply(sig.level(n), &geom.slopes[segment - 1], p)?;
    let target = sig.level(n + 1).scaled((n + 1) as f64);
    Ok((inserted.sub(&target)?.norm(), p))
}

/// One row of a recovery experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorComparison {
    pub depth: usize,
    /// 1-based segment index.
    pub segment: usize,
    pub p_used: usize,
    /// `‖y*_{p,n} - β_i‖`.
    pub measured: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub precondition_met: bool,
}

/// Recover every segment slope at each depth and compare with the bound.
///
/// The path is first put at constant speed. Depth `n` uses the signature
/// truncated at `n + 1`.
pub fn compare_recovery(
    path: &PiecewiseLinearPath,
    depths: &[usize],
) -> Result<Vec<ErrorComparison>> {
    let cs = constant_speed_reparam(path)?;
    let geom = segment_geometry(&cs)?;
    if !geom.satisfies_a1() {
        return Err(Error::AssumptionViolated(
            "turning angles must lie strictly inside (0, π)".into(),
        ));
    }
    let omega = geom
        .min_vertex_angle()
        .unwrap_or(std::f64::consts::FRAC_PI_2);
    let mut rows = Vec::new();
    for &n in depths {
        if n == 0 {
            return Err(Error::DepthTooSmall { depth: 0, min: 1 });
        }
        let top = ScaledTop::new(&path_signature(&cs, n + 1)?, DEFAULT_EPS_NORM)?;
        for (idx, beta) in geom.slopes.iter().enumerate() {
            let segment = idx + 1;
            let bound = theorem_bound(&TheoremBoundInput {
                times: geom.times.clone(),
                segment,
                ell: geom.total_variation,
                omega,
                depth: n,
                k_n: None,
            })?;
            let p_used = bound.p.clamp(1, n + 1);
            let y = top.slope(p_used)?;
            let measured = norm(&sub(&y, beta));
            rows.push(ErrorComparison {
                depth: n,
                segment,
                p_used,
                measured,
                bound: bound.value,
                satisfied: measured <= bound.value,
                precondition_met: bound.precondition_met && p_used == bound.p,
            });
        }
    }
    Ok(rows)
}

/// Segment (1-based) of `times` containing the grid point `p/n`.
pub fn segment_for_slope(p: usize, n: usize, times: &[f64]) -> usize {
    let t = p as f64 / n as f64;
    let idx = times.partition_point(|&s| s < t);
    idx.clamp(1, times.len() - 1)
}
