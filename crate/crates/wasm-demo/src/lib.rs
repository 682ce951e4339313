//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Points cross the boundary as flat `Float64Array`s, row after row.

use siginv::development::{
    developed_vertices, k_omega, norm_lower_bound_check, normalize_unit_length,
};
use siginv::pipeline::reconstruct;
use siginv::samples::{noisy_cosine, Ar1Noise};
use siginv::{segment_geometry, PiecewiseLinearPath};
use wasm_bindgen::prelude::*;

fn to_path(flat: &[f64], dim: usize) -> Result<PiecewiseLinearPath, String> {
    if dim == 0 || !flat.len().is_multiple_of(dim) {
        return Err(format!(
            "{} values do not split into rows of {dim}",
            flat.len()
        ));
    }
    let points = flat.chunks(dim).map(<[f64]>::to_vec).collect();
    PiecewiseLinearPath::new(points).map_err(|e| e.to_string())
}

fn flatten(points: &[Vec<f64>]) -> Vec<f64> {
    points.iter().flatten().copied().collect()
}

/// Pieces per segment when sampling developed geodesics for drawing.
const ARC_STEPS: usize = 24;

/// Split every segment into `steps` equal pieces.
fn subdivided(path: &PiecewiseLinearPath, steps: usize) -> Result<PiecewiseLinearPath, String> {
    let pts = path.points();
    let mut out = vec![pts[0].clone()];
    for w in pts.windows(2) {
        for k in 1..=steps {
            let s = k as f64 / steps as f64;
            out.push(
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| a + s * (b - a))
                    .collect(),
            );
        }
    }
    PiecewiseLinearPath::new(out).map_err(|e| e.to_string())
}

/// Depth-`depth` reconstruction anchored at the first point.
pub fn reconstruct_flat(flat: &[f64], dim: usize, depth: usize) -> Result<Vec<f64>, String> {
    let path = to_path(flat, dim)?;
    let rec = reconstruct(&path, depth).map_err(|e| e.to_string())?;
    Ok(flatten(rec.path.points()))
}

/// Development of a planar path, normalised to unit length and scaled by
/// `alpha` (`2K(ω)/D` when `alpha <= 0`).
///
/// Returns `[alpha, lhs, rhs, distance, satisfied, x_0, y_0, x_1, y_1, ...]`
/// where the `(x, y)` sample the developed curve in the Poincaré disk,
/// `ARC_STEPS` points per segment.
pub fn develop_flat(flat: &[f64], alpha: f64) -> Result<Vec<f64>, String> {
    let unit = normalize_unit_length(&to_path(flat, 2)?).map_err(|e| e.to_string())?;
    let alpha = if alpha > 0.0 {
        alpha
    } else {
        let g = segment_geometry(&unit).map_err(|e| e.to_string())?;
        match g.min_vertex_angle() {
            Some(w) => 2.0 * k_omega(w) / g.shortest_segment(),
            None => 1.0,
        }
    };
    let report = norm_lower_bound_check(&unit, alpha).map_err(|e| e.to_string())?;
    let mut out = vec![
        report.alpha,
        report.lhs,
        report.rhs,
        report.geodesic_distance,
        if report.satisfied { 1.0 } else { 0.0 },
    ];
    let merged = unit.merged().ok_or("path has zero length")?;
    for y in developed_vertices(&subdivided(&merged.scaled(alpha), ARC_STEPS)?) {
        out.push(y[0] / (1.0 + y[2]));
        out.push(y[1] / (1.0 + y[2]));
    }
    Ok(out)
}

/// Noisy cosine series followed by its depth-`depth` trend:
/// `[samples, noisy (2·samples values), trend (2·(depth+1) values)]`.
pub fn trend_flat(
    samples: usize,
    phi: f64,
    sigma: f64,
    seed: u64,
    depth: usize,
) -> Result<Vec<f64>, String> {
    let noise = Ar1Noise { phi, sigma, seed };
    let (noisy, _) = noisy_cosine(samples, &noise).map_err(|e| e.to_string())?;
    let rec = reconstruct(&noisy, depth).map_err(|e| e.to_string())?;
    let mut out = vec![samples as f64];
    out.extend(flatten(noisy.points()));
    out.extend(flatten(rec.path.points()));
    Ok(out)
}

#[wasm_bindgen(js_name = reconstruct)]
pub fn reconstruct_js(points: &[f64], dim: usize, depth: usize) -> Result<Vec<f64>, JsValue> {
    reconstruct_flat(points, dim, depth).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = develop)]
pub fn develop_js(points: &[f64], alpha: f64) -> Result<Vec<f64>, JsValue> {
    develop_flat(points, alpha).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = trend)]
pub fn trend_js(
    samples: usize,
    phi: f64,
    sigma: f64,
    seed: u64,
    depth: usize,
) -> Result<Vec<f64>, JsValue> {
    trend_flat(samples, phi, sigma, seed, depth).map_err(|e| JsValue::from_str(&e))
}
