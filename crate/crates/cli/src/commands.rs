//! Subcommand bodies, independent of argument parsing and file handles.

use rayon::prelude::*;
use serde::Serialize;
use siginv::development::{norm_lower_bound_check, normalize_unit_length, BoundReport};
use siginv::path::segment_geometry;
use siginv::pipeline::{reconstruct, roundtrip_errors};
use siginv::{batch_invert, constant_speed_reparam, path_signature, Error};

use crate::error::{class_code, CliError, Result};
use crate::io::{PathFile, PathOutput, SignatureRecord};

fn record_id(id: &Option<String>, index: usize) -> String {
    id.clone().unwrap_or_else(|| index.to_string())
}

/// Signature of every path in the file, in file order.
pub fn sign(file: &PathFile, depth: usize, constant_speed: bool) -> Result<Vec<SignatureRecord>> {
    if depth == 0 {
        return Err(Error::DepthTooSmall { depth, min: 1 }.into());
    }
    file.records
        .par_iter()
        .map(|rec| {
            let sig = if constant_speed {
                path_signature(&constant_speed_reparam(&rec.path)?, depth)?
            } else {
                path_signature(&rec.path, depth)?
            };
            Ok(SignatureRecord::from_signature(rec.id.clone(), &sig))
        })
        .collect()
}

/// Reconstruct every record from `start` (the zero vector by default).
///
/// A record that fails becomes an error row. The second value is the exit
/// code of the first failure, if any.
pub fn invert(
    records: &[SignatureRecord],
    start: Option<&[f64]>,
) -> Result<(Vec<PathOutput>, Option<i32>)> {
    let sigs = records
        .iter()
        .map(|r| r.to_signature())
        .collect::<Result<Vec<_>>>()?;
    let Some(first) = sigs.first() else {
        return Ok((Vec::new(), None));
    };
    let start = match start {
        Some(s) if s.len() != first.dim() => {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: s.len(),
            }
            .into())
        }
        Some(s) => s.to_vec(),
        None => vec![0.0; first.dim()],
    };
    let starts = vec![start; sigs.len()];
    let results = batch_invert(&sigs, &starts)?;
    let mut code = None;
    let outputs = records
        .iter()
        .zip(results)
        .enumerate()
        .map(|(i, (rec, res))| PathOutput {
            id: record_id(&rec.id, i),
            result: res.map(|r| r.path).map_err(|e| {
                code.get_or_insert(class_code(e.class()));
                e.to_string()
            }),
        })
        .collect();
    Ok((outputs, code))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripLine {
    pub id: String,
    pub depth: usize,
    pub mean_error: f64,
    pub max_error: f64,
}

/// Sign, invert from the same start and compare, for every path and depth.
pub fn roundtrip(file: &PathFile, depths: &[usize]) -> Result<Vec<RoundtripLine>> {
    let per_path = file
        .records
        .par_iter()
        .map(|rec| roundtrip_errors(&rec.path, depths))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(file
        .records
        .iter()
        .zip(per_path)
        .enumerate()
        .flat_map(|(i, (rec, rows))| {
            let id = record_id(&rec.id, i);
            rows.into_iter().map(move |r| RoundtripLine {
                id: id.clone(),
                depth: r.depth,
                mean_error: r.mean,
                max_error: r.max,
            })
        })
        .collect())
}

/// Depth-`n` reconstruction of each path anchored at its first point.
pub fn trend(file: &PathFile, depth: usize) -> Result<Vec<PathOutput>> {
    file.records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let r = reconstruct(&rec.path, depth)?;
            Ok(PathOutput {
                id: record_id(&rec.id, i),
                result: Ok(r.path),
            })
        })
        .collect()
}

/// `α` used when none is given: `2K(ω)/D`, or 1 for a single piece.
pub fn default_alpha(report_min_alpha: f64) -> f64 {
    if report_min_alpha > 0.0 {
        2.0 * report_min_alpha
    } else {
        1.0
    }
}

/// Normalise each path to unit length and run the lower-bound check.
pub fn develop(file: &PathFile, alpha: Option<f64>) -> Result<Vec<BoundReport>> {
    file.records
        .iter()
        .map(|rec| {
            let unit = normalize_unit_length(&rec.path)?;
            let alpha = match alpha {
                Some(a) => a,
                None => {
                    let g = segment_geometry(&unit)?;
                    let k = g
                        .min_vertex_angle()
                        .map(siginv::development::k_omega)
                        .unwrap_or(0.0);
                    default_alpha(k / g.shortest_segment())
                }
            };
            norm_lower_bound_check(&unit, alpha).map_err(CliError::from)
        })
        .collect()
}
