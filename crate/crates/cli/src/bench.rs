//! Timing tables for batch inversion.
//!
//! Each configuration inverts `batch` signatures of seeded random paths
//! with 10 pieces, starting at the origin, vertices uniform in `[0, 1]^d`.
//! Signatures are computed outside the timed region. One warmup run
//! precedes `repeats` timed runs; the median is reported.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use siginv::samples::bench_paths;
use siginv::tensor::check_capacity;
use siginv::{batch_invert, path_signature};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Vary {
    Depth,
    Dim,
    Batch,
}

impl FromStr for Vary {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "depth" => Ok(Vary::Depth),
            "dim" => Ok(Vary::Dim),
            "batch" => Ok(Vary::Batch),
            _ => Err(CliError::Format(format!(
                "--vary must be depth, dim or batch, got `{s}`"
            ))),
        }
    }
}

impl fmt::Display for Vary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Vary::Depth => "depth",
            Vary::Dim => "dim",
            Vary::Batch => "batch",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub vary: Vary,
    pub values: Vec<usize>,
    pub depth: usize,
    pub dim: usize,
    pub batch: usize,
    pub seed: u64,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub vary: Vary,
    pub dim: usize,
    pub depth: usize,
    pub batch: usize,
    /// Median wall-clock seconds, `None` when skipped.
    pub seconds: Option<f64>,
    pub status: String,
}

fn time_one(dim: usize, depth: usize, batch: usize, seed: u64, repeats: usize) -> Result<f64> {
    let sigs = bench_paths(seed, dim, batch)?
        .iter()
        .map(|p| path_signature(p, depth))
        .collect::<siginv::Result<Vec<_>>>()?;
    let starts = vec![vec![0.0; dim]; batch];
    batch_invert(&sigs, &starts)?;
    let mut times: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let t0 = Instant::now();
            let out = batch_invert(&sigs, &starts);
            let dt = t0.elapsed().as_secs_f64();
            std::hint::black_box(out).map(|_| dt)
        })
        .collect::<siginv::Result<Vec<_>>>()?;
    times.sort_by(f64::total_cmp);
    Ok(times[times.len() / 2])
}

pub fn run(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.values
        .iter()
        .map(|&v| {
            let (dim, depth, batch) = match cfg.vary {
                Vary::Depth => (cfg.dim, v, cfg.batch),
                Vary::Dim => (v, cfg.depth, cfg.batch),
                Vary::Batch => (cfg.dim, cfg.depth, v),
            };
            let mut row = BenchRow {
                vary: cfg.vary,
                dim,
                depth,
                batch,
                seconds: None,
                status: "ok".into(),
            };
            if depth < 2 || dim == 0 || batch == 0 {
                row.status = "skipped: needs depth >= 2, dim >= 1, batch >= 1".into();
                return Ok(row);
            }
            if let Err(e) = check_capacity(dim, depth) {
                row.status = format!("skipped: {e}");
                return Ok(row);
            }
            row.seconds = Some(time_one(dim, depth, batch, cfg.seed, cfg.repeats)?);
            Ok(row)
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn write_csv<W: std::io::Write>(writer: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["vary", "dim", "depth", "batch", "seconds", "status"])?;
    for r in rows {
        w.write_record([
            r.vary.to_string(),
            r.dim.to_string(),
            r.depth.to_string(),
            r.batch.to_string(),
            r.seconds.map(|s| s.to_string()).unwrap_or_default(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
