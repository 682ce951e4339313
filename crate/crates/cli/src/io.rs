//! CSV path files and JSON signature files.
//!
//! A path file holds one point per row. An optional header row may name a
//! `t` column (sample times) and an `id` column (several paths in one
//! file); every other column is a coordinate. Without a header all columns
//! are coordinates and the file holds a single path.
//!
//! A signature file holds `{"dim": d, "depth": n, "levels": [[...], ...]}`
//! or a JSON array of such objects. Level `k` has `d^k` entries.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use siginv::{PiecewiseLinearPath, TruncatedSignature};

use crate::error::{CliError, Result};

/// One path read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub id: Option<String>,
    pub path: PiecewiseLinearPath,
}

/// Contents of a path file.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFile {
    /// Whether the file had an `id` column.
    pub has_ids: bool,
    pub records: Vec<PathRecord>,
}

/// `(id, points, times)` of one path being read.
type Group = (Option<String>, Vec<Vec<f64>>, Vec<f64>);

struct Layout {
    t: Option<usize>,
    id: Option<usize>,
    coords: Vec<usize>,
}

fn parse_number(field: &str, row: usize) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| CliError::Format(format!("row {row}: `{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Format(format!(
            "row {row}: non-finite value `{field}`"
        )));
    }
    Ok(v)
}

pub fn read_paths<R: Read>(reader: R) -> Result<PathFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let rows: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    let Some(first) = rows.first() else {
        return Err(CliError::Format("no points".into()));
    };
    let is_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let layout = if is_header {
        let mut layout = Layout {
            t: None,
            id: None,
            coords: Vec::new(),
        };
        for (i, name) in first.iter().enumerate() {
            match name {
                "t" if layout.t.is_none() => layout.t = Some(i),
                "id" if layout.id.is_none() => layout.id = Some(i),
                // Columns written by `write_paths` that are not coordinates.
                "p" | "error" => {}
                _ => layout.coords.push(i),
            }
        }
        layout
    } else {
        Layout {
            t: None,
            id: None,
            coords: (0..first.len()).collect(),
        }
    };
    if layout.coords.is_empty() {
        return Err(CliError::Format("no coordinate columns".into()));
    }
    let body = if is_header { &rows[1..] } else { &rows[..] };
    if body.is_empty() {
        return Err(CliError::Format("no points".into()));
    }

    // Group by id, keeping first-appearance order.
    let mut groups: Vec<Group> = Vec::new();
    for (r, row) in body.iter().enumerate() {
        let line = r + 1 + usize::from(is_header);
        let id = layout.id.map(|i| row[i].to_string());
        let point = layout
            .coords
            .iter()
            .map(|&i| parse_number(&row[i], line))
            .collect::<Result<Vec<f64>>>()?;
        let t = layout.t.map(|i| parse_number(&row[i], line)).transpose()?;
        let slot = match groups.iter().position(|g| g.0 == id) {
            Some(k) => k,
            None => {
                groups.push((id, Vec::new(), Vec::new()));
                groups.len() - 1
            }
        };
        groups[slot].1.push(point);
        if let Some(t) = t {
            groups[slot].2.push(t);
        }
    }
    let records = groups
        .into_iter()
        .map(|(id, points, times)| {
            let path = if layout.t.is_some() {
                PiecewiseLinearPath::with_times(points, times)
            } else {
                PiecewiseLinearPath::new(points)
            };
            let path = path.map_err(|e| match &id {
                Some(id) => CliError::Format(format!("path `{id}`: {e}")),
                None => CliError::Core(e),
            })?;
            Ok(PathRecord { id, path })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathFile {
        has_ids: layout.id.is_some(),
        records,
    })
}

/// Serialised signature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub dim: usize,
    pub depth: usize,
    pub levels: Vec<Vec<f64>>,
}

impl SignatureRecord {
    pub fn from_signature(id: Option<String>, sig: &TruncatedSignature) -> Self {
        SignatureRecord {
            id,
            dim: sig.dim(),
            depth: sig.depth(),
            levels: sig.levels().iter().map(|l| l.coeffs().to_vec()).collect(),
        }
    }

    pub fn to_signature(&self) -> Result<TruncatedSignature> {
        if self.levels.len() != self.depth + 1 {
            return Err(CliError::Format(format!(
                "depth {} needs {} levels, found {}",
                self.depth,
                self.depth + 1,
                self.levels.len()
            )));
        }
        Ok(TruncatedSignature::from_level_coeffs(
            self.dim,
            self.levels.clone(),
        )?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    Many(Vec<SignatureRecord>),
    One(SignatureRecord),
}

/// Parse a single record or an array of records.
pub fn read_signatures<R: Read>(reader: R) -> Result<Vec<SignatureRecord>> {
    let parsed: OneOrMany = serde_json::from_reader(reader)?;
    Ok(match parsed {
        OneOrMany::Many(v) => v,
        OneOrMany::One(r) => vec![r],
    })
}

/// Write one object when `as_array` is false and there is exactly one
/// record, otherwise a JSON array.
pub fn write_json<W: Write, T: Serialize>(
    mut writer: W,
    items: &[T],
    as_array: bool,
) -> Result<()> {
    if !as_array && items.len() == 1 {
        serde_json::to_writer(&mut writer, &items[0])?;
    } else {
        serde_json::to_writer(&mut writer, items)?;
    }
    writeln!(writer)?;
    writer.flush()?;
    Ok(())
}

/// A reconstructed path or the reason it could not be produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutput {
    pub id: String,
    pub result: std::result::Result<PiecewiseLinearPath, String>,
}

/// CSV with columns `id,p,t,x1..xd,error`; a failed record gives a single
/// row with only `id` and `error` filled in.
pub fn write_paths<W: Write>(writer: W, outputs: &[PathOutput]) -> Result<()> {
    let dim = outputs
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .map(|p| p.dim())
        .max()
        .unwrap_or(0);
    let mut w = csv::WriterBuilder::new()
        .flexible(false)
        .from_writer(writer);
    let mut header = vec!["id".to_string(), "p".into(), "t".into()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.push("error".into());
    w.write_record(&header)?;
    for out in outputs {
        match &out.result {
            Ok(path) => {
                for (p, (pt, t)) in path.points().iter().zip(path.times()).enumerate() {
                    let mut row = vec![out.id.clone(), p.to_string(), t.to_string()];
                    row.extend(pt.iter().map(|x| x.to_string()));
                    row.resize(dim + 3, String::new());
                    row.push(String::new());
                    w.write_record(&row)?;
                }
            }
            Err(msg) => {
                let mut row = vec![out.id.clone()];
                row.resize(dim + 3, String::new());
                row.push(msg.clone());
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Parse `"1.5,-2"` into a vector.
pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| parse_number(f.trim(), 0))
        .collect::<Result<Vec<f64>>>()
        .map_err(|_| CliError::Format(format!("invalid point `{text}`")))
}

/// Parse `"5,10,20"` or an inclusive range `"4..12"`.
pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    let bad = || CliError::Format(format!("invalid list `{text}`"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|f| f.trim().parse().map_err(|_| bad()))
        .collect()
}
