//! Field CSV files, JSON sidecars and atomic writes.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use darboux_core::verify::{CheckResult, ResidualReport};
use darboux_core::{CMatrix, FieldGrid, Grid, PointStatus, C64};
use serde::Serialize;

use crate::config::RunConfig;

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn header(rows: usize, cols: usize) -> Vec<String> {
    let mut h = vec!["xi".to_string(), "eta".to_string(), "flag".to_string()];
    for i in 0..rows {
        for j in 0..cols {
            h.push(format!("entry_{i}{j}_re"));
            h.push(format!("entry_{i}{j}_im"));
        }
    }
    h
}

// Shortest round-trip representation in exponent form.
fn num(x: f64) -> String {
    format!("{x:e}")
}

/// CSV bytes of a tabulated field in grid order, row-major entries.
pub fn field_csv(field: &FieldGrid) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(field.rows, field.cols))?;
    for (k, (v, st)) in field.values.iter().zip(&field.status).enumerate() {
        let (x, y) = field.grid.point(k);
        let mut rec = vec![num(x), num(y), st.as_str().to_string()];
        for i in 0..field.rows {
            for j in 0..field.cols {
                let z = v.as_ref().map(|m| m[(i, j)]).unwrap_or(C64::new(f64::NAN, f64::NAN));
                rec.push(num(z.re));
                rec.push(num(z.im));
            }
        }
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}

fn entry_index(name: &str) -> Option<(usize, usize, bool)> {
    let rest = name.strip_prefix("entry_")?;
    let (ij, part) = rest.rsplit_once('_')?;
    let im = match part {
        "re" => false,
        "im" => true,
        _ => return None,
    };
    if ij.len() != 2 {
        return None;
    }
    let mut chars = ij.chars();
    let i = chars.next()?.to_digit(10)? as usize;
    let j = chars.next()?.to_digit(10)? as usize;
    Some((i, j, im))
}

fn push_unique(v: &mut Vec<f64>, x: f64) -> usize {
    match v.iter().position(|&y| y == x) {
        Some(k) => k,
        None => {
            v.push(x);
            v.len() - 1
        }
    }
}

/// Reads a field written by [`field_csv`].
pub fn read_field_csv(path: &Path) -> Result<FieldGrid> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let head: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if head.len() < 5 || head[0] != "xi" || head[1] != "eta" || head[2] != "flag" {
        bail!("{}: header must start with xi,eta,flag", path.display());
    }
    let mut slots = Vec::new();
    let (mut rows, mut cols) = (0, 0);
    for h in &head[3..] {
        let (i, j, im) = entry_index(h).with_context(|| format!("bad column {h:?}"))?;
        rows = rows.max(i + 1);
        cols = cols.max(j + 1);
        slots.push((i, j, im));
    }
    if slots.len() != 2 * rows * cols {
        bail!(
            "{}: expected {} entry columns for a {rows}x{cols} field",
            path.display(),
            2 * rows * cols
        );
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut cells = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .with_context(|| format!("row {}: missing column {k}", line + 2))?
                .parse::<f64>()
                .with_context(|| format!("row {}: column {k} is not a number", line + 2))
        };
        let (x, y) = (parse(0)?, parse(1)?);
        let ix = push_unique(&mut xs, x);
        let iy = push_unique(&mut ys, y);
        let status =
            PointStatus::parse(rec.get(2).unwrap_or("")).with_context(|| format!("row {}: unknown flag", line + 2))?;
        let value = if status == PointStatus::Ok {
            let mut m = CMatrix::zeros(rows, cols);
            for (c, &(i, j, im)) in slots.iter().enumerate() {
                let v = parse(3 + c)?;
                if im {
                    m[(i, j)].im = v;
                } else {
                    m[(i, j)].re = v;
                }
            }
            Some(m)
        } else {
            None
        };
        cells.push(((ix, iy), value, status));
    }
    let grid = Grid::new(xs, ys);
    if cells.len() != grid.len() {
        bail!("{}: {} rows do not form a full grid", path.display(), cells.len());
    }
    let mut values = vec![None; grid.len()];
    let mut status = vec![PointStatus::Ok; grid.len()];
    for ((ix, iy), v, s) in cells {
        let k = grid.index(ix, iy);
        values[k] = v;
        status[k] = s;
    }
    Ok(FieldGrid {
        grid,
        rows,
        cols,
        values,
        status,
    })
}

#[derive(Serialize)]
pub struct CheckJson {
    pub name: String,
    pub pass: bool,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub coverage: f64,
    pub floor: f64,
}

impl From<&CheckResult> for CheckJson {
    fn from(c: &CheckResult) -> Self {
        Self {
            name: c.name.clone(),
            pass: c.pass,
            max: c.max,
            mean: c.mean,
            tolerance: c.tolerance,
            coverage: c.coverage,
            floor: c.floor,
        }
    }
}

#[derive(Serialize)]
pub struct ReportJson {
    pub pass: bool,
    pub max_residual: f64,
    pub field_coverage: f64,
    pub checks: Vec<CheckJson>,
}

impl ReportJson {
    pub fn new(report: &ResidualReport, field_coverage: f64) -> Self {
        Self {
            pass: report.pass(),
            max_residual: report.max_residual(),
            field_coverage,
            checks: report.checks.iter().map(CheckJson::from).collect(),
        }
    }
}

/// Provenance written next to every field file.
#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub version: &'static str,
    pub mode: &'a str,
    /// What the matrix columns of the CSV hold.
    pub layout: &'a str,
    pub config: &'a RunConfig,
    pub report: ReportJson,
    pub stats: BTreeMap<String, f64>,
}

pub fn sidecar_json(s: &Sidecar<'_>) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(s)?;
    bytes.push(b'\n');
    Ok(bytes)
}
