//! Field and report serialization.
//!
//! Fields are written both as CSV (columns `i, j, x, y, value`) and as a
//! JSON header plus a flat little-endian 64-bit float block in node order
//! (lexicographic by integer lattice index). Writes go through a temp file
//! and a rename so an interrupted run never leaves a torn file.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::field::ScalarField;
use crate::geometry::DomainSpec;
use crate::grid::Grid;
use crate::moving_plane::SweepReport;
use crate::scalar::{as_f64, real, Real};

/// Header accompanying a binary field block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: String,
    pub field: String,
    pub dtype: String,
    pub order: String,
    pub count: usize,
    pub h: f64,
    pub domain: DomainSpec<f64>,
}

/// Atomically writes bytes: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes the CSV form of a field.
pub fn write_field_csv<T: Real>(path: &Path, field: &ScalarField<T>) -> Result<()> {
    let grid = field.grid();
    let mut out = String::from("i,j,x,y,value\n");
    for k in 0..field.len() {
        let ij = grid.lattice(k);
        let p = grid.coords(k);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            ij[0],
            ij[1],
            as_f64(p[0]),
            as_f64(p[1]),
            as_f64(field.get(k))
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Writes the JSON header + binary block pair for a field.
pub fn write_field_binary<T: Real>(
    header_path: &Path,
    block_path: &Path,
    field: &ScalarField<T>,
    name: &str,
) -> Result<()> {
    let grid = field.grid();
    let header = FieldHeader {
        schema: "v1".to_string(),
        field: name.to_string(),
        dtype: "f64le".to_string(),
        order: "lexicographic-ij".to_string(),
        count: field.len(),
        h: as_f64(grid.h()),
        domain: domain_to_f64(grid.spec()),
    };
    let mut bytes = Vec::with_capacity(field.len() * 8);
    for k in 0..field.len() {
        bytes.extend_from_slice(&as_f64(field.get(k)).to_le_bytes());
    }
    write_atomic(
        header_path,
        serde_json::to_string_pretty(&header)
            .map_err(|e| CoreError::Io(e.to_string()))?
            .as_bytes(),
    )?;
    write_atomic(block_path, &bytes)
}

/// Reads a binary field pair back onto an existing grid, validating the
/// header against the grid.
pub fn read_field_binary<T: Real>(
    header_path: &Path,
    block_path: &Path,
    grid: &Arc<Grid<T>>,
) -> Result<ScalarField<T>> {
    let header_text = fs::read_to_string(header_path)
        .map_err(|_| CoreError::MissingField(header_path.display().to_string()))?;
    let header: FieldHeader =
        serde_json::from_str(&header_text).map_err(|e| CoreError::Io(e.to_string()))?;
    if header.count != grid.node_count()
        || (header.h - as_f64(grid.h())).abs() > 1e-12 * header.h.abs().max(1.0)
        || header.domain != domain_to_f64(grid.spec())
    {
        return Err(CoreError::GridMismatch);
    }
    let bytes =
        fs::read(block_path).map_err(|_| CoreError::MissingField(block_path.display().to_string()))?;
    if bytes.len() != header.count * 8 {
        return Err(CoreError::Io(format!(
            "binary block has {} bytes, expected {}",
            bytes.len(),
            header.count * 8
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| real::<T>(f64::from_le_bytes(c.try_into().expect("chunk of 8"))))
        .collect();
    ScalarField::from_values(grid, values)
}

fn domain_to_f64<T: Real>(spec: &DomainSpec<T>) -> DomainSpec<f64> {
    match *spec {
        DomainSpec::Interval { x_lo, x_hi } => DomainSpec::Interval {
            x_lo: as_f64(x_lo),
            x_hi: as_f64(x_hi),
        },
        DomainSpec::Rectangle { x_lo, x_hi, y_lo, y_hi } => DomainSpec::Rectangle {
            x_lo: as_f64(x_lo),
            x_hi: as_f64(x_hi),
            y_lo: as_f64(y_lo),
            y_hi: as_f64(y_hi),
        },
        DomainSpec::Disk { center, radius } => DomainSpec::Disk {
            center: [as_f64(center[0]), as_f64(center[1])],
            radius: as_f64(radius),
        },
    }
}

/// Writes a sweep report as pretty JSON.
pub fn write_report_json<T: Real + Serialize>(path: &Path, report: &SweepReport<T>) -> Result<()> {
    let text =
        serde_json::to_string_pretty(report).map_err(|e| CoreError::Io(e.to_string()))?;
    write_atomic(path, text.as_bytes())
}

/// Writes the per-(nu, lambda) margin table: `nu_x, nu_y, lambda,
/// min_margin, verdict` with the minimum over the three checked fields.
pub fn write_report_csv<T: Real>(path: &Path, report: &SweepReport<T>) -> Result<()> {
    let mut out = String::from("nu_x,nu_y,lambda,min_margin,verdict\n");
    for e in &report.reflection {
        let min_margin = e.margin_u0.min(e.margin_w).min(e.margin_u);
        let verdict = match e.verdict {
            crate::moving_plane::Verdict::Pass => "pass",
            crate::moving_plane::Verdict::Fail => "fail",
            crate::moving_plane::Verdict::DegenerateFlat => "degenerate-flat",
            crate::moving_plane::Verdict::NotApplicable => "not-applicable",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            as_f64(e.nu[0]),
            as_f64(e.nu[1]),
            as_f64(e.lambda),
            as_f64(min_margin),
            verdict
        ));
    }
    write_atomic(path, out.as_bytes())
}
