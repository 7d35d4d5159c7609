//! Field snapshots: a JSON sidecar describing the grid plus a flat binary
//! file of little-endian f64 physical values, row-major `ny × nx`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use shearlab_core::field::SpectralField;
use shearlab_core::grid::TorusGrid;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub alpha: f64,
    pub nx: usize,
    pub ny: usize,
    /// "vorticity" | "stream"
    pub kind: String,
    pub time: f64,
    pub endianness: String,
    /// Binary payload, relative to the sidecar.
    pub data: PathBuf,
}

/// Write `<stem>.json` + `<stem>.bin`.
pub fn write_snapshot(
    stem: &Path,
    field: &SpectralField,
    kind: &str,
    time: f64,
) -> anyhow::Result<()> {
    let g = field.grid();
    let bin_name = PathBuf::from(format!(
        "{}.bin",
        stem.file_name().unwrap_or_default().to_string_lossy()
    ));
    let meta = SnapshotMeta {
        alpha: g.alpha(),
        nx: g.nx(),
        ny: g.ny(),
        kind: kind.into(),
        time,
        endianness: "little".into(),
        data: bin_name.clone(),
    };
    let json_path = stem.with_extension("json");
    let bin_path = stem.with_extension("bin");
    std::fs::write(&json_path, serde_json::to_string_pretty(&meta)?)
        .with_context(|| format!("writing {}", json_path.display()))?;
    let values = field.to_physical();
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(&bin_path, bytes).with_context(|| format!("writing {}", bin_path.display()))?;
    Ok(())
}

/// Read a snapshot given the sidecar path.
pub fn read_snapshot(sidecar: &Path) -> anyhow::Result<(SpectralField, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_str(
        &std::fs::read_to_string(sidecar)
            .with_context(|| format!("reading {}", sidecar.display()))?,
    )?;
    if meta.endianness != "little" {
        bail!("snapshot {} is not little-endian", sidecar.display());
    }
    let bin_path = sidecar
        .parent()
        .unwrap_or(Path::new("."))
        .join(&meta.data);
    let bytes = std::fs::read(&bin_path).with_context(|| format!("reading {}", bin_path.display()))?;
    if bytes.len() != meta.nx * meta.ny * 8 {
        bail!(
            "snapshot payload {} has {} bytes, expected {}",
            bin_path.display(),
            bytes.len(),
            meta.nx * meta.ny * 8
        );
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let grid = TorusGrid::new(meta.alpha, meta.nx, meta.ny)?;
    let field = SpectralField::from_physical(grid, &values)?;
    Ok((field, meta))
}
