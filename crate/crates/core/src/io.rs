//! Binary grid files.
//!
//! Layout: the magic `GRDF`, width and height as little-endian `u32`, then
//! `width * height` little-endian `f32` values in row-major order, row 0
//! first. Nothing may follow the payload. Masks and label grids use the
//! same format with values 0/1 and label ids.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Extent, LabelGrid, ScalarGrid};

pub const MAGIC: &[u8; 4] = b"GRDF";
const HEADER: usize = 12;

pub fn encode_grid(grid: &ScalarGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 4 * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(grid.width() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.height() as u32).to_le_bytes());
    for v in grid.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_grid(bytes: &[u8]) -> Result<ScalarGrid> {
    if bytes.len() < HEADER {
        return Err(Error::Format(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::Format("extent overflows".into()))?;
    let payload = &bytes[HEADER..];
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload of {} bytes, expected {expected} for {width}x{height}",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarGrid::new(width, height, data)
}

pub fn write_grid(mut w: impl Write, grid: &ScalarGrid) -> std::io::Result<()> {
    w.write_all(&encode_grid(grid))
}

pub fn read_grid(mut r: impl Read) -> Result<ScalarGrid> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)
        .map_err(|e| Error::Format(e.to_string()))?;
    decode_grid(&buf)
}

pub fn mask_to_grid(mask: &BinaryMask) -> ScalarGrid {
    ScalarGrid::new(
        mask.width(),
        mask.height(),
        mask.data().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    )
    .expect("extent preserved")
}

/// Nonzero pixels are true.
pub fn grid_to_mask(grid: &ScalarGrid) -> BinaryMask {
    BinaryMask::new(
        grid.width(),
        grid.height(),
        grid.data().iter().map(|&v| v != 0.0).collect(),
    )
    .expect("extent preserved")
}

pub fn labels_to_grid(labels: &LabelGrid) -> ScalarGrid {
    ScalarGrid::new(
        labels.width(),
        labels.height(),
        labels.data().iter().map(|&l| l as f32).collect(),
    )
    .expect("extent preserved")
}
