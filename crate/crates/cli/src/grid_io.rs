//! MGF1 binary grids.
//!
//! Layout: the bytes `MGF1`, little-endian `u32` fields `n`, `N`, `k`, an
//! `f64` half width `L`, then `N^n k^2` complex samples as `(re, im)` `f64`
//! pairs in row-major grid order with matrix entries innermost, row-major.
//! Nothing may follow the samples.

use std::path::Path;

use opcalc::{Complex64, GridSpec, ModuleFunction};

use crate::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"MGF1";
const HEADER_LEN: usize = 4 + 3 * 4 + 8;

pub fn encode(f: &ModuleFunction) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * f.data().len());
    out.extend_from_slice(MAGIC);
    for v in [g.n(), g.points(), f.algebra_dim()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&g.half_width().to_le_bytes());
    for z in f.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

/// Parses a whole MGF1 image. With `expected_k` set, the algebra dimension
/// must match it.
pub fn decode(bytes: &[u8], expected_k: Option<usize>) -> Result<ModuleFunction> {
    let bad = |m: String| Err(CliError::Format(m));
    if bytes.len() < HEADER_LEN {
        return bad(format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len()));
    }
    if &bytes[..4] != MAGIC {
        return bad("missing MGF1 magic".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (n, points, k) = (word(0), word(1), word(2));
    let half_width = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let grid = GridSpec::new(n, points, half_width).map_err(|e| CliError::Format(e.to_string()))?;
    if k == 0 {
        return bad("algebra dimension k must be positive".into());
    }
    if let Some(e) = expected_k {
        if k != e {
            return bad(format!("file has k = {k}, expected k = {e}"));
        }
    }
    let count = points
        .checked_pow(n as u32)
        .and_then(|c| c.checked_mul(k))
        .and_then(|c| c.checked_mul(k))
        .filter(|c| c.checked_mul(16).is_some())
        .ok_or_else(|| CliError::Format(format!("dimensions n = {n}, N = {points}, k = {k} overflow")))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 16 * count {
        return bad(format!("expected {} payload bytes, found {}", 16 * count, payload.len()));
    }
    let mut data = Vec::with_capacity(count);
    for (i, pair) in payload.chunks_exact(16).enumerate() {
        let re = f64::from_le_bytes(pair[..8].try_into().unwrap());
        let im = f64::from_le_bytes(pair[8..].try_into().unwrap());
        if !(re.is_finite() && im.is_finite()) {
            return bad(format!("non-finite value at sample {}", i / (k * k)));
        }
        data.push(Complex64::new(re, im));
    }
    ModuleFunction::from_data(grid, k, data).map_err(|e| CliError::Format(e.to_string()))
}

pub fn read_grid(path: &Path, expected_k: Option<usize>) -> Result<ModuleFunction> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes, expected_k)
}

/// Refuses non-finite samples, so everything written reads back.
pub fn write_grid(path: &Path, f: &ModuleFunction) -> Result<()> {
    if f.data().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(CliError::Format("refusing to write non-finite samples".into()));
    }
    std::fs::write(path, encode(f)).map_err(|e| CliError::io(path, e))
}

pub enum GridIo<'a> {
    Read { expected_k: Option<usize> },
    Write(&'a ModuleFunction),
}

/// Reads (returning the function) or writes (returning `None`).
pub fn grid_io(path: &Path, mode: GridIo<'_>) -> Result<Option<ModuleFunction>> {
    match mode {
        GridIo::Read { expected_k } => read_grid(path, expected_k).map(Some),
        GridIo::Write(f) => write_grid(path, f).map(|_| None),
    }
}
