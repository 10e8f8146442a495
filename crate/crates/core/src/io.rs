//! Field files, CSV tables and quicklook images.
//!
//! The binary format is `GLNF1` followed by `u32 n` and `f64 L`, then `n*n`
//! little-endian `f64` values per component, row-major with `x` fastest.
//! The component count (1 or 2) follows from the payload length.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, Point, ScalarField, VectorField2};
use crate::radial::RadialProfile;

const MAGIC: &[u8; 5] = b"GLNF1";
const HEADER_LEN: usize = 5 + 4 + 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldFileHeader {
    pub component_count: usize,
    pub n: u32,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    Vector(VectorField2),
}

/// Fixed-width float formatting with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn encode(grid: &GridSpec, comps: &[&[f64]]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + comps.len() * grid.len() * 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(grid.n as u32).to_le_bytes());
    buf.extend_from_slice(&grid.half_width.to_le_bytes());
    for c in comps {
        for v in c.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_vector_field(path: impl AsRef<Path>, f: &VectorField2) -> Result<()> {
    write_bytes(path.as_ref(), &encode(&f.grid, &[&f.u1, &f.u2]))
}

pub fn write_scalar_field(path: impl AsRef<Path>, f: &ScalarField) -> Result<()> {
    write_bytes(path.as_ref(), &encode(&f.grid, &[&f.values]))
}

pub fn decode_field(bytes: &[u8]) -> Result<(FieldFileHeader, FieldData)> {
    if bytes.len() < 5 || &bytes[..5] != MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedPayload);
    }
    let n = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
    let half_width = f64::from_le_bytes(bytes[9..17].try_into().unwrap());
    let grid = GridSpec::new(half_width, n as usize)?;
    let payload = &bytes[HEADER_LEN..];
    let per = grid.len() * 8;
    let component_count = match payload.len() {
        l if l == per => 1,
        l if l == 2 * per => 2,
        _ => return Err(Error::TruncatedPayload),
    };
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let header = FieldFileHeader {
        component_count,
        n,
        half_width,
    };
    let data = if component_count == 1 {
        FieldData::Scalar(ScalarField { grid, values })
    } else {
        let u2 = values[grid.len()..].to_vec();
        let mut u1 = values;
        u1.truncate(grid.len());
        FieldData::Vector(VectorField2 { grid, u1, u2 })
    };
    Ok((header, data))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<(FieldFileHeader, FieldData)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_field(&bytes)
}

pub fn read_vector_field(path: impl AsRef<Path>) -> Result<VectorField2> {
    match read_field(path)?.1 {
        FieldData::Vector(f) => Ok(f),
        FieldData::Scalar(_) => Err(Error::GridMismatch(
            "expected a two-component field, found one component".into(),
        )),
    }
}

pub fn read_scalar_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    match read_field(path)?.1 {
        FieldData::Scalar(f) => Ok(f),
        FieldData::Vector(_) => Err(Error::GridMismatch(
            "expected a one-component field, found two components".into(),
        )),
    }
}

fn comment_block(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

/// Columns `x, y, u1, u2, |u|`.
pub fn field_csv(f: &VectorField2, comments: &[String]) -> String {
    let mut s = comment_block(comments);
    s.push_str("x,y,u1,u2,abs_u\n");
    let n = f.grid.n;
    for j in 0..n {
        for i in 0..n {
            let x = f.grid.point(i, j);
            let v = f.at(i, j);
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(x[0]),
                fmt_f64(x[1]),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[0].hypot(v[1]))
            ));
        }
    }
    s
}

/// Columns `r, value` (or `s, y` for Painleve profiles).
pub fn profile_csv(p: &RadialProfile, comments: &[String]) -> String {
    let mut s = comment_block(comments);
    s.push_str(&format!("# kind = {}\n", p.kind.name()));
    if p.kind == crate::radial::ProfileKind::Painleve {
        s.push_str("s,y\n");
    } else {
        s.push_str("r,value\n");
    }
    for (k, v) in p.values.iter().enumerate() {
        s.push_str(&format!("{},{}\n", fmt_f64(p.grid.r(k)), fmt_f64(*v)));
    }
    s
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    write_bytes(path.as_ref(), text.as_bytes())
}

/// `key = value` lines.
pub fn key_values(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Parses `key = value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = vec![];
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value, got {line:?}", ln + 1));
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("line {}: empty key", ln + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Binary PPM: linear grayscale over `[0, max]`, markers as 3x3 red dots.
/// The top image row is the largest `y`.
pub fn ppm_bytes(f: &ScalarField, markers: &[Point]) -> Result<Vec<u8>> {
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteField);
    }
    let n = f.grid.n;
    let max = f.values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut px = vec![0u8; 3 * n * n];
    for j in 0..n {
        for i in 0..n {
            let v = f.values[j * n + i].max(0.0);
            let g = if max > 0.0 { (255.0 * v / max).round() as u8 } else { 0 };
            let o = 3 * ((n - 1 - j) * n + i);
            px[o..o + 3].copy_from_slice(&[g, g, g]);
        }
    }
    for m in markers {
        let Some((i, j, fx, fy)) = f.grid.locate(*m) else { continue };
        let ci = (i as f64 + fx).round() as i64;
        let cj = (j as f64 + fy).round() as i64;
        for dj in -1..=1 {
            for di in -1..=1 {
                let (pi, pj) = (ci + di, cj + dj);
                if pi < 0 || pj < 0 || pi >= n as i64 || pj >= n as i64 {
                    continue;
                }
                let o = 3 * ((n - 1 - pj as usize) * n + pi as usize);
                px[o..o + 3].copy_from_slice(&[255, 0, 0]);
            }
        }
    }
    let mut out = Vec::with_capacity(px.len() + 20);
    write!(out, "P6\n{n} {n}\n255\n").unwrap();
    out.extend_from_slice(&px);
    Ok(out)
}

pub fn write_ppm(path: impl AsRef<Path>, f: &ScalarField, markers: &[Point]) -> Result<()> {
    write_bytes(path.as_ref(), &ppm_bytes(f, markers)?)
}
