//! Sample file I/O.
//!
//! Binary format: 16-byte header — magic `CYCS`, version `u32` LE, sample
//! count `u64` LE — followed by interleaved little-endian `f64` (re, im)
//! pairs. Files without the magic are parsed as plain text with one
//! whitespace- or comma-separated `re im` pair per line.

use std::fs;
use std::path::Path;

use num_complex::Complex;

use crate::{HarnessError, Result};

pub const MAGIC: [u8; 4] = *b"CYCS";
pub const VERSION: u32 = 1;

pub fn write_binary(path: &Path, samples: &[Complex<f64>]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + 16 * samples.len());
    bytes.extend_from_slice(&MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for s in samples {
        bytes.extend_from_slice(&s.re.to_le_bytes());
        bytes.extend_from_slice(&s.im.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_text(path: &Path, samples: &[Complex<f64>]) -> Result<()> {
    let mut text = String::new();
    for s in samples {
        text.push_str(&format!("{} {}\n", s.re, s.im));
    }
    fs::write(path, text)?;
    Ok(())
}

/// Reads either format, distinguished by the magic bytes.
pub fn read(path: &Path) -> Result<Vec<Complex<f64>>> {
    let bytes = fs::read(path)?;
    if bytes.len() >= 4 && bytes[..4] == MAGIC {
        read_binary(&bytes, path)
    } else {
        read_text(&bytes, path)
    }
}

fn read_binary(bytes: &[u8], path: &Path) -> Result<Vec<Complex<f64>>> {
    let fail = |msg: String| HarnessError::Config(format!("{}: {msg}", path.display()));
    if bytes.len() < 16 {
        return Err(fail("truncated header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(fail(format!("unsupported sample file version {version}")));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[16..];
    if body.len() != 16 * count {
        return Err(fail(format!(
            "expected {} bytes of samples for count {count}, found {}",
            16 * count,
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|chunk| {
            Complex::new(
                f64::from_le_bytes(chunk[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(chunk[8..].try_into().expect("8 bytes")),
            )
        })
        .collect())
}

fn read_text(bytes: &[u8], path: &Path) -> Result<Vec<Complex<f64>>> {
    let fail = |msg: String| HarnessError::Config(format!("{}: {msg}", path.display()));
    let text = std::str::from_utf8(bytes)
        .map_err(|_| fail("neither CYCS binary nor UTF-8 text".into()))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty());
        let re = fields.next().and_then(|f| f.parse::<f64>().ok());
        let im = fields.next().and_then(|f| f.parse::<f64>().ok());
        match (re, im, fields.next()) {
            (Some(re), Some(im), None) => samples.push(Complex::new(re, im)),
            _ => {
                return Err(fail(format!(
                    "line {}: expected two numeric columns, got \"{line}\"",
                    lineno + 1
                )))
            }
        }
    }
    if samples.is_empty() {
        return Err(fail("no samples found".into()));
    }
    Ok(samples)
}
