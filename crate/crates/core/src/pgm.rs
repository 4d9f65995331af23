//! 16-bit binary PGM (P5) reader/writer plus flat `key = value` sidecar files.
//!
//! Sample words are big-endian per the netpbm convention for maxval > 255.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Write a 16-bit grayscale PGM with maxval 65535.
pub fn write_pgm16(path: &Path, width: usize, height: usize, data: &[u16]) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::Config(format!(
            "pgm: expected {} samples, got {}",
            width * height,
            data.len()
        )));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = |bytes: &[u8]| out.write_all(bytes).map_err(|e| Error::io(path, e));
    write(format!("P5\n{width} {height}\n65535\n").as_bytes())?;
    let mut buf = Vec::with_capacity(data.len() * 2);
    for &v in data {
        buf.extend_from_slice(&v.to_be_bytes());
    }
    write(&buf)
}

/// Read a binary PGM. Accepts maxval up to 65535; 8-bit files are widened.
pub fn read_pgm16(path: &Path) -> Result<(usize, usize, Vec<u16>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut pos = 0usize;

    let mut token = |bytes: &[u8]| -> Result<String> {
        // skip whitespace and '#' comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(path, "truncated header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = token(&bytes)?;
    if magic != "P5" {
        return Err(Error::parse(path, format!("not a binary PGM (magic {magic:?})")));
    }
    let width: usize = token(&bytes)?
        .parse()
        .map_err(|_| Error::parse(path, "bad width"))?;
    let height: usize = token(&bytes)?
        .parse()
        .map_err(|_| Error::parse(path, "bad height"))?;
    let maxval: u32 = token(&bytes)?
        .parse()
        .map_err(|_| Error::parse(path, "bad maxval"))?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(path, format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;

    let count = width * height;
    let mut data = Vec::with_capacity(count);
    if maxval > 255 {
        if bytes.len() < pos + 2 * count {
            return Err(Error::parse(path, "raster shorter than header promises"));
        }
        for i in 0..count {
            data.push(u16::from_be_bytes([bytes[pos + 2 * i], bytes[pos + 2 * i + 1]]));
        }
    } else {
        if bytes.len() < pos + count {
            return Err(Error::parse(path, "raster shorter than header promises"));
        }
        for i in 0..count {
            data.push(bytes[pos + i] as u16);
        }
    }
    Ok((width, height, data))
}

/// Write a sidecar of `key = value` lines in the order given.
pub fn write_sidecar(path: &Path, entries: &[(String, String)]) -> Result<()> {
    let mut text = String::new();
    for (k, v) in entries {
        text.push_str(k);
        text.push_str(" = ");
        text.push_str(v);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Read a sidecar written by [`write_sidecar`]. Blank lines and `#` comments
/// are ignored.
pub fn read_sidecar(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, format!("line {}: expected key = value", lineno + 1)))?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}
