//! Binary PGM (P5) image output at 8 and 16 bits, plus a small reader
//! used by tests and the CLI.

use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::{Error, Result};

/// Write grayscale values clipped from [0, 1] into an 8-bit PGM.
pub fn write_pgm8(path: &Path, img: &[f64], width: usize, height: usize) -> Result<()> {
    check_dims(img.len(), width, height)?;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    for v in img {
        w.write_all(&[(v.clamp(0.0, 1.0) * 255.0).round() as u8])?;
    }
    w.flush()?;
    Ok(())
}

/// Write grayscale values clipped from [0, 1] into a 16-bit PGM
/// (big-endian samples, per the format).
pub fn write_pgm16(path: &Path, img: &[f64], width: usize, height: usize) -> Result<()> {
    check_dims(img.len(), width, height)?;
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write!(w, "P5\n{width} {height}\n65535\n")?;
    for v in img {
        let s = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        w.write_all(&s.to_be_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Write a boolean mask as 0/255 pixels.
pub fn write_mask_pgm(path: &Path, mask: &[bool], width: usize, height: usize) -> Result<()> {
    let img: Vec<f64> = mask.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect();
    write_pgm8(path, &img, width, height)
}

/// Read a binary PGM back into [0, 1] values with its dimensions.
pub fn read_pgm(path: &Path) -> Result<(Vec<f64>, usize, usize)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        }
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("{}: truncated header", path.display())));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).to_string())
    };

    let magic = token(&bytes)?;
    if magic != "P5" {
        return Err(Error::Format(format!("{}: not a binary PGM", path.display())));
    }
    let width: usize = parse_field(&token(&bytes)?, path, "width")?;
    let height: usize = parse_field(&token(&bytes)?, path, "height")?;
    let maxval: usize = parse_field(&token(&bytes)?, path, "maxval")?;
    pos += 1; // single whitespace after maxval

    let pixels = width * height;
    let data = &bytes[pos..];
    let img = if maxval < 256 {
        if data.len() < pixels {
            return Err(Error::Format(format!("{}: truncated pixels", path.display())));
        }
        data[..pixels].iter().map(|b| *b as f64 / maxval as f64).collect()
    } else {
        if data.len() < 2 * pixels {
            return Err(Error::Format(format!("{}: truncated pixels", path.display())));
        }
        data[..2 * pixels]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / maxval as f64)
            .collect()
    };
    Ok((img, width, height))
}

fn parse_field(tok: &str, path: &Path, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Format(format!("{}: bad {what} field {tok:?}", path.display())))
}

fn check_dims(len: usize, width: usize, height: usize) -> Result<()> {
    if len != width * height {
        return Err(Error::Dimension { context: "PGM pixel count", expected: width * height, got: len });
    }
    Ok(())
}
