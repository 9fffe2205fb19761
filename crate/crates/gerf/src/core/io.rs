//! Portable binary matrix/vector files.
//!
//! Layout: 8-byte magic `GERFMAT1`, rows (u64 LE), cols (u64 LE), then
//! rows×cols f64 little-endian values in row-major order. Vectors are
//! stored with cols = 1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::core::DenseMatrix;
use crate::{Error, Result};

pub const GERFMAT_MAGIC: &[u8; 8] = b"GERFMAT1";

/// Guards against absurd headers on corrupt files.
const MAX_ENTRIES: u64 = 1 << 30;

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(GERFMAT_MAGIC)?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&(m.cols() as u64).to_le_bytes())?;
    for v in m.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    let m = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    write_matrix(path, &m)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != GERFMAT_MAGIC {
        return Err(Error::Format(format!(
            "{}: bad magic {:?}, expected GERFMAT1",
            path.display(),
            String::from_utf8_lossy(&magic)
        )));
    }
    let rows = read_u64(&mut r)?;
    let cols = read_u64(&mut r)?;
    if rows.checked_mul(cols).map_or(true, |n| n > MAX_ENTRIES) {
        return Err(Error::Format(format!(
            "{}: implausible shape {rows}x{cols}",
            path.display()
        )));
    }
    let n = (rows * cols) as usize;
    let mut data = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)?;
        data.push(f64::from_le_bytes(buf));
    }
    DenseMatrix::new(rows as usize, cols as usize, data)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.cols() != 1 {
        return Err(Error::Format(format!(
            "{}: expected a vector (cols = 1), got {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.data().to_vec())
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.mat");
        std::fs::write(&p, b"NOTMAGIC\x00\x00").unwrap();
        assert!(matches!(read_matrix(&p), Err(Error::Format(_))));
    }

    #[test]
    fn vector_requires_single_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.mat");
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        write_matrix(&p, &m).unwrap();
        assert!(read_vector(&p).is_err());
        assert_eq!(read_matrix(&p).unwrap(), m);
    }
}
