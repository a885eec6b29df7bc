//! Binary dump/load of numeric arrays for caching between harness stages.
//!
//! Layout: an 8-byte magic tag, a little-endian u32 dimension count, the
//! dimensions as little-endian u32s, then the payload as little-endian f64s
//! in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC_GRAM_SET: [u8; 8] = *b"TXMGRAM\0";
pub const MAGIC_GRAM_VECTOR: [u8; 8] = *b"TXMGVEC\0";
pub const MAGIC_EMBEDDINGS: [u8; 8] = *b"TXMEMB\0\0";

/// Write `data` (row-major, `dims` shape) under the given magic tag.
pub fn write_array(
    path: impl AsRef<Path>,
    magic: &[u8; 8],
    dims: &[u32],
    data: &[f64],
) -> Result<()> {
    let expected: usize = dims.iter().map(|&d| d as usize).product();
    if expected != data.len() {
        return Err(Error::ShapeMismatch(format!(
            "dims {dims:?} describe {expected} values but payload has {}",
            data.len()
        )));
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(magic)?;
    file.write_all(&(dims.len() as u32).to_le_bytes())?;
    for &d in dims {
        file.write_all(&d.to_le_bytes())?;
    }
    for &v in data {
        file.write_all(&v.to_le_bytes())?;
    }
    file.flush()?;
    Ok(())
}

/// Read an array written by [`write_array`], checking the magic tag.
pub fn read_array(path: impl AsRef<Path>, magic: &[u8; 8]) -> Result<(Vec<u32>, Vec<f64>)> {
    let path = path.as_ref();
    let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut tag = [0u8; 8];
    file.read_exact(&mut tag)
        .map_err(|_| Error::Truncated(format!("{} has no header", path.display())))?;
    if &tag != magic {
        return Err(Error::UnsupportedCodec(format!(
            "{} has magic {tag:?}, expected {magic:?}",
            path.display()
        )));
    }
    let mut u32buf = [0u8; 4];
    file.read_exact(&mut u32buf)
        .map_err(|_| Error::Truncated(format!("{} truncated in dims", path.display())))?;
    let ndims = u32::from_le_bytes(u32buf) as usize;
    if ndims > 8 {
        return Err(Error::Truncated(format!("implausible rank {ndims}")));
    }
    let mut dims = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        file.read_exact(&mut u32buf)
            .map_err(|_| Error::Truncated(format!("{} truncated in dims", path.display())))?;
        dims.push(u32::from_le_bytes(u32buf));
    }
    let count: usize = dims.iter().map(|&d| d as usize).product();
    let mut data = Vec::with_capacity(count);
    let mut f64buf = [0u8; 8];
    for _ in 0..count {
        file.read_exact(&mut f64buf)
            .map_err(|_| Error::Truncated(format!("{} truncated in payload", path.display())))?;
        data.push(f64::from_le_bytes(f64buf));
    }
    Ok((dims, data))
}
