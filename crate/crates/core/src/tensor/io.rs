//! Flat binary parameter container.
//!
//! Layout: magic "SPLB1", then a little-endian u32 entry count, then per
//! entry a u8 rank, rank little-endian u32 dims, and the values as
//! little-endian f64. The architecture config travels in a JSON sidecar next
//! to the binary file.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CONTAINER_MAGIC: &[u8; 5] = b"SPLB1";

/// One serialized tensor: its dims and flat data.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    pub dims: Vec<u32>,
    pub values: Vec<f64>,
}

impl TensorEntry {
    pub fn new(dims: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        let expect: usize = dims.iter().map(|&d| d as usize).product();
        if expect != values.len() {
            return Err(Error::shape(
                format!("{:?}", dims),
                format!("{} values", values.len()),
            ));
        }
        Ok(TensorEntry { dims, values })
    }

    pub fn from_slice<T: Scalar>(dims: Vec<u32>, values: &[T]) -> Result<Self> {
        TensorEntry::new(dims, values.iter().map(|v| v.to_f64_lossy()).collect())
    }
}

/// Writes the container to a stream.
pub fn write_tensor_container(entries: &[TensorEntry], w: &mut impl Write) -> Result<()> {
    w.write_all(CONTAINER_MAGIC)?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for e in entries {
        w.write_all(&[e.dims.len() as u8])?;
        for &d in &e.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        for &v in &e.values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a container written by [`write_tensor_container`].
pub fn read_tensor_container(r: &mut impl Read) -> Result<Vec<TensorEntry>> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != CONTAINER_MAGIC {
        return Err(Error::Parse {
            line: 1,
            msg: format!("bad container magic {magic:?}"),
        });
    }
    let mut count = [0u8; 4];
    r.read_exact(&mut count)?;
    let count = u32::from_le_bytes(count) as usize;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let mut rank = [0u8; 1];
        r.read_exact(&mut rank)?;
        let mut dims = Vec::with_capacity(rank[0] as usize);
        for _ in 0..rank[0] {
            let mut d = [0u8; 4];
            r.read_exact(&mut d)?;
            dims.push(u32::from_le_bytes(d));
        }
        let n: usize = dims.iter().map(|&d| d as usize).product();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v = [0u8; 8];
            r.read_exact(&mut v)?;
            values.push(f64::from_le_bytes(v));
        }
        entries.push(TensorEntry { dims, values });
    }
    Ok(entries)
}
