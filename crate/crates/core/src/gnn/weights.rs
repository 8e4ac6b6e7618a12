//! Named-tensor weights file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic     8 bytes  "PCFXWTS\0"
//! version   u32
//! count     u32
//! count x { name_len u32, name utf-8, rows u64, cols u64, rows*cols f64 LE }
//! ```
//!
//! Tensors appear in [`ModelParams::tensors`] order.

use std::io::{Read, Write};
use std::path::Path;

use super::params::ModelParams;
use super::shape::ModelShape;
use crate::config::FeatureDims;
use crate::error::{Error, Result};
use crate::io::binary::{read_f64, read_u32, read_u64, write_f64, write_u32, write_u64};

pub const WEIGHTS_MAGIC: &[u8; 8] = b"PCFXWTS\0";
pub const WEIGHTS_VERSION: u32 = 1;

pub fn write_params<W: Write>(params: &ModelParams, mut w: W) -> std::io::Result<()> {
    let tensors = params.tensors();
    w.write_all(WEIGHTS_MAGIC)?;
    write_u32(&mut w, WEIGHTS_VERSION)?;
    write_u32(&mut w, tensors.len() as u32)?;
    for (name, t) in tensors {
        write_u32(&mut w, name.len() as u32)?;
        w.write_all(name.as_bytes())?;
        write_u64(&mut w, t.rows() as u64)?;
        write_u64(&mut w, t.cols() as u64)?;
        for &x in t.as_slice() {
            write_f64(&mut w, x)?;
        }
    }
    Ok(())
}

/// Reads a weights stream into parameters laid out for `shape` and `dims`.
/// Names, order and shapes must match exactly.
pub fn read_params<R: Read>(shape: &ModelShape, dims: FeatureDims, mut r: R) -> Result<ModelParams> {
    let mismatch = |msg: String| Error::ManifestMismatch(msg);
    let io = |e: std::io::Error| mismatch(format!("truncated weights: {e}"));
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != WEIGHTS_MAGIC {
        return Err(mismatch("not a weights file".into()));
    }
    let version = read_u32(&mut r).map_err(io)?;
    if version != WEIGHTS_VERSION {
        return Err(Error::FormatVersion {
            expected: WEIGHTS_VERSION,
            found: version,
        });
    }
    let mut params = ModelParams::zeros(shape, dims)?;
    let count = read_u32(&mut r).map_err(io)? as usize;
    let mut tensors = params.tensors_mut();
    if count != tensors.len() {
        return Err(mismatch(format!("file has {count} tensors, model expects {}", tensors.len())));
    }
    for (name, tensor) in tensors.iter_mut() {
        let name_len = read_u32(&mut r).map_err(io)? as usize;
        if name_len > 4096 {
            return Err(mismatch("tensor name too long".into()));
        }
        let mut buf = vec![0u8; name_len];
        r.read_exact(&mut buf).map_err(io)?;
        let found = String::from_utf8(buf).map_err(|_| mismatch("tensor name is not utf-8".into()))?;
        if &found != name {
            return Err(mismatch(format!("expected tensor `{name}`, found `{found}`")));
        }
        let rows = read_u64(&mut r).map_err(io)? as usize;
        let cols = read_u64(&mut r).map_err(io)? as usize;
        if (rows, cols) != tensor.shape() {
            return Err(mismatch(format!(
                "tensor `{name}` is {rows}x{cols}, expected {}x{}",
                tensor.rows(),
                tensor.cols()
            )));
        }
        for x in tensor.as_mut_slice() {
            *x = read_f64(&mut r).map_err(io)?;
        }
    }
    drop(tensors);
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io)? != 0 {
        return Err(mismatch("trailing data after last tensor".into()));
    }
    if !params.is_finite() {
        return Err(mismatch("non-finite weights".into()));
    }
    Ok(params)
}

pub fn save_params(params: &ModelParams, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_params(params, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_params(path: &Path, shape: &ModelShape, dims: FeatureDims) -> Result<ModelParams> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_params(shape, dims, std::io::BufReader::new(file))
}
