//! Versioned binary parameter checkpoints.
//!
//! Layout: magic `ADNC`, format version (u32 LE), layer count (u32 LE),
//! then per layer the weight and bias lengths (u64 LE each) followed by the
//! values as little-endian 32-bit floats. Round-trips are bit-exact, which
//! is what lets a hypersphere model start from an autoencoder's encoder
//! weights unchanged.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::{LayerParams, NetParams};

const MAGIC: &[u8; 4] = b"ADNC";
const VERSION: u32 = 1;

/// Writes parameters to `path`.
pub fn save_checkpoint<P: AsRef<Path>>(path: P, params: &NetParams<f32>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(params.layers.len() as u32).to_le_bytes())?;
    for layer in &params.layers {
        w.write_all(&(layer.weights.len() as u64).to_le_bytes())?;
        w.write_all(&(layer.bias.len() as u64).to_le_bytes())?;
        for v in layer.weights.iter().chain(&layer.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads parameters written by [`save_checkpoint`].
pub fn load_checkpoint<P: AsRef<Path>>(path: P) -> Result<NetParams<f32>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let n_layers = read_u32(&mut r)? as usize;
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let w_len = read_u64(&mut r)? as usize;
        let b_len = read_u64(&mut r)? as usize;
        let mut weights = Vec::with_capacity(w_len);
        for _ in 0..w_len {
            weights.push(read_f32(&mut r)?);
        }
        let mut bias = Vec::with_capacity(b_len);
        for _ in 0..b_len {
            bias.push(read_f32(&mut r)?);
        }
        layers.push(LayerParams { weights, bias });
    }
    Ok(NetParams { layers })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f32<R: Read>(r: &mut R) -> Result<f32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(f32::from_le_bytes(buf))
}
