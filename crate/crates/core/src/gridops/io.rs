//! Raw binary cache format for [`KernelOperator`]:
//!
//! ```text
//! magic  b"DSPKOP01"
//! n      u64   nodes per axis
//! extent f64
//! flags  u8    bit 0 = includes_weights
//! data   (re, im) f64 pairs, row-major, (2n²)² of them
//! ```
//! All values little-endian.

use std::io::{Read, Write};

use faer::{c64, Mat};

use super::grid::{make_grid, Grid2D};
use super::operator::KernelOperator;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DSPKOP01";

pub fn write_operator<W: Write>(mut w: W, grid: &Grid2D, op: &KernelOperator) -> Result<()> {
    if op.nodes() != grid.len() {
        return Err(Error::Dimension {
            expected: grid.len(),
            got: op.nodes(),
        });
    }
    w.write_all(MAGIC)?;
    w.write_all(&(grid.n as u64).to_le_bytes())?;
    w.write_all(&grid.extent.to_le_bytes())?;
    w.write_all(&[op.includes_weights as u8])?;
    let m = op.dim();
    let mut buf = Vec::with_capacity(16 * m);
    for r in 0..m {
        buf.clear();
        for s in 0..m {
            let z = op.entries[(r, s)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_operator<R: Read>(mut r: R) -> Result<(Grid2D, KernelOperator)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Parse("not a kernel-operator file (bad magic)".into()));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8)?;
    let extent = f64::from_le_bytes(b8);
    let mut flags = [0u8; 1];
    r.read_exact(&mut flags)?;
    let grid = make_grid(extent, n)?;
    let m = 2 * grid.len();
    let mut data = vec![0u8; 16 * m * m];
    r.read_exact(&mut data)?;
    let f = |k: usize| f64::from_le_bytes(data[8 * k..8 * k + 8].try_into().unwrap());
    let entries = Mat::from_fn(m, m, |i, j| {
        let k = 2 * (i * m + j);
        c64::new(f(k), f(k + 1))
    });
    let op = KernelOperator {
        entries,
        weights: grid.weights.clone(),
        includes_weights: flags[0] & 1 == 1,
    };
    Ok((grid, op))
}
