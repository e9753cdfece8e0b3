//! Binary dump of superoperator matrices for debugging: 16-byte header
//! (4-byte magic, u64 dimension, u32 flags, little-endian) followed by the
//! row-major complex128 entries.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use super::{LiouvError, SuperOperator};

const MAGIC: [u8; 4] = *b"CDSO";

impl SuperOperator {
    pub fn write_binary(&self, path: &Path) -> Result<(), LiouvError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&MAGIC)?;
        w.write_all(&(self.dim() as u64).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for z in self.matrix().iter() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self, LiouvError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(LiouvError::BadDump(format!("magic {magic:?}")));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let dim = u64::from_le_bytes(b8) as usize;
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let _flags = u32::from_le_bytes(b4);
        let side = dim * dim;
        let mut data = Vec::with_capacity(side * side);
        for _ in 0..side * side {
            let mut re = [0u8; 8];
            let mut im = [0u8; 8];
            r.read_exact(&mut re)?;
            r.read_exact(&mut im)?;
            data.push(Complex64::new(f64::from_le_bytes(re), f64::from_le_bytes(im)));
        }
        let mat = Array2::from_shape_vec((side, side), data)
            .map_err(|e| LiouvError::BadDump(e.to_string()))?;
        Ok(SuperOperator::new(mat, dim))
    }
}
