//! TT1F binary format.
//!
//! Layout (all integers little-endian `u32`, all values little-endian `f64`):
//!
//! ```text
//! magic  b"TT1F"
//! u32    N                  number of modes
//! u32    flags              bit0 = operator, bit1 = block
//! u32×N  mode sizes         (operators: N row sizes, then N column sizes)
//! u32×(N+1) ranks
//! block only: u32 block_position, u32 K
//! cores in order, row-major f64
//! ```

use crate::blocktt::BlockTT;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use crate::tt::TTTrain;
use crate::ttop::TTOperator;
use ndarray::{Array3, Array4};

use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"TT1F";
const FLAG_OPERATOR: u32 = 1;
const FLAG_BLOCK: u32 = 2;

/// Any object storable in a TT1F file.
pub enum TtFile<T> {
    Train(TTTrain<T>),
    Operator(TTOperator<T>),
    Block(BlockTT<T>),
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn write_values<W: Write, T: Scalar>(w: &mut W, values: impl Iterator<Item = T>) -> Result<()> {
    for v in values {
        let f = v.to_f64().ok_or_else(|| CoreError::Format("value not representable".into()))?;
        w.write_all(&f.to_le_bytes())?;
    }
    Ok(())
}

fn read_values<R: Read, T: Scalar>(r: &mut R, count: usize) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        out.push(T::from_f64_c(f64::from_le_bytes(buf)));
    }
    Ok(out)
}

pub fn write_train<W: Write, T: Scalar>(w: &mut W, train: &TTTrain<T>) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, train.order() as u32)?;
    write_u32(w, 0)?;
    for s in train.mode_sizes() {
        write_u32(w, s as u32)?;
    }
    for r in train.ranks() {
        write_u32(w, r as u32)?;
    }
    for core in train.cores() {
        write_values(w, core.iter().copied())?;
    }
    Ok(())
}

pub fn write_operator<W: Write, T: Scalar>(w: &mut W, op: &TTOperator<T>) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, op.order() as u32)?;
    write_u32(w, FLAG_OPERATOR)?;
    for s in op.row_sizes() {
        write_u32(w, s as u32)?;
    }
    for s in op.col_sizes() {
        write_u32(w, s as u32)?;
    }
    for r in op.ranks() {
        write_u32(w, r as u32)?;
    }
    for core in op.cores() {
        write_values(w, core.iter().copied())?;
    }
    Ok(())
}

pub fn write_block<W: Write, T: Scalar>(w: &mut W, block: &BlockTT<T>) -> Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, block.order() as u32)?;
    write_u32(w, FLAG_BLOCK)?;
    for s in block.mode_sizes() {
        write_u32(w, s as u32)?;
    }
    for r in block.ranks() {
        write_u32(w, r as u32)?;
    }
    write_u32(w, block.block_position() as u32)?;
    write_u32(w, block.block_size() as u32)?;
    for core in block.left_cores() {
        write_values(w, core.iter().copied())?;
    }
    write_values(w, block.block_core().iter().copied())?;
    for core in block.right_cores() {
        write_values(w, core.iter().copied())?;
    }
    Ok(())
}

pub fn read_any<R: Read, T: Scalar>(r: &mut R) -> Result<TtFile<T>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::Format("bad magic, not a TT1F file".into()));
    }
    let n = read_u32(r)? as usize;
    if n == 0 {
        return Err(CoreError::Format("zero modes".into()));
    }
    let flags = read_u32(r)?;
    if flags & FLAG_OPERATOR != 0 {
        let rows: Vec<usize> = (0..n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let cols: Vec<usize> = (0..n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let ranks: Vec<usize> =
            (0..=n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let (r0, i, j, r1) = (ranks[k], rows[k], cols[k], ranks[k + 1]);
            let vals = read_values::<_, T>(r, r0 * i * j * r1)?;
            cores.push(
                Array4::from_shape_vec((r0, i, j, r1), vals)
                    .map_err(|e| CoreError::Format(e.to_string()))?,
            );
        }
        Ok(TtFile::Operator(TTOperator::new(cores)?))
    } else if flags & FLAG_BLOCK != 0 {
        let sizes: Vec<usize> = (0..n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let ranks: Vec<usize> =
            (0..=n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let pos = read_u32(r)? as usize;
        let k = read_u32(r)? as usize;
        if pos >= n {
            return Err(CoreError::Format("block position out of range".into()));
        }
        let mut left = Vec::new();
        for site in 0..pos {
            let vals = read_values::<_, T>(r, ranks[site] * sizes[site] * ranks[site + 1])?;
            left.push(
                Array3::from_shape_vec((ranks[site], sizes[site], ranks[site + 1]), vals)
                    .map_err(|e| CoreError::Format(e.to_string()))?,
            );
        }
        let vals = read_values::<_, T>(r, ranks[pos] * sizes[pos] * ranks[pos + 1] * k)?;
        let block = Array4::from_shape_vec((ranks[pos], sizes[pos], ranks[pos + 1], k), vals)
            .map_err(|e| CoreError::Format(e.to_string()))?;
        let mut right = Vec::new();
        for site in pos + 1..n {
            let vals = read_values::<_, T>(r, ranks[site] * sizes[site] * ranks[site + 1])?;
            right.push(
                Array3::from_shape_vec((ranks[site], sizes[site], ranks[site + 1]), vals)
                    .map_err(|e| CoreError::Format(e.to_string()))?,
            );
        }
        Ok(TtFile::Block(BlockTT::new(left, block, right)?))
    } else {
        let sizes: Vec<usize> = (0..n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let ranks: Vec<usize> =
            (0..=n).map(|_| read_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
        let mut cores = Vec::with_capacity(n);
        for site in 0..n {
            let vals = read_values::<_, T>(r, ranks[site] * sizes[site] * ranks[site + 1])?;
            cores.push(
                Array3::from_shape_vec((ranks[site], sizes[site], ranks[site + 1]), vals)
                    .map_err(|e| CoreError::Format(e.to_string()))?,
            );
        }
        Ok(TtFile::Train(TTTrain::new(cores)?))
    }
}

pub fn read_train<R: Read, T: Scalar>(r: &mut R) -> Result<TTTrain<T>> {
    match read_any(r)? {
        TtFile::Train(t) => Ok(t),
        _ => Err(CoreError::Format("expected a train, found another kind".into())),
    }
}

pub fn read_operator<R: Read, T: Scalar>(r: &mut R) -> Result<TTOperator<T>> {
    match read_any(r)? {
        TtFile::Operator(o) => Ok(o),
        _ => Err(CoreError::Format("expected an operator, found another kind".into())),
    }
}

pub fn save_train<T: Scalar>(path: &Path, train: &TTTrain<T>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_train(&mut f, train)
}

pub fn load_train<T: Scalar>(path: &Path) -> Result<TTTrain<T>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_train(&mut f)
}

pub fn save_operator<T: Scalar>(path: &Path, op: &TTOperator<T>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_operator(&mut f, op)
}

pub fn load_operator<T: Scalar>(path: &Path) -> Result<TTOperator<T>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_operator(&mut f)
}

pub fn load_any<T: Scalar>(path: &Path) -> Result<TtFile<T>> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_any(&mut f)
}
