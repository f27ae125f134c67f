//! Binary container and CSV dump for Fourier coefficients.
//!
//! Container layout (little-endian):
//!
//! ```text
//! magic   b"GIFC"
//! version u8 (= 1)
//! group   u8 (GroupId::tag)
//! bw      u32
//! count   u32
//! count x { label i32, dim u32, dim*dim x (re f64, im f64) row-major }
//! ```
//!
//! A dictionary is a sequence of containers written back to back.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::element::GroupId;
use super::fourier::FourierCoefficients;
use super::irreps::IrrepTable;
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

const MAGIC: &[u8; 4] = b"GIFC";
const VERSION: u8 = 1;

pub fn write_coefficients<W: Write>(w: &mut W, f: &FourierCoefficients) -> Result<()> {
    let table = f.table();
    w.write_all(MAGIC)?;
    w.write_u8(VERSION)?;
    w.write_u8(table.group().tag())?;
    w.write_u32::<LittleEndian>(table.bandwidth() as u32)?;
    w.write_u32::<LittleEndian>(table.len() as u32)?;
    for (xi, b) in table.entries().iter().zip(f.blocks()) {
        w.write_i32::<LittleEndian>(xi.label as i32)?;
        w.write_u32::<LittleEndian>(xi.dim() as u32)?;
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                w.write_f64::<LittleEndian>(b[(r, c)].re)?;
                w.write_f64::<LittleEndian>(b[(r, c)].im)?;
            }
        }
    }
    Ok(())
}

/// Reads one container. Returns `Ok(None)` on a clean end of stream.
pub fn read_coefficients_opt<R: Read>(r: &mut R) -> Result<Option<FourierCoefficients>> {
    let mut magic = [0u8; 4];
    let mut got = 0;
    while got < 4 {
        let n = r.read(&mut magic[got..])?;
        if n == 0 {
            break;
        }
        got += n;
    }
    if got == 0 {
        return Ok(None);
    }
    if got < 4 || &magic != MAGIC {
        return Err(Error::Format("bad coefficient container magic".into()));
    }
    let version = r.read_u8()?;
    if version != VERSION {
        return Err(Error::Format(format!(
            "unsupported container version {version}"
        )));
    }
    let tag = r.read_u8()?;
    let group =
        GroupId::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown group tag {tag}")))?;
    let bw = r.read_u32::<LittleEndian>()? as usize;
    let count = r.read_u32::<LittleEndian>()? as usize;
    let mut labels = Vec::with_capacity(count.min(4096));
    let mut blocks = Vec::with_capacity(count.min(4096));
    for _ in 0..count {
        let label = r.read_i32::<LittleEndian>()? as i64;
        let dim = r.read_u32::<LittleEndian>()? as usize;
        if dim > 4096 {
            return Err(Error::Format(format!("implausible block size {dim}")));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim * dim {
            let re = r.read_f64::<LittleEndian>()?;
            let im = r.read_f64::<LittleEndian>()?;
            data.push(C64::new(re, im));
        }
        labels.push(label);
        blocks.push(CMat::from_row_slice(dim, dim, &data));
    }
    let table = IrrepTable::from_labels(group, &labels)?;
    if table.bandwidth() != bw {
        return Err(Error::Format(format!(
            "header bandwidth {bw} disagrees with labels (max {})",
            table.bandwidth()
        )));
    }
    FourierCoefficients::new(table, blocks).map(Some)
}

pub fn read_coefficients<R: Read>(r: &mut R) -> Result<FourierCoefficients> {
    read_coefficients_opt(r)?.ok_or_else(|| Error::Format("empty stream".into()))
}

pub fn write_many<W: Write>(w: &mut W, items: &[FourierCoefficients]) -> Result<()> {
    items.iter().try_for_each(|f| write_coefficients(w, f))
}

pub fn read_many<R: Read>(r: &mut R) -> Result<Vec<FourierCoefficients>> {
    let mut out = Vec::new();
    while let Some(f) = read_coefficients_opt(r)? {
        out.push(f);
    }
    Ok(out)
}

pub fn to_bytes(f: &FourierCoefficients) -> Vec<u8> {
    let mut buf = Vec::new();
    write_coefficients(&mut buf, f).expect("writing to a Vec cannot fail");
    buf
}

pub fn from_bytes(bytes: &[u8]) -> Result<FourierCoefficients> {
    read_coefficients(&mut &bytes[..])
}

/// `irrep,row,col,re,im` with a header line.
pub fn write_csv<W: Write>(w: &mut W, f: &FourierCoefficients) -> Result<()> {
    writeln!(w, "irrep,row,col,re,im")?;
    for (xi, b) in f.table().entries().iter().zip(f.blocks()) {
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                let z = b[(r, c)];
                writeln!(w, "{},{},{},{:e},{:e}", xi.label, r, c, z.re, z.im)?;
            }
        }
    }
    Ok(())
}
