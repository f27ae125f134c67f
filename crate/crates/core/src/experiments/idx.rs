//! IDX files: big-endian magic, counts, then unsigned bytes.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};

use crate::error::{Error, Result};
use crate::lifting::RasterImage;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn header(cur: &mut Cursor<&[u8]>, want: u32) -> Result<()> {
    let magic = cur
        .read_u32::<BigEndian>()
        .map_err(|_| Error::Format("IDX file shorter than its magic number".into()))?;
    if magic != want {
        return Err(Error::Format(format!(
            "IDX magic {magic:#010x}, expected {want:#010x}"
        )));
    }
    Ok(())
}

fn count(cur: &mut Cursor<&[u8]>, what: &str) -> Result<usize> {
    cur.read_u32::<BigEndian>()
        .map(|v| v as usize)
        .map_err(|_| Error::Format(format!("truncated IDX header ({what})")))
}

/// `(count, rows, cols, pixel body)` of an IDX3 buffer, with the body length checked.
fn image_layout(bytes: &[u8]) -> Result<(usize, usize, usize, &[u8])> {
    let mut cur = Cursor::new(bytes);
    header(&mut cur, IMAGES_MAGIC)?;
    let n = count(&mut cur, "count")?;
    let rows = count(&mut cur, "rows")?;
    let cols = count(&mut cur, "cols")?;
    let size = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Format("IDX image size overflows".into()))?;
    let body = &bytes[cur.position() as usize..];
    if size == 0 || body.len() < n.saturating_mul(size) {
        return Err(Error::Format(format!(
            "IDX body has {} bytes, header promises {n} images of {rows}x{cols}",
            body.len()
        )));
    }
    Ok((n, rows, cols, &body[..n * size]))
}

/// Images of an IDX3 byte buffer, intensities `byte / 255`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<RasterImage>> {
    let (_, rows, cols, body) = image_layout(bytes)?;
    body.chunks_exact(rows * cols)
        .map(|px| RasterImage::from_u8(cols, rows, px))
        .collect()
}

/// Only the images at `indices`, in that order.
pub fn parse_idx_images_at(bytes: &[u8], indices: &[usize]) -> Result<Vec<RasterImage>> {
    let (n, rows, cols, body) = image_layout(bytes)?;
    let size = rows * cols;
    indices
        .iter()
        .map(|&i| {
            if i >= n {
                return Err(Error::Format(format!("image {i} of {n}")));
            }
            RasterImage::from_u8(cols, rows, &body[i * size..(i + 1) * size])
        })
        .collect()
}

/// Labels of an IDX1 byte buffer.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut cur = Cursor::new(bytes);
    header(&mut cur, LABELS_MAGIC)?;
    let n = count(&mut cur, "count")?;
    let mut out = Vec::with_capacity(n);
    cur.take(n as u64).read_to_end(&mut out)?;
    if out.len() != n {
        return Err(Error::Format(format!(
            "IDX body has {} labels, header promises {n}",
            out.len()
        )));
    }
    Ok(out)
}

pub fn parse_idx(path: &Path) -> Result<Vec<RasterImage>> {
    parse_idx_images(&std::fs::read(path)?)
}

pub fn parse_idx_label_file(path: &Path) -> Result<Vec<u8>> {
    parse_idx_labels(&std::fs::read(path)?)
}

/// Encodes images as IDX3 (all images must share one size).
pub fn encode_idx_images(images: &[RasterImage]) -> Result<Vec<u8>> {
    let (w, h) = images
        .first()
        .map(|i| (i.width(), i.height()))
        .unwrap_or((0, 0));
    if images.iter().any(|i| (i.width(), i.height()) != (w, h)) {
        return Err(Error::Shape("IDX images must share one size".into()));
    }
    let mut out = Vec::new();
    for v in [IMAGES_MAGIC, images.len() as u32, h as u32, w as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for i in images {
        out.extend(i.to_u8());
    }
    Ok(out)
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
