//! Grayscale raster images with PGM (P5) and PNG I/O.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterImage {
    /// Values within 1e-12 of `[0, 1]` are clamped; anything else is rejected.
    pub fn new(width: usize, height: usize, mut data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Shape("image dimensions must be positive".into()));
        }
        if data.len() != width * height {
            return Err(Error::Shape(format!(
                "{} pixels for a {width}x{height} image",
                data.len()
            )));
        }
        for v in &mut data {
            if !v.is_finite() || *v < -1e-12 || *v > 1.0 + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "pixel value {v} outside [0, 1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(RasterImage {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        RasterImage {
            width: width.max(1),
            height: height.max(1),
            data: vec![0.0; width.max(1) * height.max(1)],
        }
    }

    /// `f(col, row)`, clamped to `[0, 1]`.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(width: usize, height: usize, mut f: F) -> Self {
        let mut img = Self::zeros(width, height);
        for r in 0..img.height {
            for c in 0..img.width {
                let v = f(c, r);
                img.data[r * img.width + c] = if v.is_finite() {
                    v.clamp(0.0, 1.0)
                } else {
                    0.0
                };
            }
        }
        img
    }

    /// Min-max rescale of arbitrary finite values into `[0, 1]`; a constant
    /// input (relative spread below 1e-12) is clamped into `[0, 1]` instead.
    pub fn from_values_rescaled(width: usize, height: usize, values: &[f64]) -> Result<Self> {
        if values.len() != width * height || width == 0 || height == 0 {
            return Err(Error::Shape(
                "value count does not match the dimensions".into(),
            ));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument("non-finite pixel value".into()));
        }
        let data = if hi - lo > 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
            values.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![lo.clamp(0.0, 1.0); values.len()]
        };
        Self::new(width, height, data)
    }

    /// 8-bit samples, `255 -> 1.0`.
    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            bytes.iter().map(|&b| b as f64 / 255.0).collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Bilinear interpolation at fractional lattice coordinates; zero outside
    /// `[0, w-1] x [0, h-1]`.
    pub fn bilinear(&self, col: f64, row: f64) -> f64 {
        let (wmax, hmax) = ((self.width - 1) as f64, (self.height - 1) as f64);
        if !(0.0..=wmax).contains(&col) || !(0.0..=hmax).contains(&row) {
            return 0.0;
        }
        let c0 = (col.floor() as usize).min(self.width.saturating_sub(2));
        let r0 = (row.floor() as usize).min(self.height.saturating_sub(2));
        let c1 = (c0 + 1).min(self.width - 1);
        let r1 = (r0 + 1).min(self.height - 1);
        let (tc, tr) = (col - c0 as f64, row - r0 as f64);
        let top = self.get(c0, r0) * (1.0 - tc) + self.get(c1, r0) * tc;
        let bottom = self.get(c0, r1) * (1.0 - tc) + self.get(c1, r1) * tc;
        top * (1.0 - tr) + bottom * tr
    }

    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect()
    }

    /// Pearson correlation of the pixel values.
    pub fn correlation(&self, other: &RasterImage) -> Result<f64> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::Shape("image sizes differ".into()));
        }
        let n = self.data.len() as f64;
        let ma = self.data.iter().sum::<f64>() / n;
        let mb = other.data.iter().sum::<f64>() / n;
        let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
        for (a, b) in self.data.iter().zip(&other.data) {
            sab += (a - ma) * (b - mb);
            saa += (a - ma) * (a - ma);
            sbb += (b - mb) * (b - mb);
        }
        if saa == 0.0 || sbb == 0.0 {
            return Ok(0.0);
        }
        Ok(sab / (saa * sbb).sqrt())
    }

    pub fn write_pgm<W: Write>(&self, w: &mut W) -> Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.to_u8())?;
        Ok(())
    }

    /// Reads a binary PGM with `maxval <= 255`; `#` comments in the header are skipped.
    pub fn read_pgm<R: BufRead>(r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut token = || -> Result<String> {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Format("truncated PGM header".into()));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        if token()? != "P5" {
            return Err(Error::Format("not a binary PGM (P5)".into()));
        }
        let mut num = |what: &str| -> Result<usize> {
            token()?
                .parse()
                .map_err(|_| Error::Format(format!("bad PGM {what}")))
        };
        let width = num("width")?;
        let height = num("height")?;
        let maxval = num("maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
        }
        // exactly one whitespace byte after maxval
        let start = pos + 1;
        let end = start + width * height;
        if end > bytes.len() {
            return Err(Error::Format("truncated PGM data".into()));
        }
        let data = bytes[start..end]
            .iter()
            .map(|&b| (b as f64 / maxval as f64).min(1.0))
            .collect();
        Self::new(width, height, data)
    }

    pub fn write_png<W: Write>(&self, w: W) -> Result<()> {
        let mut enc = png::Encoder::new(w, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        writer
            .write_image_data(&self.to_u8())
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        writer
            .finish()
            .map_err(|e| Error::Format(format!("png: {e}")))?;
        Ok(())
    }

    /// Writes PNG for a `.png` extension and PGM otherwise.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        {
            self.write_png(&mut w)?;
        } else {
            self.write_pgm(&mut w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load_pgm(path: &std::path::Path) -> Result<Self> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_pgm(&mut r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = RasterImage::from_u8(3, 2, &[0, 10, 255, 128, 7, 99]).unwrap();
        let mut buf = Vec::new();
        img.write_pgm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n3 2\n255\n"));
        let back = RasterImage::read_pgm(&mut buf.as_slice()).unwrap();
        assert_eq!(back.to_u8(), img.to_u8());
        assert_eq!(back.get(2, 0), 1.0);
    }

    #[test]
    fn pgm_with_comment_and_small_maxval() {
        let mut raw = b"P5\n# made by hand\n2 1\n15\n".to_vec();
        raw.extend([15u8, 0]);
        let img = RasterImage::read_pgm(&mut raw.as_slice()).unwrap();
        assert_eq!(img.data(), &[1.0, 0.0]);
        assert!(RasterImage::read_pgm(&mut b"P2\n1 1\n255\n0".as_slice()).is_err());
        assert!(RasterImage::read_pgm(&mut b"P5\n4 4\n255\n\x00".as_slice()).is_err());
    }

    #[test]
    fn png_header() {
        let img = RasterImage::from_fn(4, 4, |c, r| (c + r) as f64 / 6.0);
        let mut buf = Vec::new();
        img.write_png(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"\x89PNG\r\n\x1a\n");
    }

    #[test]
    fn bilinear_interpolates_and_vanishes_outside() {
        let img = RasterImage::new(2, 2, vec![0.0, 1.0, 0.5, 0.5]).unwrap();
        assert!((img.bilinear(0.5, 0.0) - 0.5).abs() < 1e-15);
        assert!((img.bilinear(1.0, 0.5) - 0.75).abs() < 1e-15);
        assert!((img.bilinear(0.5, 0.5) - 0.5).abs() < 1e-15);
        assert_eq!(img.bilinear(-0.1, 0.0), 0.0);
        assert_eq!(img.bilinear(0.0, 1.01), 0.0);
    }

    #[test]
    fn validation_and_rescale() {
        assert!(RasterImage::new(1, 1, vec![1.5]).is_err());
        assert!(RasterImage::new(0, 1, vec![]).is_err());
        let img = RasterImage::from_values_rescaled(3, 1, &[-2.0, 0.0, 2.0]).unwrap();
        assert_eq!(img.data(), &[0.0, 0.5, 1.0]);
        let flat = RasterImage::from_values_rescaled(2, 1, &[0.0, 0.0]).unwrap();
        assert_eq!(flat.data(), &[0.0, 0.0]);
        let a = RasterImage::from_fn(5, 5, |c, _| c as f64 / 4.0);
        assert!((a.correlation(&a).unwrap() - 1.0).abs() < 1e-12);
    }
}
