//! Digit images lifted to SO(3) and a single atom learned with the one-sparse coder.

use std::path::{Path, PathBuf};

use super::idx::{parse_idx_images_at, parse_idx_labels};
use crate::error::{Error, Result};
use crate::group::FourierCoefficients;
use crate::learner::{
    code_so3_one_sparse, fit, AngleGrid, CodingMode, Dictionary, FitConfig, TraceRow,
};
use crate::lifting::{lift_image_to_so3_coeffs, render_atom, RasterImage};

pub const IMAGES_FILE: &str = "train-images-idx3-ubyte";
pub const LABELS_FILE: &str = "train-labels-idx1-ubyte";

/// Side of the rendered atom image.
pub const RENDER_RESOLUTION: usize = 64;

#[derive(Debug, Clone)]
pub struct MnistOutput {
    pub dictionary: Dictionary,
    pub rendered: RasterImage,
    pub trace: Vec<TraceRow>,
    /// Indices into the IDX file of the images used.
    pub indices: Vec<usize>,
    /// Every image's coordinate-descent objective was non-increasing under
    /// the learned dictionary.
    pub monotone: bool,
}

fn locate(dir: &Path, name: &str) -> Result<PathBuf> {
    // both the canonical name and the dotted variant some mirrors use
    let dotted = name.replacen("-idx", ".idx", 1);
    [name.to_string(), dotted]
        .iter()
        .map(|n| dir.join(n))
        .find(|p| p.is_file())
        .ok_or_else(|| {
            Error::InvalidArgument(format!("{} not found (uncompressed)", dir.join(name).display()))
        })
}

/// The first `count` training images labelled `digit`.
pub fn load_digits(data_dir: &Path, digit: u8, count: usize) -> Result<(Vec<usize>, Vec<RasterImage>)> {
    if digit > 9 {
        return Err(Error::InvalidArgument(format!("digit {digit}")));
    }
    let labels = parse_idx_labels(&std::fs::read(locate(data_dir, LABELS_FILE)?)?)?;
    let indices: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == digit)
        .map(|(i, _)| i)
        .take(count)
        .collect();
    if indices.len() < count {
        return Err(Error::InvalidArgument(format!(
            "only {} images of digit {digit}",
            indices.len()
        )));
    }
    let images = parse_idx_images_at(&std::fs::read(locate(data_dir, IMAGES_FILE)?)?, &indices)?;
    Ok((indices, images))
}

/// Whether the one-sparse coder decreases monotonically on every datapoint.
pub fn one_sparse_monotone(
    data: &[FourierCoefficients],
    dict: &Dictionary,
    grid: &AngleGrid,
    sweeps: usize,
) -> Result<bool> {
    let ok = crate::par::map(data, |_, y| -> Result<bool> {
        let h = code_so3_one_sparse(y, dict, grid, sweeps)?.history;
        Ok(h.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0)))
    });
    ok.into_iter()
        .try_fold(true, |acc, r| r.map(|b| acc && b))
}

/// Learns one atom from already-loaded images.
pub fn fit_images(
    images: &[RasterImage],
    bandwidth: usize,
    iters: usize,
    seed: u64,
) -> Result<(Dictionary, Vec<TraceRow>, bool, RasterImage)> {
    if images.is_empty() {
        return Err(Error::InvalidArgument("no images".into()));
    }
    let data = crate::par::map(images, |_, img| lift_image_to_so3_coeffs(img, bandwidth))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = FitConfig::new(CodingMode::So3OneSparse);
    cfg.iterations = iters;
    cfg.seed = seed;
    let out = fit(&data, &cfg, None)?;
    let monotone = one_sparse_monotone(&data, &out.dictionary, &cfg.coding_grid, cfg.sweeps)?;
    let rendered = render_atom(&out.dictionary.atoms()[0], RENDER_RESOLUTION)?;
    Ok((out.dictionary, out.trace, monotone, rendered))
}

pub fn run_mnist(
    digit: u8,
    count: usize,
    bandwidth: usize,
    iters: usize,
    seed: u64,
    data_dir: &Path,
) -> Result<MnistOutput> {
    let (indices, images) = load_digits(data_dir, digit, count)?;
    let (dictionary, trace, monotone, rendered) = fit_images(&images, bandwidth, iters, seed)?;
    Ok(MnistOutput {
        dictionary,
        rendered,
        trace,
        indices,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::idx::{encode_idx_images, encode_idx_labels};

    fn bar(n: usize, slope: f64) -> RasterImage {
        RasterImage::from_fn(n, n, |c, r| {
            let (x, y) = (c as f64 / (n - 1) as f64, r as f64 / (n - 1) as f64);
            let d = (x - 0.5 - slope * (y - 0.5)).abs();
            (-d * d / 0.005).exp()
        })
    }

    #[test]
    fn loads_requested_digit() {
        let dir = tempfile::tempdir().unwrap();
        let imgs: Vec<_> = (0..4).map(|i| bar(28, 0.1 * i as f64)).collect();
        std::fs::write(dir.path().join(IMAGES_FILE), encode_idx_images(&imgs).unwrap()).unwrap();
        std::fs::write(dir.path().join(LABELS_FILE), encode_idx_labels(&[1, 7, 1, 1])).unwrap();
        let (idx, got) = load_digits(dir.path(), 1, 2).unwrap();
        assert_eq!(idx, vec![0, 2]);
        assert_eq!(got[1].to_u8(), imgs[2].to_u8());
        assert!(load_digits(dir.path(), 1, 4).is_err());
        assert!(load_digits(dir.path(), 3, 1).is_err());
        assert!(load_digits(&dir.path().join("missing"), 1, 1).is_err());
    }

    #[test]
    fn tiny_fit_renders_nonzero_atom() {
        let imgs: Vec<_> = (0..3).map(|i| bar(28, 0.2 * i as f64 - 0.2)).collect();
        let (dict, trace, monotone, img) = fit_images(&imgs, 2, 2, 1).unwrap();
        assert_eq!(dict.q(), 1);
        assert_eq!(trace.len(), 2);
        assert!(monotone);
        assert!(img.data().iter().any(|&v| v > 0.0));
    }
}
