//! Browser bindings for three small operations of `gidl`: Wigner D
//! matrices, the image lift with an SO(3) action, and Vandermonde
//! decomposition of Toeplitz moments. No solver is compiled in.

use gidl::group::{wigner_d_matrix, GroupElement};
use gidl::lifting::{lift_image_to_so3_coeffs_with, render_atom, RasterImage};
use gidl::orbitope::{vandermonde_decompose, HermitianToeplitz};
use wasm_bindgen::prelude::*;

fn js_err(e: gidl::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Entries of `D^j(alpha, beta, gamma)` as `[re, im, re, im, ...]`, row-major.
#[wasm_bindgen]
pub fn wigner_d(j: usize, alpha: f64, beta: f64, gamma: f64) -> Vec<f64> {
    let d = wigner_d_matrix(j, alpha, beta, gamma);
    let mut out = Vec::with_capacity(2 * d.len());
    for r in 0..d.nrows() {
        for c in 0..d.ncols() {
            out.push(d[(r, c)].re);
            out.push(d[(r, c)].im);
        }
    }
    out
}

/// Lifts a grayscale image (row-major bytes) to SO(3) coefficients up to
/// `bandwidth`, rotates it by the Euler angles and renders it back as
/// `resolution x resolution` bytes.
#[wasm_bindgen]
pub fn lift_rotate_render(
    pixels: &[u8],
    width: usize,
    height: usize,
    bandwidth: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    resolution: usize,
) -> Result<Vec<u8>, JsError> {
    let img = RasterImage::from_u8(width, height, pixels).map_err(js_err)?;
    // a coarser quadrature than the library default keeps this interactive
    let f = lift_image_to_so3_coeffs_with(&img, bandwidth, 2 * bandwidth + 6).map_err(js_err)?;
    let g = GroupElement::euler(alpha, beta, gamma);
    let rotated = f.act_left_regular(&g).map_err(js_err)?;
    Ok(render_atom(&rotated, resolution).map_err(js_err)?.to_u8())
}

/// Decomposes the Toeplitz matrix of `sum_i w_i v(theta_i) v(theta_i)^*` at
/// `order` and returns the recovered `[theta, weight, ...]`.
#[wasm_bindgen]
pub fn vandermonde(order: usize, thetas: &[f64], weights: &[f64]) -> Result<Vec<f64>, JsError> {
    if thetas.len() != weights.len() {
        return Err(JsError::new("thetas and weights differ in length"));
    }
    let atoms: Vec<(f64, f64)> = thetas.iter().copied().zip(weights.iter().copied()).collect();
    let t = HermitianToeplitz::from_atoms(order, &atoms);
    let dec = vandermonde_decompose(&t).map_err(js_err)?;
    Ok(dec.into_iter().flat_map(|(th, w)| [th, w]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wigner_identity() {
        let d = wigner_d(1, 0.0, 0.0, 0.0);
        assert_eq!(d.len(), 18);
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[8] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vandermonde_recovers_atoms() {
        let out = vandermonde(4, &[0.5, 2.0], &[0.3, 0.7]).unwrap();
        assert_eq!(out.len(), 4);
        let mut pairs: Vec<_> = out.chunks(2).map(|p| (p[0], p[1])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((pairs[0].0 - 0.5).abs() < 1e-6 && (pairs[1].1 - 0.7).abs() < 1e-6);
    }

    #[test]
    fn lift_renders() {
        let px: Vec<u8> = (0..16 * 16).map(|i| if i % 16 == 8 { 255 } else { 0 }).collect();
        let out = lift_rotate_render(&px, 16, 16, 2, 0.3, 0.4, 0.0, 8).unwrap();
        assert_eq!(out.len(), 64);
        assert!(out.iter().any(|&v| v > 0));
    }
}
