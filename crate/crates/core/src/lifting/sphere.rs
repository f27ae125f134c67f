//! Images on the sphere and their lifts to SO(3).
//!
//! A raster covers the planar square `[-s, s]^2`, `s = 1/sqrt(2)`, with
//! pixel centres on a uniform lattice (row 0 at `y = s`). A unit vector
//! `u = (x, y, z)` reads the image at `(x / (1 + z), y / (1 + z))`, and the
//! lift is `f(R) = h(R e1)`, i.e. `f` only sees the first column of `R`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::group::{
    enumerate_irreps, fourier_transform, irrep_matrix, tabulate, FourierCoefficients, GroupElement,
    GroupId, IrrepIndex, QuadratureGrid,
};
use crate::linalg::{CMat, C64};

use super::homogeneous::frame_with_axis;
use super::raster::RasterImage;

/// Half-width of the planar chart domain.
pub const CHART_HALF_WIDTH: f64 = FRAC_1_SQRT_2;

/// Lattice coordinates `(col, row)` of the planar point `(x, y)`.
pub fn plane_to_lattice(width: usize, height: usize, x: f64, y: f64) -> (f64, f64) {
    let s = CHART_HALF_WIDTH;
    let col = (x + s) / (2.0 * s) * (width.max(2) - 1) as f64;
    let row = (s - y) / (2.0 * s) * (height.max(2) - 1) as f64;
    (col, row)
}

/// Planar point of the pixel centre `(col, row)`.
pub fn lattice_to_plane(width: usize, height: usize, col: usize, row: usize) -> (f64, f64) {
    let s = CHART_HALF_WIDTH;
    let x = -s + 2.0 * s * col as f64 / (width.max(2) - 1) as f64;
    let y = s - 2.0 * s * row as f64 / (height.max(2) - 1) as f64;
    (x, y)
}

/// An image read on the sphere through the planar chart; zero off the chart.
#[derive(Debug, Clone, Copy)]
pub struct SphericalFunction<'a> {
    image: &'a RasterImage,
}

impl<'a> SphericalFunction<'a> {
    pub fn new(image: &'a RasterImage) -> Self {
        SphericalFunction { image }
    }

    pub fn eval(&self, u: &Vector3<f64>) -> f64 {
        let d = 1.0 + u[2];
        if d <= 1e-12 {
            return 0.0;
        }
        let (x, y) = (u[0] / d, u[1] / d);
        let s = CHART_HALF_WIDTH;
        if x.abs() > s || y.abs() > s {
            return 0.0;
        }
        let (c, r) = plane_to_lattice(self.image.width(), self.image.height(), x, y);
        self.image.bilinear(c, r)
    }
}

/// Inverse of the reading chart: planar point to the unit sphere.
pub fn stereographic_inverse(x: f64, y: f64) -> Vector3<f64> {
    let r2 = x * x + y * y;
    Vector3::new(2.0 * x, 2.0 * y, 1.0 - r2) / (1.0 + r2)
}

/// Default quadrature bandwidth used to integrate lifted images.
pub fn default_lift_quadrature(bandwidth: usize) -> usize {
    (4 * bandwidth).max(40)
}

pub fn lift_image_to_so3_coeffs(
    img: &RasterImage,
    bandwidth: usize,
) -> Result<FourierCoefficients> {
    lift_image_to_so3_coeffs_with(img, bandwidth, default_lift_quadrature(bandwidth))
}

/// Fourier coefficients up to `bandwidth` of `f(R) = h(R e1)`, integrated on
/// an SO(3) grid resolving `quadrature_bandwidth`.
pub fn lift_image_to_so3_coeffs_with(
    img: &RasterImage,
    bandwidth: usize,
    quadrature_bandwidth: usize,
) -> Result<FourierCoefficients> {
    let table = enumerate_irreps(GroupId::So3, bandwidth);
    if img.data().iter().all(|&v| v == 0.0) {
        return Ok(FourierCoefficients::zeros(&table));
    }
    let grid = QuadratureGrid::for_bandwidth(GroupId::So3, quadrature_bandwidth.max(bandwidth));
    let h = SphericalFunction::new(img);
    let samples = tabulate(&grid, |g| {
        let u = g.rotation_matrix().column(0).into_owned();
        C64::new(h.eval(&u), 0.0)
    });
    let raw = fourier_transform(&samples, &table)?;
    project_first_column(&raw)
}

/// Rotation by `t` about e1.
fn about_e1(t: f64) -> GroupElement {
    let (sn, c) = t.sin_cos();
    GroupElement::from_rotation_matrix(&Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -sn, 0.0, sn, c))
}

/// Projects every block onto `{X : X = rho(s)^* X}` for all rotations `s`
/// about e1, i.e. onto functions of the first column. The average over
/// `2j + 2` equally spaced angles is exact at degree `j`.
pub fn project_first_column(f: &FourierCoefficients) -> Result<FourierCoefficients> {
    let mut out = f.clone();
    for (xi, b) in f.table().entries().iter().zip(out.blocks_mut()) {
        let k = 2 * xi.label as usize + 2;
        let mut p = CMat::zeros(b.nrows(), b.nrows());
        for i in 0..k {
            p += irrep_matrix(xi, &about_e1(2.0 * PI * i as f64 / k as f64))?.adjoint();
        }
        *b = p * &*b * C64::new(1.0 / k as f64, 0.0);
    }
    Ok(out)
}

/// Largest violation of `X_{-m,-m'} = (-1)^(m+m') conj(X_{m,m'})` over all blocks.
pub fn real_symmetry_deviation(f: &FourierCoefficients) -> Result<f64> {
    if f.table().group() != GroupId::So3 {
        return Err(Error::GroupMismatch {
            expected: GroupId::So3,
            found: f.table().group(),
        });
    }
    let mut dev: f64 = 0.0;
    for (xi, b) in f.table().entries().iter().zip(f.blocks()) {
        let j = xi.label;
        for m in -j..=j {
            for mp in -j..=j {
                let a = b[((m + j) as usize, (mp + j) as usize)];
                let c = b[((-m + j) as usize, (-mp + j) as usize)];
                let sign = if (m + mp).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                dev = dev.max((c - a.conj() * sign).norm());
            }
        }
    }
    Ok(dev)
}

/// The frame flip `(u | v | w) -> (u | -v | -w)`: rotation by pi about e1.
pub fn frame_flip() -> GroupElement {
    GroupElement::from_rotation_matrix(&Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0))
}

/// `max ||X - rho(s)^* X||_F` over blocks: zero when the function is
/// invariant under right multiplication by `s`.
pub fn right_invariance_deviation(f: &FourierCoefficients, s: &GroupElement) -> Result<f64> {
    let mut dev: f64 = 0.0;
    for (xi, b) in f.table().entries().iter().zip(f.blocks()) {
        let rho = irrep_matrix(xi, s)?;
        dev = dev.max((b - rho.adjoint() * b).norm());
    }
    Ok(dev)
}

/// Real dimension, per `j`, of coefficient blocks of real functions that
/// are invariant under the frame flip: `(2j+1) * rank((I + rho(flip)^*) / 2)`.
pub fn lift_block_dimension(j: usize) -> usize {
    let xi = IrrepIndex::new(GroupId::So3, j as i64).expect("valid label");
    let rho = irrep_matrix(&xi, &frame_flip()).expect("SO(3) element");
    let trace: C64 = (CMat::identity(2 * j + 1, 2 * j + 1) + rho.adjoint()).trace() / 2.0;
    (2 * j + 1) * trace.re.round() as usize
}

/// Ambient real dimension of lifted images up to `bandwidth`.
pub fn lift_ambient_dimension(bandwidth: usize) -> usize {
    (0..=bandwidth).map(lift_block_dimension).sum()
}

/// Planar chart used when rendering an atom back to a raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderChart {
    /// Inverse of the chart used by the lift.
    #[default]
    Stereographic,
    /// `u = (x, y, sqrt(1 - x^2 - y^2))`.
    Orthographic,
}

impl std::str::FromStr for RenderChart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stereographic" => Ok(RenderChart::Stereographic),
            "orthographic" => Ok(RenderChart::Orthographic),
            other => Err(Error::InvalidArgument(format!("unknown chart '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub chart: RenderChart,
    /// Equator frames averaged per pixel; 0 picks `2N + 2`.
    pub frames: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            chart: RenderChart::Stereographic,
            frames: 0,
        }
    }
}

/// `h(u)`: mean of `Re phi(u | v | u x v)` over equally spaced `v` on the
/// equator orthogonal to `u`.
pub fn spherical_average(
    phi: &FourierCoefficients,
    u: &Vector3<f64>,
    frames: usize,
) -> Result<f64> {
    let f = frame_with_axis(u);
    let (v0, v1, uu) = (f.column(0), f.column(1), f.column(2));
    let mut acc = 0.0;
    for k in 0..frames {
        let t = 2.0 * PI * k as f64 / frames as f64;
        let v = v0 * t.cos() + v1 * t.sin();
        let w = uu.cross(&v);
        let r = Matrix3::from_columns(&[uu.into_owned(), v, w]);
        acc += phi.synthesize(&GroupElement::from_rotation_matrix(&r))?.re;
    }
    Ok(acc / frames as f64)
}

/// Raw `h` values on a `resolution x resolution` lattice over the chart square.
pub fn render_values(
    phi: &FourierCoefficients,
    resolution: usize,
    opts: RenderOptions,
) -> Result<Vec<f64>> {
    if phi.table().group() != GroupId::So3 {
        return Err(Error::GroupMismatch {
            expected: GroupId::So3,
            found: phi.table().group(),
        });
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let frames = if opts.frames == 0 {
        2 * phi.table().bandwidth() + 2
    } else {
        opts.frames
    };
    let pixels: Vec<(usize, usize)> = (0..resolution)
        .flat_map(|r| (0..resolution).map(move |c| (c, r)))
        .collect();
    let vals = crate::par::map(&pixels, |_, &(c, r)| {
        let (x, y) = lattice_to_plane(resolution, resolution, c, r);
        let u = match opts.chart {
            RenderChart::Stereographic => stereographic_inverse(x, y),
            RenderChart::Orthographic => Vector3::new(x, y, (1.0 - x * x - y * y).max(0.0).sqrt()),
        };
        spherical_average(phi, &u, frames)
    });
    vals.into_iter().collect()
}

/// Rendered atom rescaled to `[0, 1]` for display.
pub fn render_atom(phi: &FourierCoefficients, resolution: usize) -> Result<RasterImage> {
    render_atom_with(phi, resolution, RenderOptions::default())
}

pub fn render_atom_with(
    phi: &FourierCoefficients,
    resolution: usize,
    opts: RenderOptions,
) -> Result<RasterImage> {
    let vals = render_values(phi, resolution, opts)?;
    RasterImage::from_values_rescaled(resolution, resolution, &vals)
}
