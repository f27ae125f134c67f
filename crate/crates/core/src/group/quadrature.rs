//! Quadrature grids on the three groups and the forward Fourier transform.
//!
//! SO(2) and O(2) use uniform angles. SO(3) uses uniform grids in `alpha` and
//! `gamma` and Gauss-Legendre nodes in `cos(beta)`; the product rule integrates
//! products of two band-`N` functions exactly once `n_alpha, n_gamma >= 2N + 1`
//! and `n_beta >= N + 1`.

use std::f64::consts::PI;

use super::element::{GroupElement, GroupId};
use super::fourier::FourierCoefficients;
use super::irreps::{irrep_matrix, IrrepTable};
use super::wigner::wigner_little_d_matrix;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMat, C64};

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    So2 {
        n: usize,
    },
    /// `n` rotations followed by `n` reflections.
    O2 {
        n: usize,
    },
    /// Points ordered alpha-major, then beta, gamma innermost.
    So3 {
        n_alpha: usize,
        betas: Vec<f64>,
        beta_weights: Vec<f64>,
        n_gamma: usize,
    },
}

/// Product quadrature rule on a group with weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    layout: Layout,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                dp = 1.0;
                z = 0.0;
                break;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

impl QuadratureGrid {
    pub fn so2(n: usize) -> Self {
        QuadratureGrid {
            layout: Layout::So2 { n: n.max(1) },
        }
    }

    pub fn o2(n: usize) -> Self {
        QuadratureGrid {
            layout: Layout::O2 { n: n.max(1) },
        }
    }

    pub fn so3(n_alpha: usize, n_beta: usize, n_gamma: usize) -> Self {
        let (x, w) = gauss_legendre(n_beta.max(1));
        // cos(beta) = x, reversed so beta increases
        let betas = x.iter().rev().map(|c| c.clamp(-1.0, 1.0).acos()).collect();
        let beta_weights = w.iter().rev().map(|w| w / 2.0).collect();
        QuadratureGrid {
            layout: Layout::So3 {
                n_alpha: n_alpha.max(1),
                betas,
                beta_weights,
                n_gamma: n_gamma.max(1),
            },
        }
    }

    /// Smallest grid that transforms band-`bandwidth` functions exactly.
    pub fn for_bandwidth(group: GroupId, bandwidth: usize) -> Self {
        let n = 2 * bandwidth + 1;
        match group {
            GroupId::So2 => Self::so2(n),
            GroupId::O2 => Self::o2(n),
            GroupId::So3 => Self::so3(n, bandwidth + 1, n),
        }
    }

    pub fn group(&self) -> GroupId {
        match self.layout {
            Layout::So2 { .. } => GroupId::So2,
            Layout::O2 { .. } => GroupId::O2,
            Layout::So3 { .. } => GroupId::So3,
        }
    }

    pub fn len(&self) -> usize {
        match &self.layout {
            Layout::So2 { n } => *n,
            Layout::O2 { n } => 2 * n,
            Layout::So3 {
                n_alpha,
                betas,
                n_gamma,
                ..
            } => n_alpha * betas.len() * n_gamma,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest bandwidth this grid transforms exactly.
    pub fn max_bandwidth(&self) -> usize {
        match &self.layout {
            Layout::So2 { n } | Layout::O2 { n } => (n - 1) / 2,
            Layout::So3 {
                n_alpha,
                betas,
                n_gamma,
                ..
            } => ((n_alpha.min(n_gamma) - 1) / 2).min(betas.len() - 1),
        }
    }

    pub fn points(&self) -> Vec<GroupElement> {
        match &self.layout {
            Layout::So2 { n } => (0..*n)
                .map(|k| GroupElement::so2(2.0 * PI * k as f64 / *n as f64))
                .collect(),
            Layout::O2 { n } => {
                let angle = |k: usize| 2.0 * PI * k as f64 / *n as f64;
                (0..*n)
                    .map(|k| GroupElement::rotation(angle(k)))
                    .chain((0..*n).map(|k| GroupElement::reflection(angle(k))))
                    .collect()
            }
            Layout::So3 {
                n_alpha,
                betas,
                n_gamma,
                ..
            } => {
                let mut out = Vec::with_capacity(self.len());
                for a in 0..*n_alpha {
                    let alpha = 2.0 * PI * a as f64 / *n_alpha as f64;
                    for &beta in betas {
                        for c in 0..*n_gamma {
                            let gamma = 2.0 * PI * c as f64 / *n_gamma as f64;
                            out.push(GroupElement::So3 { alpha, beta, gamma });
                        }
                    }
                }
                out
            }
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match &self.layout {
            Layout::So2 { n } => vec![1.0 / *n as f64; *n],
            Layout::O2 { n } => vec![0.5 / *n as f64; 2 * n],
            Layout::So3 {
                n_alpha,
                beta_weights,
                n_gamma,
                ..
            } => {
                let s = 1.0 / (n_alpha * n_gamma) as f64;
                let mut out = Vec::with_capacity(self.len());
                for _ in 0..*n_alpha {
                    for &wb in beta_weights {
                        out.extend(std::iter::repeat_n(wb * s, *n_gamma));
                    }
                }
                out
            }
        }
    }

    /// Quadrature estimate of `\int f dmu`.
    pub fn integrate(&self, samples: &Samples) -> Result<C64> {
        if samples.grid != *self {
            return Err(Error::Shape(
                "samples were tabulated on another grid".into(),
            ));
        }
        Ok(self
            .weights()
            .iter()
            .zip(&samples.values)
            .map(|(w, v)| v * *w)
            .sum())
    }
}

/// A function tabulated on the points of a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub grid: QuadratureGrid,
    pub values: Vec<C64>,
}

impl Samples {
    pub fn new(grid: QuadratureGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Samples { grid, values })
    }

    /// `\int |f|^2 dmu` by quadrature.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }
}

pub fn tabulate<F>(grid: &QuadratureGrid, f: F) -> Samples
where
    F: Fn(&GroupElement) -> C64 + Sync + Send,
{
    let points = grid.points();
    let values = crate::par::map(&points, |_, g| f(g));
    Samples {
        grid: grid.clone(),
        values,
    }
}

/// `f_hat(xi) = \int f(g) rho_xi(g)^* dmu(g)` for every entry of `table`.
pub fn fourier_transform(samples: &Samples, table: &IrrepTable) -> Result<FourierCoefficients> {
    let grid = &samples.grid;
    if grid.group() != table.group() {
        return Err(Error::GroupMismatch {
            expected: table.group(),
            found: grid.group(),
        });
    }
    if samples.values.len() != grid.len() {
        return Err(Error::Shape("sample count does not match the grid".into()));
    }
    let bw = table.bandwidth();
    if grid.max_bandwidth() < bw {
        return Err(Error::GridTooCoarse {
            bandwidth: bw,
            detail: format!("grid resolves bandwidth {} only", grid.max_bandwidth()),
        });
    }
    match &grid.layout {
        Layout::So3 {
            n_alpha,
            betas,
            beta_weights,
            n_gamma,
        } => so3_transform(samples, table, *n_alpha, betas, beta_weights, *n_gamma),
        _ => {
            let points = grid.points();
            let weights = grid.weights();
            let blocks = table
                .entries()
                .iter()
                .map(|xi| {
                    let mut acc = CMat::zeros(xi.dim(), xi.dim());
                    for ((g, w), v) in points.iter().zip(&weights).zip(&samples.values) {
                        acc += irrep_matrix(xi, g)?.adjoint() * (v * *w);
                    }
                    Ok(acc)
                })
                .collect::<Result<Vec<_>>>()?;
            FourierCoefficients::new(table.clone(), blocks)
        }
    }
}

// (rho^*)_{m,m'} = conj(D_{m',m}) = e^{i m' alpha} d_{m,m'}(beta) e^{i m gamma}, so
// f_hat^j[(m+j, m'+j)] = sum_b w_b d_{m,m'}(beta_b) S_b(m', m),
// S_b(p, q) = mean_{a,c} f(alpha_a, beta_b, gamma_c) e^{i p alpha_a} e^{i q gamma_c}.
fn so3_transform(
    samples: &Samples,
    table: &IrrepTable,
    n_alpha: usize,
    betas: &[f64],
    beta_weights: &[f64],
    n_gamma: usize,
) -> Result<FourierCoefficients> {
    let bw = table.bandwidth() as i64;
    let width = (2 * bw + 1) as usize;
    let nb = betas.len();
    let idx = |a: usize, b: usize, c: usize| (a * nb + b) * n_gamma + c;
    let scale = 1.0 / (n_alpha * n_gamma) as f64;
    let phases = |count: usize| -> Vec<Vec<C64>> {
        (-bw..=bw)
            .map(|p| {
                (0..count)
                    .map(|a| cis(p as f64 * 2.0 * PI * a as f64 / count as f64))
                    .collect()
            })
            .collect()
    };
    let ea = phases(n_alpha);
    let eg = phases(n_gamma);
    let beta_ids: Vec<usize> = (0..nb).collect();
    let sums: Vec<CMat> = crate::par::map(&beta_ids, |_, &b| {
        // gamma sums first: h[a][q]
        let h: Vec<Vec<C64>> = (0..n_alpha)
            .map(|a| {
                (0..width)
                    .map(|qi| {
                        (0..n_gamma)
                            .map(|c| samples.values[idx(a, b, c)] * eg[qi][c])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        CMat::from_fn(width, width, |pi, qi| {
            (0..n_alpha).map(|a| h[a][qi] * ea[pi][a]).sum::<C64>() * scale
        })
    });
    let blocks = table
        .entries()
        .iter()
        .map(|xi| {
            let j = xi.label;
            let n = xi.dim();
            let ds: Vec<_> = betas
                .iter()
                .map(|&beta| wigner_little_d_matrix(j as usize, beta))
                .collect();
            CMat::from_fn(n, n, |r, c| {
                let (m, mp) = (r as i64 - j, c as i64 - j);
                let (pi, qi) = ((mp + bw) as usize, (m + bw) as usize);
                (0..nb)
                    .map(|b| sums[b][(pi, qi)] * (beta_weights[b] * ds[b][(r, c)]))
                    .sum()
            })
        })
        .collect();
    FourierCoefficients::new(table.clone(), blocks)
}
