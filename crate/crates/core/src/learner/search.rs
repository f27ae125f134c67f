//! Grid search over group elements with local pattern refinement.
//!
//! SO(3) grids use `alpha_k = 2 pi k / n_alpha`, `beta_k = pi (k + 1/2) / n_beta`,
//! `gamma_k = 2 pi k / n_gamma`. SO(2) and O(2) use `n_alpha * n_gamma` equally
//! spaced angles (both branches for O(2)).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::group::{irrep_matrix, wigner_d_matrix, GroupElement, GroupId, IrrepTable};
use crate::linalg::{cis, CMat, C64};

/// Resolution of an angular search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngleGrid {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    /// Local refinement levels after the grid pass; each halves the step.
    pub halvings: usize,
}

impl AngleGrid {
    pub const CODING: AngleGrid = AngleGrid {
        n_alpha: 16,
        n_beta: 8,
        n_gamma: 16,
        halvings: 0,
    };
    pub const DISTANCE: AngleGrid = AngleGrid {
        n_alpha: 24,
        n_beta: 12,
        n_gamma: 24,
        halvings: 3,
    };

    pub fn validate(&self) -> Result<()> {
        if self.n_alpha == 0 || self.n_beta == 0 || self.n_gamma == 0 {
            return Err(Error::InvalidArgument(
                "grid resolutions must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        (0..self.n_alpha)
            .map(|k| 2.0 * PI * k as f64 / self.n_alpha as f64)
            .collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        (0..self.n_beta)
            .map(|k| PI * (k as f64 + 0.5) / self.n_beta as f64)
            .collect()
    }

    pub fn gammas(&self) -> Vec<f64> {
        (0..self.n_gamma)
            .map(|k| 2.0 * PI * k as f64 / self.n_gamma as f64)
            .collect()
    }

    /// Circle angles for SO(2) / O(2).
    pub fn circle(&self) -> Vec<f64> {
        let n = self.n_alpha * self.n_gamma;
        (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }

    /// Every grid element of `group`.
    pub fn elements(&self, group: GroupId) -> Vec<GroupElement> {
        match group {
            GroupId::So2 => self.circle().into_iter().map(GroupElement::so2).collect(),
            GroupId::O2 => {
                let c = self.circle();
                c.iter()
                    .map(|&t| GroupElement::rotation(t))
                    .chain(c.iter().map(|&t| GroupElement::reflection(t)))
                    .collect()
            }
            GroupId::So3 => {
                let mut out = Vec::with_capacity(self.n_alpha * self.n_beta * self.n_gamma);
                for a in self.alphas() {
                    for b in self.betas() {
                        for g in self.gammas() {
                            out.push(GroupElement::euler(a, b, g));
                        }
                    }
                }
                out
            }
        }
    }
}

/// Irrep blocks of a table with the SO(3) `beta` factors of one grid cached.
pub(crate) struct RhoCache {
    table: IrrepTable,
    betas: Vec<f64>,
    dbeta: Vec<Vec<CMat>>,
}

impl RhoCache {
    pub fn new(table: &IrrepTable, grid: &AngleGrid) -> Self {
        let (betas, dbeta) = if table.group() == GroupId::So3 {
            let betas = grid.betas();
            let d = betas
                .iter()
                .map(|&b| {
                    table
                        .entries()
                        .iter()
                        .map(|xi| wigner_d_matrix(xi.label as usize, 0.0, b, 0.0))
                        .collect()
                })
                .collect();
            (betas, d)
        } else {
            (Vec::new(), Vec::new())
        };
        RhoCache {
            table: table.clone(),
            betas,
            dbeta,
        }
    }

    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn rho(&self, g: &GroupElement) -> Result<Vec<CMat>> {
        if let GroupElement::So3 { alpha, beta, gamma } = *g {
            if let Some(k) = self.betas.iter().position(|&b| b == beta) {
                return Ok(self
                    .table
                    .entries()
                    .iter()
                    .zip(&self.dbeta[k])
                    .map(|(xi, d)| {
                        let j = xi.label;
                        CMat::from_fn(d.nrows(), d.ncols(), |r, c| {
                            let m = r as i64 - j;
                            let mp = c as i64 - j;
                            cis(-(m as f64) * alpha) * d[(r, c)] * cis(-(mp as f64) * gamma)
                        })
                    })
                    .collect());
            }
        }
        self.table
            .entries()
            .iter()
            .map(|xi| irrep_matrix(xi, g))
            .collect()
    }
}

/// `sum_xi dim(xi) tr(P_xi rho_xi)`.
pub(crate) fn weighted_trace(p: &[CMat], rho: &[CMat]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (a, r) in p.iter().zip(rho) {
        let d = a.nrows();
        let mut t = C64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                t += a[(k, l)] * r[(l, k)];
            }
        }
        s += t * crate::group::plancherel_weight(d);
    }
    s
}

fn neighbours(g: &GroupElement, step: [f64; 3]) -> Vec<GroupElement> {
    match *g {
        GroupElement::So2 { theta } => vec![
            GroupElement::so2(theta - step[0]),
            GroupElement::so2(theta + step[0]),
        ],
        GroupElement::O2 { theta, reflection } => [-step[0], step[0]]
            .iter()
            .map(|d| {
                if reflection {
                    GroupElement::reflection(theta + d)
                } else {
                    GroupElement::rotation(theta + d)
                }
            })
            .collect(),
        GroupElement::So3 { alpha, beta, gamma } => {
            let mut out = Vec::with_capacity(26);
            for da in -1..=1 {
                for db in -1..=1 {
                    for dg in -1..=1 {
                        if (da, db, dg) == (0, 0, 0) {
                            continue;
                        }
                        out.push(GroupElement::euler(
                            alpha + da as f64 * step[0],
                            beta + db as f64 * step[1],
                            gamma + dg as f64 * step[2],
                        ));
                    }
                }
            }
            out
        }
    }
}

/// Maximizes `score(rho(g))` over the grid, then refines the `keep` best grid
/// points by pattern search with `grid.halvings` step halvings.
pub(crate) fn maximize<F>(
    cache: &RhoCache,
    grid: &AngleGrid,
    keep: usize,
    score: F,
) -> Result<(f64, GroupElement)>
where
    F: Fn(&[CMat]) -> f64,
{
    grid.validate()?;
    let group = cache.table().group();
    let mut scored = Vec::new();
    for g in grid.elements(group) {
        let v = score(&cache.rho(&g)?);
        scored.push((v, g));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.truncate(keep.max(1));
    let base = match group {
        GroupId::So3 => [
            2.0 * PI / grid.n_alpha as f64,
            PI / grid.n_beta as f64,
            2.0 * PI / grid.n_gamma as f64,
        ],
        _ => {
            let s = 2.0 * PI / (grid.n_alpha * grid.n_gamma) as f64;
            [s, 0.0, 0.0]
        }
    };
    let mut best = scored[0];
    for (mut v, mut g) in scored {
        let mut step = base;
        for _ in 0..grid.halvings {
            for s in &mut step {
                *s *= 0.5;
            }
            for _ in 0..32 {
                let mut moved = false;
                for h in neighbours(&g, step) {
                    let w = score(&cache.rho(&h)?);
                    if w > v {
                        v = w;
                        g = h;
                        moved = true;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        if v > best.0 {
            best = (v, g);
        }
    }
    Ok(best)
}
