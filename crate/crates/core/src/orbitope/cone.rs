//! Conic variables for (multilevel) Hermitian Toeplitz matrices.
//!
//! A matrix over multi-indices `x = (x_1..x_r)`, `x_k in 0..n_k`, whose entry
//! `(x, y)` depends only on the difference `x - y` and satisfies
//! `t_{-d} = conj(t_d)`. One complex variable pair is declared per
//! difference class, so the Toeplitz ties never appear as constraints.

use std::collections::HashMap;

use crate::conic::{Affine, ConicProblem, PsdBlock};
use crate::linalg::{CMat, C64};

/// Row-major flattening of a multi-index.
pub fn flatten(idx: &[usize], sizes: &[usize]) -> usize {
    idx.iter().zip(sizes).fold(0, |acc, (&i, &n)| acc * n + i)
}

pub fn unflatten(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = flat % sizes[k];
        flat /= sizes[k];
    }
    out
}

/// All multi-indices of the given mode sizes in row-major order.
pub fn multi_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total).map(|f| unflatten(f, sizes)).collect()
}

/// First nonzero component positive (or all zero).
fn is_canonical(d: &[i64]) -> bool {
    d.iter().find(|&&v| v != 0).is_none_or(|&v| v > 0)
}

#[derive(Debug, Clone)]
pub struct ToeplitzVars {
    sizes: Vec<usize>,
    /// canonical difference -> (re var, im var); the zero difference has no im var.
    vars: HashMap<Vec<i64>, (usize, Option<usize>)>,
}

impl ToeplitzVars {
    /// Declares the generator variables in `p`.
    pub fn declare(p: &mut ConicProblem, sizes: &[usize]) -> Self {
        let ranges: Vec<usize> = sizes.iter().map(|&n| 2 * n - 1).collect();
        let mut vars = HashMap::new();
        for f in 0..ranges.iter().product() {
            let idx = unflatten(f, &ranges);
            let d: Vec<i64> = idx
                .iter()
                .zip(sizes)
                .map(|(&i, &n)| i as i64 - (n as i64 - 1))
                .collect();
            if !is_canonical(&d) {
                continue;
            }
            let zero = d.iter().all(|&v| v == 0);
            let re = p.add_var();
            let im = if zero { None } else { Some(p.add_var()) };
            vars.insert(d, (re, im));
        }
        ToeplitzVars {
            sizes: sizes.to_vec(),
            vars,
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().product()
    }

    /// `(re, im)` of `t_d` as affine expressions.
    pub fn entry(&self, d: &[i64]) -> (Affine, Affine) {
        if is_canonical(d) {
            let (re, im) = self.vars[d];
            (Affine::var(re), im.map(Affine::var).unwrap_or_default())
        } else {
            let neg: Vec<i64> = d.iter().map(|v| -v).collect();
            let (re, im) = self.vars[&neg];
            (
                Affine::var(re),
                im.map(|v| Affine::var(v).scaled(-1.0)).unwrap_or_default(),
            )
        }
    }

    /// Variable holding the (real) common diagonal `t_0`.
    pub fn diagonal_var(&self) -> usize {
        self.vars[&vec![0; self.sizes.len()]].0
    }

    /// Every difference vector with its variables, for diagnostics and tests.
    pub fn differences(&self) -> impl Iterator<Item = (&Vec<i64>, &(usize, Option<usize>))> {
        self.vars.iter()
    }

    fn diff(&self, a: usize, b: usize) -> Vec<i64> {
        let x = unflatten(a, &self.sizes);
        let y = unflatten(b, &self.sizes);
        x.iter()
            .zip(&y)
            .map(|(&p, &q)| p as i64 - q as i64)
            .collect()
    }

    /// Real embedding of the full matrix as a PSD block.
    pub fn psd_block(&self) -> PsdBlock {
        PsdBlock::hermitian(self.dim(), |a, b| self.entry(&self.diff(a, b)))
    }

    /// Real embedding of `[[t, h^*], [h, Z]]` with scalar variable `t` and a
    /// column `h` of affine `(re, im)` pairs, used for norm-type programs.
    pub fn bordered_block(&self, t: usize, h: &[(Affine, Affine)]) -> PsdBlock {
        assert_eq!(h.len(), self.dim());
        PsdBlock::hermitian(self.dim() + 1, |a, b| match (a, b) {
            (0, 0) => (Affine::var(t), Affine::zero()),
            // entry (0, b) = conj(h_{b-1})
            (0, b) => (h[b - 1].0.clone(), h[b - 1].1.scaled(-1.0)),
            (a, b) => self.entry(&self.diff(a - 1, b - 1)),
        })
    }

    /// Numeric generator `d -> t_d` at a solution.
    pub fn value(&self, x: &[f64], d: &[i64]) -> C64 {
        let (re, im) = self.entry(d);
        C64::new(re.eval(x), im.eval(x))
    }

    pub fn matrix_value(&self, x: &[f64]) -> CMat {
        let n = self.dim();
        CMat::from_fn(n, n, |a, b| self.value(x, &self.diff(a, b)))
    }
}
