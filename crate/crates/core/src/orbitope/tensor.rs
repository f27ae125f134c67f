//! Block-Toeplitz tensors and the SO(3) relaxation.
//!
//! The atom tensor `V = v(a) (x) v(b) (x) v(c) (x) conj(v(a)) (x) conj(v(b)) (x) conj(v(c))`
//! has entry `e^{i <x - y, (a, b, c)>}` at `(x, y)`, so it is a three-level
//! Hermitian Toeplitz matrix generated by `t_d = e^{i <d, (a, b, c)>}`.
//! Every Wigner D entry is a fixed linear combination of such generator
//! entries; the relaxation replaces the atom tensors by arbitrary PSD
//! block-Toeplitz tensors.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conic::{self, Affine, ConicProblem};
use crate::error::{Error, Result};
use crate::group::{wigner_d_matrix, wigner_little_d, BlockDiagOperator, GroupId};
use crate::linalg::{cis, frob_norm, CMat, C64};

use super::cone::{flatten, multi_indices, unflatten, ToeplitzVars};

/// Square tensor over multi-indices of the given mode sizes whose entry
/// `(x, y)` depends only on `x - y`, with `t_{-d} = conj(t_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockToeplitzTensor {
    sizes: Vec<usize>,
    /// Generator over the difference grid `prod (2 n_k - 1)`, row-major.
    generator: Vec<C64>,
}

impl BlockToeplitzTensor {
    fn ranges(sizes: &[usize]) -> Vec<usize> {
        sizes.iter().map(|&n| 2 * n - 1).collect()
    }

    fn gen_index(&self, d: &[i64]) -> usize {
        let shifted: Vec<usize> = d
            .iter()
            .zip(&self.sizes)
            .map(|(&v, &n)| (v + n as i64 - 1) as usize)
            .collect();
        flatten(&shifted, &Self::ranges(&self.sizes))
    }

    /// Builds from a generator function; only the values at differences with
    /// a positive leading nonzero component (and at zero) are used, the rest
    /// follow by conjugation.
    pub fn from_generator<F: Fn(&[i64]) -> C64>(sizes: &[usize], f: F) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Shape("mode sizes must be positive".into()));
        }
        let ranges = Self::ranges(sizes);
        let total: usize = ranges.iter().product();
        let mut generator = vec![C64::new(0.0, 0.0); total];
        for (flat, slot) in generator.iter_mut().enumerate() {
            let d: Vec<i64> = unflatten(flat, &ranges)
                .iter()
                .zip(sizes)
                .map(|(&i, &n)| i as i64 - (n as i64 - 1))
                .collect();
            let lead = d.iter().find(|&&v| v != 0).copied().unwrap_or(0);
            *slot = if lead > 0 {
                f(&d)
            } else if lead < 0 {
                let neg: Vec<i64> = d.iter().map(|v| -v).collect();
                f(&neg).conj()
            } else {
                C64::new(f(&d).re, 0.0)
            };
        }
        Ok(BlockToeplitzTensor {
            sizes: sizes.to_vec(),
            generator,
        })
    }

    /// The lifted atom `V` for angles `theta` (one per mode).
    pub fn atom(sizes: &[usize], theta: &[f64]) -> Result<Self> {
        if theta.len() != sizes.len() {
            return Err(Error::Shape("one angle per mode".into()));
        }
        Self::from_generator(sizes, |d| {
            cis(d.iter().zip(theta).map(|(&k, &t)| k as f64 * t).sum())
        })
    }

    /// Reads `mat(Z)`, checking the block-Toeplitz ties and Hermitian symmetry to `tol`.
    pub fn from_matrix(sizes: &[usize], m: &CMat, tol: f64) -> Result<Self> {
        let dim: usize = sizes.iter().product();
        if m.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "expected {dim}x{dim}, got {:?}",
                m.shape()
            )));
        }
        let mut seen: HashMap<Vec<i64>, C64> = HashMap::new();
        let idx = multi_indices(sizes);
        let mut dev: f64 = 0.0;
        for (a, x) in idx.iter().enumerate() {
            for (b, y) in idx.iter().enumerate() {
                let d: Vec<i64> = x
                    .iter()
                    .zip(y)
                    .map(|(&p, &q)| p as i64 - q as i64)
                    .collect();
                let v = m[(a, b)];
                match seen.get(&d) {
                    Some(prev) => dev = dev.max((prev - v).norm()),
                    None => {
                        seen.insert(d, v);
                    }
                }
                dev = dev.max((v - m[(b, a)].conj()).norm());
            }
        }
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        Self::from_generator(sizes, |d| seen[d])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn generator(&self, d: &[i64]) -> C64 {
        self.generator[self.gen_index(d)]
    }

    /// Entry `(x_1..x_r, y_1..y_r)`.
    pub fn entry(&self, x: &[usize], y: &[usize]) -> C64 {
        let d: Vec<i64> = x
            .iter()
            .zip(y)
            .map(|(&p, &q)| p as i64 - q as i64)
            .collect();
        self.generator(&d)
    }

    /// `mat(Z)`: first `r` indices as rows, last `r` as columns.
    pub fn to_matrix(&self) -> CMat {
        let idx = multi_indices(&self.sizes);
        let n = idx.len();
        CMat::from_fn(n, n, |a, b| self.entry(&idx[a], &idx[b]))
    }

    /// `Z_{*, 0}`: the tensor with the second group of indices at zero.
    pub fn first_column(&self) -> Vec<C64> {
        let zero = vec![0; self.sizes.len()];
        multi_indices(&self.sizes)
            .iter()
            .map(|x| self.entry(x, &zero))
            .collect()
    }
}

/// For each `j <= N`, the linear map from block-Toeplitz generators to the
/// entries of `D^(j)`: `D^(j)_{m,m'} = sum_k a_k t_{(-m, k, -m')}` where
/// `d^(j)_{m',m}(beta) = sum_k a_k e^{i k beta}`.
#[derive(Debug, Clone)]
pub struct WignerIndexMap {
    bandwidth: usize,
    /// `terms[j][r * (2j+1) + c]` lists `(difference, coefficient)`.
    terms: Vec<Vec<Vec<([i64; 3], C64)>>>,
}

/// Largest allowed residual when validating the map.
pub const INDEX_MAP_TOL: f64 = 1e-9;

pub fn build_wigner_index_maps(bandwidth: usize) -> Result<WignerIndexMap> {
    let n = bandwidth as i64;
    let samples = 2 * bandwidth + 1;
    let betas: Vec<f64> = (0..samples)
        .map(|s| 2.0 * std::f64::consts::PI * s as f64 / samples as f64)
        .collect();
    let mut terms = Vec::with_capacity(bandwidth + 1);
    for j in 0..=n {
        let dim = (2 * j + 1) as usize;
        let mut per_entry = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                let (m, mp) = (r as i64 - j, c as i64 - j);
                let vals: Vec<f64> = betas
                    .iter()
                    .map(|&b| wigner_little_d(j, mp, m, b))
                    .collect();
                let mut list = Vec::new();
                for k in -n..=n {
                    let a: C64 = vals
                        .iter()
                        .zip(&betas)
                        .map(|(&v, &b)| cis(-(k as f64) * b) * v)
                        .sum::<C64>()
                        / samples as f64;
                    if a.norm() > 1e-14 {
                        list.push(([-m, k, -mp], a));
                    }
                }
                per_entry.push(list);
            }
        }
        terms.push(per_entry);
    }
    let map = WignerIndexMap { bandwidth, terms };
    let resid = map.validation_residual(100, 0x5eed);
    if resid > INDEX_MAP_TOL {
        return Err(Error::IndexMap(resid));
    }
    Ok(map)
}

impl WignerIndexMap {
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn terms(&self, j: usize, m: i64, mp: i64) -> &[([i64; 3], C64)] {
        let ji = j as i64;
        let dim = 2 * j + 1;
        &self.terms[j][(m + ji) as usize * dim + (mp + ji) as usize]
    }

    /// `L^(j)` applied to the generator `t`.
    pub fn apply<F: Fn(&[i64]) -> C64>(&self, j: usize, t: F) -> CMat {
        let ji = j as i64;
        let dim = 2 * j + 1;
        CMat::from_fn(dim, dim, |r, c| {
            self.terms(j, r as i64 - ji, c as i64 - ji)
                .iter()
                .map(|(d, a)| a * t(d))
                .sum()
        })
    }

    /// Entry `(m, m')` of `L^(j)` on symbolic generators, as `(re, im)`.
    pub fn apply_affine(&self, j: usize, m: i64, mp: i64, t: &ToeplitzVars) -> (Affine, Affine) {
        let mut re = Affine::zero();
        let mut im = Affine::zero();
        for (d, a) in self.terms(j, m, mp) {
            let (tr, ti) = t.entry(d);
            re = re.plus(&tr.scaled(a.re)).plus(&ti.scaled(-a.im));
            im = im.plus(&ti.scaled(a.re)).plus(&tr.scaled(a.im));
        }
        (re.compact(), im.compact())
    }

    /// Max over random Euler triples and `j` of `||L^(j)(V) - D^(j)||_F`.
    pub fn validation_residual(&self, trials: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = 2.0 * std::f64::consts::PI;
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let (a, b, g) = (
                rng.random_range(0.0..tau),
                rng.random_range(0.0..std::f64::consts::PI),
                rng.random_range(0.0..tau),
            );
            let gen = |d: &[i64]| cis(d[0] as f64 * a + d[1] as f64 * b + d[2] as f64 * g);
            for j in 0..=self.bandwidth {
                let got = self.apply(j, gen);
                worst = worst.max(frob_norm(&(got - wigner_d_matrix(j, a, b, g))));
            }
        }
        worst
    }
}

/// Lower bound on the atomic norm of `T` (mode sizes `(n+1)^3`, row-major)
/// over atoms `v(a) (x) v(b) (x) v(c)`:
/// `min t/2 + Z_0/2` s.t. `[[t, vec(T)^*], [vec(T), mat(Z)]]` PSD, `Z` block Toeplitz.
pub fn tensor_minkowski_relaxed(t: &[C64], n: usize) -> Result<f64> {
    let sizes = [n + 1; 3];
    let dim = (n + 1).pow(3);
    if t.len() != dim {
        return Err(Error::Shape(format!(
            "tensor of order {n} needs {dim} entries"
        )));
    }
    if t.iter().all(|z| z.norm() == 0.0) {
        return Ok(0.0);
    }
    let mut p = ConicProblem::new();
    let tv = p.add_var();
    let z = ToeplitzVars::declare(&mut p, &sizes);
    let h: Vec<(Affine, Affine)> = t
        .iter()
        .map(|v| (Affine::constant(v.re), Affine::constant(v.im)))
        .collect();
    p.add_psd(z.bordered_block(tv, &h));
    p.add_objective(tv, 0.5);
    p.add_objective(z.diagonal_var(), 0.5);
    let sol = conic::solve(&p, conic::default_tolerance()).into_result()?;
    Ok(sol.primal_objective.max(0.0))
}

/// Two PSD block-Toeplitz tensors `W+`, `W-` of mode size `N + 1`; the relaxed
/// SO(3) operator is `L(W+ - W-)` and its norm bound is `w+_0 + w-_0`.
#[derive(Debug, Clone)]
pub struct So3RelaxedPair {
    pub plus: ToeplitzVars,
    pub minus: ToeplitzVars,
}

impl So3RelaxedPair {
    pub fn declare(p: &mut ConicProblem, bandwidth: usize) -> Self {
        let sizes = [bandwidth + 1; 3];
        let plus = ToeplitzVars::declare(p, &sizes);
        let minus = ToeplitzVars::declare(p, &sizes);
        p.add_psd(plus.psd_block());
        p.add_psd(minus.psd_block());
        So3RelaxedPair { plus, minus }
    }

    /// `(re, im)` of `L^(j)(W+ - W-)_{m,m'}`.
    pub fn operator_entry(
        &self,
        map: &WignerIndexMap,
        j: usize,
        m: i64,
        mp: i64,
    ) -> (Affine, Affine) {
        let (pr, pi) = map.apply_affine(j, m, mp, &self.plus);
        let (mr, mi) = map.apply_affine(j, m, mp, &self.minus);
        (
            pr.plus(&mr.scaled(-1.0)).compact(),
            pi.plus(&mi.scaled(-1.0)).compact(),
        )
    }

    pub fn norm_expr(&self) -> Affine {
        Affine::var(self.plus.diagonal_var()).term(self.minus.diagonal_var(), 1.0)
    }

    /// Numeric operator blocks at a solution.
    pub fn operator_value(&self, map: &WignerIndexMap, x: &[f64]) -> Vec<CMat> {
        (0..=map.bandwidth())
            .map(|j| {
                let a = map.apply(j, |d| self.plus.value(x, d));
                let b = map.apply(j, |d| self.minus.value(x, d));
                a - b
            })
            .collect()
    }
}

/// Entries `(m, m')` that determine an operator in the real span of the SO(3)
/// atoms: the others follow from `X_{-m,-m'} = (-1)^(m-m') conj(X_{m,m'})`.
/// The flag says whether the imaginary part is free (false only at `(0, 0)`).
pub fn so3_free_entries(j: usize) -> Vec<(i64, i64, bool)> {
    let ji = j as i64;
    let mut out = Vec::new();
    for m in -ji..=ji {
        for mp in -ji..=ji {
            if m > 0 || (m == 0 && mp > 0) {
                out.push((m, mp, true));
            } else if m == 0 && mp == 0 {
                out.push((0, 0, false));
            }
        }
    }
    out
}

/// Largest violation of the atom-span symmetry in an SO(3) operator.
pub fn so3_span_deviation(l: &BlockDiagOperator) -> f64 {
    let mut dev: f64 = 0.0;
    for (xi, b) in l.table().entries().iter().zip(l.blocks()) {
        let j = xi.label;
        for m in -j..=j {
            for mp in -j..=j {
                let a = b[((m + j) as usize, (mp + j) as usize)];
                let c = b[((-m + j) as usize, (-mp + j) as usize)];
                let sign = if (m - mp).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                dev = dev.max((c - a.conj() * sign).norm());
            }
        }
    }
    dev
}

fn check_so3_table(l: &BlockDiagOperator) -> Result<usize> {
    let table = l.table();
    if table.group() != GroupId::So3 {
        return Err(Error::GroupMismatch {
            expected: GroupId::So3,
            found: table.group(),
        });
    }
    let n = table.bandwidth();
    let full = table
        .entries()
        .iter()
        .enumerate()
        .all(|(i, xi)| xi.label == i as i64);
    if !full || table.len() != n + 1 {
        return Err(Error::Shape(
            "SO(3) operator needs the full table 0..N".into(),
        ));
    }
    Ok(n)
}

/// Gauge of `l` for the convex hull of `{ +-L(W) }` over unit-diagonal PSD
/// block-Toeplitz `W`: `min w+_0 + w-_0` s.t. `L(W+ - W-) = l`.
pub fn so3_operator_norm_relaxed(l: &BlockDiagOperator) -> Result<f64> {
    let n = check_so3_table(l)?;
    let scale = l.frob_norm_sq().sqrt();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if so3_span_deviation(l) > 1e-9 * scale.max(1.0) {
        return Err(Error::OutsideSpan);
    }
    let map = build_wigner_index_maps(n)?;
    let mut p = ConicProblem::new();
    let pair = So3RelaxedPair::declare(&mut p, n);
    for (j, b) in l.blocks().iter().enumerate() {
        let ji = j as i64;
        for (m, mp, has_im) in so3_free_entries(j) {
            let v = b[((m + ji) as usize, (mp + ji) as usize)];
            let (re, im) = pair.operator_entry(&map, j, m, mp);
            p.add_eq(re.plus_constant(-v.re));
            if has_im {
                p.add_eq(im.plus_constant(-v.im));
            }
        }
    }
    for &(i, c) in &pair.norm_expr().terms {
        p.add_objective(i, c);
    }
    let sol = conic::solve(&p, conic::default_tolerance());
    match sol.status {
        conic::SolveStatus::Infeasible => Err(Error::OutsideSpan),
        _ => Ok(sol.into_result()?.primal_objective.max(0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_irreps, GroupElement};

    #[test]
    fn index_map_reproduces_wigner() {
        for n in 0..=3 {
            let map = build_wigner_index_maps(n).unwrap();
            assert!(map.validation_residual(100, 11) < 1e-9);
        }
    }

    #[test]
    fn index_map_trivial_and_cos() {
        let map = build_wigner_index_maps(1).unwrap();
        let t0 = map.terms(0, 0, 0);
        assert_eq!(t0.len(), 1);
        assert_eq!(t0[0].0, [0, 0, 0]);
        assert!((t0[0].1 - C64::new(1.0, 0.0)).norm() < 1e-14);
        // d^1_00 = cos(beta) = (e^{i beta} + e^{-i beta}) / 2
        let t = map.terms(1, 0, 0);
        assert_eq!(t.len(), 2);
        for (d, a) in t {
            assert_eq!((d[0], d[2]), (0, 0));
            assert_eq!(d[1].abs(), 1);
            assert!((a - C64::new(0.5, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn block_toeplitz_structure() {
        let z = BlockToeplitzTensor::atom(&[2, 3, 2], &[0.3, 1.2, 2.9]).unwrap();
        let m = z.to_matrix();
        assert!(crate::linalg::hermitian_deviation(&m) < 1e-14);
        // mode-k slices with other coordinates fixed on the diagonal are Hermitian Toeplitz
        for k in 0..3 {
            for x in multi_indices(z.sizes()) {
                for y in multi_indices(z.sizes()) {
                    let same_elsewhere = (0..3).all(|l| l == k || x[l] == y[l]);
                    if !same_elsewhere {
                        continue;
                    }
                    let mut xs = x.clone();
                    let mut ys = y.clone();
                    xs[k] = y[k];
                    ys[k] = x[k];
                    assert!((z.entry(&x, &y) - z.entry(&xs, &ys).conj()).norm() < 1e-14);
                }
            }
        }
        let back = BlockToeplitzTensor::from_matrix(&[2, 3, 2], &m, 1e-12).unwrap();
        assert!((back.to_matrix() - m.clone()).norm() < 1e-14);
        let mut bad = m;
        bad[(0, 1)] += C64::new(0.1, 0.0);
        assert!(BlockToeplitzTensor::from_matrix(&[2, 3, 2], &bad, 1e-9).is_err());
    }

    #[test]
    fn span_symmetry_holds_for_atoms() {
        let t = enumerate_irreps(GroupId::So3, 3);
        let l = BlockDiagOperator::from_element(&t, &GroupElement::euler(0.4, 2.0, 5.1)).unwrap();
        assert!(so3_span_deviation(&l) < 1e-12);
        assert_eq!(so3_free_entries(1).len(), 5);
    }

    #[cfg(feature = "solver")]
    #[test]
    fn tensor_atom_is_tight() {
        let z = BlockToeplitzTensor::atom(&[2, 2, 2], &[0.7, 2.2, 4.0]).unwrap();
        let v = tensor_minkowski_relaxed(&z.first_column(), 1).unwrap();
        assert!((v - 1.0).abs() < 1e-4, "{v}");
        assert_eq!(
            tensor_minkowski_relaxed(&[C64::new(0.0, 0.0); 8], 1).unwrap(),
            0.0
        );
    }

    #[cfg(feature = "solver")]
    #[test]
    fn so3_norm_of_atoms() {
        let t = enumerate_irreps(GroupId::So3, 2);
        let g1 = GroupElement::euler(0.3, 1.0, 2.0);
        let g2 = GroupElement::euler(4.0, 2.5, 0.1);
        let a1 = BlockDiagOperator::from_element(&t, &g1).unwrap();
        let a2 = BlockDiagOperator::from_element(&t, &g2).unwrap();
        let v = so3_operator_norm_relaxed(&a1).unwrap();
        assert!(v <= 1.0 + 1e-4 && v > 0.5, "{v}");
        let mut half = a1.scaled(C64::new(0.5, 0.0));
        half.axpy(C64::new(-0.5, 0.0), &a2).unwrap();
        assert!(so3_operator_norm_relaxed(&half).unwrap() <= 1.0 + 1e-4);
        assert_eq!(
            so3_operator_norm_relaxed(&BlockDiagOperator::zeros(&t)).unwrap(),
            0.0
        );
        let v2 = so3_operator_norm_relaxed(&a1.scaled(C64::new(-3.0, 0.0))).unwrap();
        assert!((v2 - 3.0 * v).abs() < 1e-5);
    }

    #[cfg(feature = "solver")]
    #[test]
    fn so3_outside_span() {
        let t = enumerate_irreps(GroupId::So3, 1);
        let mut l = BlockDiagOperator::zeros(&t);
        l.blocks_mut()[1][(0, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(
            so3_operator_norm_relaxed(&l),
            Err(Error::OutsideSpan)
        ));
    }
}
