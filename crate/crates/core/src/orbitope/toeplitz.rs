//! Hermitian Toeplitz matrices, trigonometric moment vectors and the
//! Vandermonde (Caratheodory) decomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{cis, frob_norm, hermitian_eigen, nnls, poly_roots, CMat, C64};

/// `v^(j)(theta) = (1, e^{i theta}, ..., e^{i j theta})`.
pub fn moment_atom(order: usize, theta: f64) -> Vec<C64> {
    (0..=order).map(|k| cis(k as f64 * theta)).collect()
}

/// Hermitian Toeplitz matrix `T[a][b] = t_{a-b}` with `t_{-k} = conj(t_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianToeplitz {
    col: Vec<C64>,
}

impl HermitianToeplitz {
    /// From the first column; `t_0` must be real up to `1e-10 * max(1, |t|)`.
    pub fn new(mut col: Vec<C64>) -> Result<Self> {
        if col.is_empty() {
            return Err(Error::InvalidArgument("empty Toeplitz column".into()));
        }
        let scale = col.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if col[0].im.abs() > 1e-10 * scale {
            return Err(Error::NotHermitian(col[0].im.abs()));
        }
        col[0].im = 0.0;
        Ok(HermitianToeplitz { col })
    }

    /// Reads a matrix, rejecting departures from Hermitian Toeplitz structure
    /// larger than `tol`.
    pub fn from_matrix(m: &CMat, tol: f64) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(Error::Shape(
                "Toeplitz matrix must be square and nonempty".into(),
            ));
        }
        let col: Vec<C64> = (0..n).map(|a| m[(a, 0)]).collect();
        let mut dev: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let want = if a >= b {
                    col[a - b]
                } else {
                    col[b - a].conj()
                };
                dev = dev.max((m[(a, b)] - want).norm());
            }
        }
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        HermitianToeplitz::new(col)
    }

    /// `sum_i w_i v(theta_i) v(theta_i)^*`, size `order + 1`.
    pub fn from_atoms(order: usize, atoms: &[(f64, f64)]) -> Self {
        let col = (0..=order)
            .map(|k| {
                atoms
                    .iter()
                    .map(|&(theta, w)| cis(k as f64 * theta) * w)
                    .sum()
            })
            .collect();
        HermitianToeplitz { col }
    }

    pub fn size(&self) -> usize {
        self.col.len()
    }

    pub fn first_column(&self) -> &[C64] {
        &self.col
    }

    pub fn entry(&self, a: usize, b: usize) -> C64 {
        if a >= b {
            self.col[a - b]
        } else {
            self.col[b - a].conj()
        }
    }

    pub fn to_matrix(&self) -> CMat {
        let n = self.size();
        CMat::from_fn(n, n, |a, b| self.entry(a, b))
    }
}

/// Folded moment vector `x = (x_0, ..., x_j)`; the full symmetric form is
/// `x_{-m} = conj(x_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMomentVector {
    entries: Vec<C64>,
}

impl TrigMomentVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("empty moment vector".into()));
        }
        Ok(TrigMomentVector { entries })
    }

    pub fn atom(order: usize, theta: f64) -> Self {
        TrigMomentVector {
            entries: moment_atom(order, theta),
        }
    }

    /// Folds `x_{-j}..x_j`, checking conjugate symmetry to `tol`.
    pub fn from_full(full: &[C64], tol: f64) -> Result<Self> {
        if full.len() % 2 == 0 {
            return Err(Error::Shape(
                "full moment vector must have odd length".into(),
            ));
        }
        let j = full.len() / 2;
        let dev = (0..=j)
            .map(|m| (full[j + m] - full[j - m].conj()).norm())
            .fold(0.0, f64::max);
        if dev > tol {
            return Err(Error::OutsideSpan);
        }
        let entries = (0..=j)
            .map(|m| 0.5 * (full[j + m] + full[j - m].conj()))
            .collect();
        Ok(TrigMomentVector { entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn folded(&self) -> &[C64] {
        &self.entries
    }

    pub fn full(&self) -> Vec<C64> {
        let j = self.order();
        (0..=2 * j)
            .map(|i| {
                if i >= j {
                    self.entries[i - j]
                } else {
                    self.entries[j - i].conj()
                }
            })
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigMomentVector {
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &TrigMomentVector) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::Shape("moment vectors of different order".into()));
        }
        Ok(TrigMomentVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Relative rank threshold on eigenvalues.
const RANK_TOL: f64 = 1e-8;
/// Roots closer than this (radians) are merged.
const MERGE_TOL: f64 = 1e-6;

/// Writes a PSD Hermitian Toeplitz matrix as `sum_i w_i v(theta_i) v(theta_i)^*`
/// with at most `size` atoms and positive weights.
///
/// A rank-deficient matrix is rooted through the null vector of its leading
/// singular section. A full-rank matrix is first extended by one entry so that
/// the extension is PSD and singular (one of the Caratheodory completions).
pub fn vandermonde_decompose(t: &HermitianToeplitz) -> Result<Vec<(f64, f64)>> {
    let n = t.size();
    let m = t.to_matrix();
    let (vals, _) = hermitian_eigen(&m);
    let lmax = vals.last().copied().unwrap_or(0.0);
    let scale = lmax.abs().max(t.col[0].re.abs());
    if scale <= 1e-14 {
        return Ok(Vec::new());
    }
    if vals[0] < -1e-9 * scale.max(1.0) {
        return Err(Error::NotPsd(vals[0]));
    }
    if n == 1 {
        return Ok(vec![(0.0, t.col[0].re)]);
    }
    let rank = vals.iter().filter(|&&v| v > RANK_TOL * lmax).count();

    let section = if rank < n {
        HermitianToeplitz {
            col: t.col[..=rank].to_vec(),
        }
    } else {
        singular_extension(t)
    };
    let sm = section.to_matrix();
    let (_, vecs) = hermitian_eigen(&sm);
    let u: Vec<C64> = vecs.column(0).iter().copied().collect();
    // V^* u = 0 means sum_k u_k e^{-ik theta} = 0: roots w = e^{-i theta}
    let roots = poly_roots(&u);
    let mut thetas: Vec<f64> = roots
        .iter()
        .map(|w| (-w.arg()).rem_euclid(2.0 * std::f64::consts::PI))
        .collect();
    thetas.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(thetas.len());
    for th in thetas {
        match merged.last() {
            Some(&last) if th - last < MERGE_TOL => {}
            _ => merged.push(th),
        }
    }
    if merged.len() > 1 {
        let wrap = merged[0] + 2.0 * std::f64::consts::PI - merged[merged.len() - 1];
        if wrap < MERGE_TOL {
            merged.pop();
        }
    }

    // weights: nonnegative fit of the first column, split into re/im rows
    let k = merged.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, k);
    let mut b = DVector::<f64>::zeros(2 * n);
    for r in 0..n {
        for (c, &th) in merged.iter().enumerate() {
            let z = cis(r as f64 * th);
            a[(2 * r, c)] = z.re;
            a[(2 * r + 1, c)] = z.im;
        }
        b[2 * r] = t.col[r].re;
        b[2 * r + 1] = t.col[r].im;
    }
    let w = nnls(&a, &b);
    let atoms: Vec<(f64, f64)> = merged
        .into_iter()
        .zip(w.iter())
        .filter(|(_, &w)| w > 1e-14 * scale)
        .map(|(th, &w)| (th, w))
        .collect();

    let recon = HermitianToeplitz::from_atoms(n - 1, &atoms).to_matrix();
    let resid = frob_norm(&(recon - m));
    if resid > 1e-6 * scale.max(1.0) {
        return Err(Error::Decomposition(resid));
    }
    Ok(atoms)
}

/// Size `n + 1` extension of a positive definite Toeplitz matrix whose Schur
/// complement vanishes, so the extension is PSD with a one-dimensional kernel.
fn singular_extension(t: &HermitianToeplitz) -> HermitianToeplitz {
    let n = t.size();
    // T' = [[t0, c^*], [c, T]], c = (t_1, ..., t_{n-1}, s); choose s with t0 = c^* T^-1 c.
    let tinv = t
        .to_matrix()
        .try_inverse()
        .unwrap_or_else(|| crate::linalg::pinv(&t.to_matrix(), 1e-14));
    let mut u0 = CMat::zeros(n, 1);
    for k in 1..n {
        u0[(k - 1, 0)] = t.col[k];
    }
    let pu = &tinv * &u0;
    let a = tinv[(n - 1, n - 1)].re;
    let b = pu[(n - 1, 0)];
    let quad = (u0.adjoint() * &pu)[(0, 0)].re;
    let rho = ((t.col[0].re - quad + b.norm_sqr() / a) / a)
        .max(0.0)
        .sqrt();
    let s = -b / a + rho;
    let mut col = t.col.clone();
    col.push(s);
    HermitianToeplitz { col }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn angle_dist(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    }

    #[test]
    fn single_atom() {
        let t = HermitianToeplitz::from_atoms(4, &[(1.3, 1.0)]);
        let atoms = vandermonde_decompose(&t).unwrap();
        assert_eq!(atoms.len(), 1);
        assert!(angle_dist(atoms[0].0, 1.3) < 1e-8);
        assert!((atoms[0].1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_gives_roots_of_unity() {
        let n = 5;
        let mut col = vec![C64::new(0.0, 0.0); n];
        col[0] = C64::new(1.0, 0.0);
        let atoms = vandermonde_decompose(&HermitianToeplitz::new(col).unwrap()).unwrap();
        assert_eq!(atoms.len(), n);
        for (i, (th, w)) in atoms.iter().enumerate() {
            assert!(
                angle_dist(*th, 2.0 * PI * i as f64 / n as f64) < 1e-8,
                "{atoms:?}"
            );
            assert!((w - 1.0 / n as f64).abs() < 1e-8);
        }
    }

    #[test]
    fn two_atom_mixture() {
        let t = HermitianToeplitz::from_atoms(6, &[(0.4, 0.3), (3.9, 0.7)]);
        let atoms = vandermonde_decompose(&t).unwrap();
        assert_eq!(atoms.len(), 2);
        assert!(angle_dist(atoms[0].0, 0.4) < 1e-6 && angle_dist(atoms[1].0, 3.9) < 1e-6);
        assert!((atoms[0].1 - 0.3).abs() < 1e-6 && (atoms[1].1 - 0.7).abs() < 1e-6);
    }

    #[test]
    fn generic_full_rank() {
        let t = HermitianToeplitz::new(vec![
            C64::new(2.0, 0.0),
            C64::new(0.3, 0.4),
            C64::new(-0.2, 0.1),
        ])
        .unwrap();
        let atoms = vandermonde_decompose(&t).unwrap();
        assert!(atoms.len() <= 3);
        let sum: f64 = atoms.iter().map(|a| a.1).sum();
        assert!((sum - 2.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_indefinite() {
        let t = HermitianToeplitz::new(vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        assert!(matches!(vandermonde_decompose(&t), Err(Error::NotPsd(_))));
    }

    #[test]
    fn structure_checks() {
        let t = HermitianToeplitz::from_atoms(3, &[(0.2, 1.0), (2.0, 0.5)]);
        let back = HermitianToeplitz::from_matrix(&t.to_matrix(), 1e-12).unwrap();
        assert_eq!(back.size(), 4);
        let mut m = t.to_matrix();
        m[(2, 0)] += C64::new(0.1, 0.0);
        assert!(HermitianToeplitz::from_matrix(&m, 1e-12).is_err());
        assert!(HermitianToeplitz::new(vec![C64::new(1.0, 0.5)]).is_err());
    }

    #[test]
    fn moment_folding() {
        let x = TrigMomentVector::atom(3, 0.7);
        let full = x.full();
        assert_eq!(full.len(), 7);
        assert!((full[0] - cis(-2.1)).norm() < 1e-15);
        assert_eq!(TrigMomentVector::from_full(&full, 1e-12).unwrap(), x);
        let mut bad = full.clone();
        bad[0] += C64::new(0.5, 0.0);
        assert!(TrigMomentVector::from_full(&bad, 1e-9).is_err());
    }
}
