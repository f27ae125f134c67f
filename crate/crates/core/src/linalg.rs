//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn frob_norm_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frob_norm(m: &CMat) -> f64 {
    frob_norm_sq(m).sqrt()
}

/// Trace inner product `tr(A B*)`.
pub fn inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    hermitian_deviation(m) <= tol
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[a].total_cmp(&sym.eigenvalues[b]));
    let values = order.iter().map(|&k| sym.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &sym.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Moore-Penrose pseudoinverse; singular values below `rcond * sigma_max` are dropped.
pub fn pinv(m: &CMat, rcond: f64) -> CMat {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rcond * smax;
    let mut out = CMat::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let uk = u.column(k);
            let vk = vt.row(k);
            // out += v_k (1/s) u_k^*
            for i in 0..c {
                let vi = vk[i].conj() / s;
                for j in 0..r {
                    out[(i, j)] += vi * uk[j].conj();
                }
            }
        }
    }
    out
}

/// Roots of `coeffs[0] + coeffs[1] z + ... + coeffs[d] z^d` via the companion matrix.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut d = coeffs.len().saturating_sub(1);
    while d > 0 && coeffs[d].norm() < 1e-300 {
        d -= 1;
    }
    if d == 0 {
        return Vec::new();
    }
    let lead = coeffs[d];
    let mut comp = CMat::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -coeffs[i] / lead;
    }
    let schur = nalgebra::Schur::new(comp);
    let (_, t) = schur.unpack();
    let mut roots: Vec<C64> = (0..d).map(|i| t[(i, i)]).collect();
    // Newton polish against the original polynomial.
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&coeffs[..=d], *r);
            if dp.norm() < 1e-300 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
        }
    }
    roots
}

fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Nonnegative least squares `min ||A x - b||, x >= 0` (Lawson-Hanson active set).
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    for _outer in 0..(3 * n + 10) {
        let w = a.transpose() * (b - a * &x);
        let cand = (0..n)
            .filter(|&k| !passive[k])
            .max_by(|&p, &q| w[p].total_cmp(&w[q]));
        match cand {
            Some(k) if w[k] > tol => passive[k] = true,
            _ => break,
        }
        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(idx.iter());
            let z_sub = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if z_sub.iter().all(|&v| v > 0.0) {
                for (p, &k) in idx.iter().enumerate() {
                    x[k] = z_sub[p];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (p, &k) in idx.iter().enumerate() {
                if z_sub[p] <= 0.0 {
                    let denom = x[k] - z_sub[p];
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (p, &k) in idx.iter().enumerate() {
                x[k] += alpha * (z_sub[p] - x[k]);
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}
