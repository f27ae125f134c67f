//! Wigner small-d and D matrices.
//!
//! `D^(j)_{m,m'}(alpha, beta, gamma) = exp(-i m alpha) d^(j)_{m',m}(beta) exp(-i m' gamma)`,
//! with `d^(j)_{m',m}(beta) = sum_k c_k cos(beta/2)^(2j-2k+m-m') sin(beta/2)^(2k-m+m')`
//! and `c_k = (-1)^(k-m+m') sqrt((j+m)!(j-m)!(j+m')!(j-m')!) / ((j+m-k)!(j-k-m')!(k-m+m')! k!)`,
//! summing over the `k` that keep every factorial argument nonnegative.
//! Matrix rows and columns are indexed by `m = -j..=j` in increasing order.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::linalg::{cis, CMat};

const LN_FACT_LEN: usize = 512;

fn ln_factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; LN_FACT_LEN];
        for n in 1..LN_FACT_LEN {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

fn ln_fact(n: i64) -> f64 {
    ln_factorials()[n as usize]
}

// n! is finite in f64 up to 170.
const FACT_LEN: usize = 171;

fn factorials() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![1.0; FACT_LEN];
        for n in 1..FACT_LEN {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `|c_k|`, directly from factorials while they stay small enough to keep
/// every ratio finite, through logarithms beyond.
fn abs_ck(j: i64, mp: i64, m: i64, k: i64) -> f64 {
    if j <= 40 {
        let f = factorials();
        let g = |n: i64| f[n as usize];
        // pair numerator and denominator factors to keep magnitudes moderate
        ((g(j + m) * g(j - m)).sqrt() / (g(j + m - k) * g(k)))
            * ((g(j + mp) * g(j - mp)).sqrt() / (g(j - k - mp) * g(k - m + mp)))
    } else {
        let ln_num = 0.5 * (ln_fact(j + m) + ln_fact(j - m) + ln_fact(j + mp) + ln_fact(j - mp));
        let ln_den = ln_fact(j + m - k) + ln_fact(j - k - mp) + ln_fact(k - m + mp) + ln_fact(k);
        (ln_num - ln_den).exp()
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `d^(j)_{m',m}(beta)`. Requires `|m|, |m'| <= j`.
pub fn wigner_little_d(j: i64, mp: i64, m: i64, beta: f64) -> f64 {
    assert!(
        j >= 0 && mp.abs() <= j && m.abs() <= j,
        "index out of range"
    );
    assert!((2 * j + 2) < LN_FACT_LEN as i64, "j too large");
    let (s, c) = (beta / 2.0).sin_cos();
    let k_min = 0.max(m - mp);
    let k_max = (j + m).min(j - mp);
    let mut acc = CompensatedSum::default();
    for k in k_min..=k_max {
        let sign = if (k - m + mp).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let ck = sign * abs_ck(j, mp, m, k);
        let pc = (2 * j - 2 * k + m - mp) as i32;
        let ps = (2 * k - m + mp) as i32;
        acc.add(ck * c.powi(pc) * s.powi(ps));
    }
    acc.value()
}

/// Real matrix with entry `(m' + j, m + j) = d^(j)_{m',m}(beta)`.
pub fn wigner_little_d_matrix(j: usize, beta: f64) -> DMatrix<f64> {
    let ji = j as i64;
    let n = 2 * j + 1;
    DMatrix::from_fn(n, n, |r, c| {
        wigner_little_d(ji, r as i64 - ji, c as i64 - ji, beta)
    })
}

/// `D^(j)(alpha, beta, gamma)` from a precomputed small-d matrix.
pub(crate) fn wigner_d_from_little(
    j: usize,
    little: &DMatrix<f64>,
    alpha: f64,
    gamma: f64,
) -> CMat {
    let ji = j as i64;
    let n = 2 * j + 1;
    CMat::from_fn(n, n, |r, c| {
        let m = r as i64 - ji;
        let mp = c as i64 - ji;
        // d_{m',m} lives at (m' + j, m + j)
        cis(-(m as f64) * alpha) * little[(c, r)] * cis(-(mp as f64) * gamma)
    })
}

/// `D^(j)(alpha, beta, gamma)`.
pub fn wigner_d_matrix(j: usize, alpha: f64, beta: f64, gamma: f64) -> CMat {
    wigner_d_from_little(j, &wigner_little_d_matrix(j, beta), alpha, gamma)
}
