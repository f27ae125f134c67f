//! Plain L1 dictionary learning on flattened coefficient vectors, for comparison.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conic::{self, Affine, ConicProblem};
use crate::error::{Error, Result};
use crate::group::{plancherel_weight, FourierCoefficients, IrrepTable};
use crate::linalg::{CMat, C64};

/// Real vector `(re, im)` of every coefficient scaled by `sqrt(dim)`, so that
/// the Euclidean norm is the Plancherel norm.
pub fn flatten(f: &FourierCoefficients) -> DVector<f64> {
    let mut v = Vec::with_capacity(2 * f.table().total_dim_sq());
    for b in f.blocks() {
        let s = plancherel_weight(b.nrows()).sqrt();
        for z in b.iter() {
            v.push(z.re * s);
            v.push(z.im * s);
        }
    }
    DVector::from_vec(v)
}

pub fn unflatten(table: &IrrepTable, v: &DVector<f64>) -> Result<FourierCoefficients> {
    if v.len() != 2 * table.total_dim_sq() {
        return Err(Error::Shape(format!(
            "{} entries for a table of {} complex coefficients",
            v.len(),
            table.total_dim_sq()
        )));
    }
    let mut k = 0;
    let blocks = table
        .dims()
        .map(|d| {
            let s = plancherel_weight(d).sqrt();
            let mut m = CMat::zeros(d, d);
            // column-major, matching the iteration order of `flatten`
            for z in m.iter_mut() {
                *z = C64::new(v[k], v[k + 1]) / s;
                k += 2;
            }
            m
        })
        .collect();
    FourierCoefficients::new(table.clone(), blocks)
}

/// `min (1/2)||y - A x||^2 + lambda ||x||_1` through the conic interface.
pub fn code_l1(y: &DVector<f64>, atoms: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let q = atoms.ncols();
    if atoms.nrows() != y.len() {
        return Err(Error::Shape("atom length differs from data length".into()));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Ok(DVector::zeros(q));
    }
    let mut p = ConicProblem::new();
    let x = p.add_vars(q);
    let t = p.add_vars(q);
    for r in 0..y.len() {
        let mut a = Affine::constant(y[r]);
        for j in 0..q {
            a = a.term(x[j], -atoms[(r, j)]);
        }
        p.add_square(&a, 0.5);
    }
    for j in 0..q {
        p.add_objective(t[j], lambda);
        p.add_nonneg(Affine::var(t[j]).term(x[j], -1.0));
        p.add_nonneg(Affine::var(t[j]).term(x[j], 1.0));
    }
    let sol = conic::solve(&p, conic::default_tolerance()).into_result()?;
    Ok(DVector::from_iterator(q, x.iter().map(|&i| sol.x[i])))
}

#[derive(Debug, Clone)]
pub struct BaselineOutput {
    /// Unit-norm atoms as columns.
    pub atoms: DMatrix<f64>,
    /// Atoms after every iteration.
    pub history: Vec<DMatrix<f64>>,
    /// Coding objective summed over the data, per iteration.
    pub objective: Vec<f64>,
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v: DVector<f64> = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Alternates L1 coding with an unconstrained least-squares update
/// `A = Y X^T (X X^T)^+`, then rescales the columns to unit norm.
pub fn fit_baseline_l1(
    data: &[DVector<f64>],
    q: usize,
    lambda: f64,
    iterations: usize,
    seed: u64,
) -> Result<BaselineOutput> {
    let dim = data
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty dataset".into()))?
        .len();
    if q == 0 || iterations == 0 || data.iter().any(|y| y.len() != dim) {
        return Err(Error::InvalidArgument(
            "need q >= 1, iterations >= 1 and equal-length data".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut atoms = DMatrix::zeros(dim, q);
    for j in 0..q {
        atoms.set_column(j, &random_unit(dim, &mut rng));
    }
    let y = DMatrix::from_columns(data);
    let mut history = Vec::new();
    let mut objective = Vec::new();
    for it in 1..=iterations {
        let mut codes = DMatrix::zeros(q, data.len());
        let mut obj = 0.0;
        for (i, yi) in data.iter().enumerate() {
            let x = code_l1(yi, &atoms, lambda).map_err(|e| e.at_iteration(it))?;
            obj += 0.5 * (yi - &atoms * &x).norm_squared() + lambda * x.lp_norm(1);
            codes.set_column(i, &x);
        }
        objective.push(obj);
        let gram = &codes * codes.transpose();
        let svd = gram.svd(true, true);
        let smax = svd.singular_values.max();
        let mut next = if smax > 0.0 {
            let inv = svd
                .pseudo_inverse(crate::learner::PINV_RCOND * smax)
                .map_err(|e| Error::InvalidArgument(e.into()))?;
            &y * codes.transpose() * inv
        } else {
            DMatrix::zeros(dim, q)
        };
        for j in 0..q {
            let n = next.column(j).norm();
            if n > 1e-12 {
                next.column_mut(j).unscale_mut(n);
            } else {
                next.set_column(j, &random_unit(dim, &mut rng));
            }
        }
        atoms = next;
        history.push(atoms.clone());
    }
    Ok(BaselineOutput {
        atoms,
        history,
        objective,
    })
}
