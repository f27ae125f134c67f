//! Solver-neutral conic problems.
//!
//! A [`ConicProblem`] has free real variables `x`, objective
//! `c'x + x'Px / 2 + offset`, affine equalities, affine nonnegativity rows and
//! PSD constraints on affine symmetric matrices. Toeplitz-type ties are meant
//! to be expressed by reusing variables inside the matrices rather than by
//! extra equalities.

#[cfg(feature = "solver")]
mod backend;
mod dump;

use nalgebra::DMatrix;

use crate::linalg::{CMat, C64};

pub use dump::write_sdpa;

/// Environment variable overriding the accepted duality gap.
pub const GAP_ENV: &str = "GIDL_SOLVER_GAP";
/// Directory receiving an SDPA-like dump of every solved problem, when set.
pub const DUMP_ENV: &str = "GIDL_DUMP_SDPA";
/// Gap requested from the backend.
pub const REQUESTED_GAP: f64 = 1e-8;
/// Gap at which a solution is still reported optimal.
pub const ACCEPTED_GAP: f64 = 1e-6;

/// Accepted gap, honouring the environment override when it parses to a
/// positive number.
pub fn default_tolerance() -> f64 {
    std::env::var(GAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(ACCEPTED_GAP)
}

/// `sum coef * x[var] + constant`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn zero() -> Self {
        Affine::default()
    }

    pub fn var(i: usize) -> Self {
        Affine {
            terms: vec![(i, 1.0)],
            constant: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Affine {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn term(mut self, i: usize, coef: f64) -> Self {
        self.terms.push((i, coef));
        self
    }

    pub fn plus_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Affine {
            terms: self.terms.iter().map(|&(i, c)| (i, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(&self, other: &Affine) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Affine {
            terms,
            constant: self.constant + other.constant,
        }
    }

    /// Same expression with repeated variables merged and zeros dropped.
    pub fn compact(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|t| t.1 != 0.0);
        Affine {
            terms: out,
            constant: self.constant,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }

    fn max_var(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.0).max()
    }
}

/// Symmetric `dim x dim` affine matrix constrained PSD, stored as the upper
/// triangle column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdBlock {
    dim: usize,
    entries: Vec<Affine>,
}

fn tri_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    j * (j + 1) / 2 + i
}

impl PsdBlock {
    pub fn new(dim: usize) -> Self {
        PsdBlock {
            dim,
            entries: vec![Affine::zero(); dim * (dim + 1) / 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, i: usize, j: usize, a: Affine) {
        self.entries[tri_index(i, j)] = a;
    }

    pub fn get(&self, i: usize, j: usize) -> &Affine {
        &self.entries[tri_index(i, j)]
    }

    /// Upper-triangle entries in column order: (0,0), (0,1), (1,1), (0,2), ...
    pub fn entries(&self) -> &[Affine] {
        &self.entries
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).eval(x))
    }

    /// Real embedding `[[A, -B], [B, A]]` of the Hermitian affine matrix
    /// `A + iB`; `entry(i, j)` is queried for `i <= j` only and must return
    /// `(re, im)` of entry `(i, j)`.
    pub fn hermitian<F>(dim: usize, mut entry: F) -> Self
    where
        F: FnMut(usize, usize) -> (Affine, Affine),
    {
        let mut re = vec![Affine::zero(); dim * (dim + 1) / 2];
        let mut im = vec![Affine::zero(); dim * (dim + 1) / 2];
        for j in 0..dim {
            for i in 0..=j {
                let (a, b) = entry(i, j);
                re[tri_index(i, j)] = a;
                im[tri_index(i, j)] = if i == j { Affine::zero() } else { b };
            }
        }
        // B(i, j) for any i, j
        let b_at = |i: usize, j: usize| -> Affine {
            if i <= j {
                im[tri_index(i, j)].clone()
            } else {
                im[tri_index(j, i)].scaled(-1.0)
            }
        };
        let mut out = PsdBlock::new(2 * dim);
        for c in 0..2 * dim {
            for r in 0..=c {
                let a = match (r < dim, c < dim) {
                    (true, true) => re[tri_index(r, c)].clone(),
                    (false, false) => re[tri_index(r - dim, c - dim)].clone(),
                    // (r, dim + j) holds -B(r, j)
                    (true, false) => b_at(r, c - dim).scaled(-1.0),
                    (false, true) => unreachable!(),
                };
                out.set(r, c, a);
            }
        }
        out
    }
}

/// Complex Hermitian matrix `A + iB` from its real embedding `[[A, -B], [B, A]]`.
pub fn hermitian_from_embedding(m: &DMatrix<f64>) -> CMat {
    let d = m.nrows() / 2;
    CMat::from_fn(d, d, |i, j| {
        let a = 0.5 * (m[(i, j)] + m[(d + i, d + j)]);
        let b = 0.5 * (m[(d + i, j)] - m[(i, d + j)]);
        C64::new(a, b)
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConicProblem {
    n_vars: usize,
    objective: Vec<f64>,
    /// Upper-triangle triplets of the symmetric `P`.
    quadratic: Vec<(usize, usize, f64)>,
    pub offset: f64,
    equalities: Vec<Affine>,
    nonneg: Vec<Affine>,
    psd: Vec<PsdBlock>,
}

impl ConicProblem {
    pub fn new() -> Self {
        ConicProblem::default()
    }

    pub fn add_var(&mut self) -> usize {
        self.n_vars += 1;
        self.objective.push(0.0);
        self.n_vars - 1
    }

    pub fn add_vars(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.add_var()).collect()
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn add_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] += coef;
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Adds `coef` to `P[i][j]` and `P[j][i]` (so `i == j` contributes
    /// `coef * x_i^2 / 2`).
    pub fn add_quadratic(&mut self, i: usize, j: usize, coef: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.quadratic.push((i, j, coef));
    }

    /// Adds `weight * (a(x))^2` to the objective.
    pub fn add_square(&mut self, a: &Affine, weight: f64) {
        let a = a.compact();
        for (p, &(i, ci)) in a.terms.iter().enumerate() {
            for &(j, cj) in &a.terms[p..] {
                // P_ij = 2 w c_i c_j on and off the diagonal
                self.add_quadratic(i, j, 2.0 * weight * ci * cj);
            }
        }
        for &(i, ci) in &a.terms {
            self.objective[i] += 2.0 * weight * a.constant * ci;
        }
        self.offset += weight * a.constant * a.constant;
    }

    pub fn quadratic(&self) -> &[(usize, usize, f64)] {
        &self.quadratic
    }

    /// `a(x) == 0`.
    pub fn add_eq(&mut self, a: Affine) {
        self.equalities.push(a);
    }

    /// `a(x) >= 0`.
    pub fn add_nonneg(&mut self, a: Affine) {
        self.nonneg.push(a);
    }

    pub fn add_psd(&mut self, b: PsdBlock) -> usize {
        self.psd.push(b);
        self.psd.len() - 1
    }

    pub fn equalities(&self) -> &[Affine] {
        &self.equalities
    }

    pub fn nonneg(&self) -> &[Affine] {
        &self.nonneg
    }

    pub fn psd_blocks(&self) -> &[PsdBlock] {
        &self.psd
    }

    /// Checks that every expression references declared variables.
    pub fn validate(&self) -> Result<(), String> {
        let bad = |a: &Affine| a.max_var().is_some_and(|v| v >= self.n_vars);
        if self.equalities.iter().chain(&self.nonneg).any(bad) {
            return Err("linear row references an undeclared variable".into());
        }
        if self.psd.iter().any(|b| b.entries.iter().any(bad)) {
            return Err("PSD block references an undeclared variable".into());
        }
        if self.quadratic.iter().any(|&(_, j, _)| j >= self.n_vars) {
            return Err("quadratic term references an undeclared variable".into());
        }
        if self.psd.iter().any(|b| b.dim == 0) {
            return Err("empty PSD block".into());
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let lin: f64 = self.objective.iter().zip(x).map(|(c, x)| c * x).sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    0.5 * v * x[i] * x[i]
                } else {
                    v * x[i] * x[j]
                }
            })
            .sum();
        lin + quad + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    Failure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConicSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    /// PSD blocks evaluated at `x`, in declaration order.
    pub psd_values: Vec<DMatrix<f64>>,
    /// Backend dual vector (equalities, then nonnegative rows, then PSD blocks).
    pub duals: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|primal - dual| / max(1, |primal|)`.
    pub gap: f64,
    pub primal_residual: f64,
    pub iterations: u32,
    pub detail: String,
}

impl ConicSolution {
    pub(crate) fn failure(detail: impl Into<String>) -> Self {
        ConicSolution {
            status: SolveStatus::Failure,
            x: Vec::new(),
            psd_values: Vec::new(),
            duals: Vec::new(),
            primal_objective: f64::NAN,
            dual_objective: f64::NAN,
            gap: f64::INFINITY,
            primal_residual: f64::INFINITY,
            iterations: 0,
            detail: detail.into(),
        }
    }

    pub fn is_usable(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }

    /// Converts unusable statuses into an error.
    pub fn into_result(self) -> crate::Result<ConicSolution> {
        if self.is_usable() {
            Ok(self)
        } else {
            Err(crate::Error::Solver {
                status: self.status,
                detail: self.detail,
            })
        }
    }
}

fn dump_to(dir: &std::path::Path, p: &ConicProblem) {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let k = COUNTER.fetch_add(1, Ordering::Relaxed);
    let path = dir.join(format!("problem-{}-{k:06}.dat-s", std::process::id()));
    let res = std::fs::create_dir_all(dir)
        .map_err(crate::Error::from)
        .and_then(|_| {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_sdpa(&mut f, p)
        });
    if let Err(e) = res {
        log::warn!("could not dump {}: {e}", path.display());
    }
}

/// Solves `p`, reporting `Optimal` only when the achieved gap is within `tol`.
/// Never panics on solver trouble; problems surface through the status.
pub fn solve(p: &ConicProblem, tol: f64) -> ConicSolution {
    if let Err(e) = p.validate() {
        return ConicSolution::failure(e);
    }
    if let Some(dir) = std::env::var_os(DUMP_ENV) {
        dump_to(std::path::Path::new(&dir), p);
    }
    #[cfg(feature = "solver")]
    {
        backend::solve(p, tol)
    }
    #[cfg(not(feature = "solver"))]
    {
        let _ = tol;
        ConicSolution::failure("built without the `solver` feature")
    }
}
