//! Clarabel interior-point backend.
//!
//! Clarabel solves `min x'Px/2 + q'x` s.t. `Ax + s = b`, `s` in a product of
//! zero, nonnegative and PSD-triangle cones. PSD slacks use the scaled upper
//! triangle (off-diagonals times sqrt 2).

use std::f64::consts::SQRT_2;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{Affine, ConicProblem, ConicSolution, SolveStatus, REQUESTED_GAP};

struct Rows {
    i: Vec<usize>,
    j: Vec<usize>,
    v: Vec<f64>,
    b: Vec<f64>,
}

impl Rows {
    /// Appends the row `sign * terms` with right-hand side `rhs`.
    fn push(&mut self, a: &Affine, sign: f64, rhs: f64) {
        let row = self.b.len();
        for &(var, coef) in &a.terms {
            if coef != 0.0 {
                self.i.push(row);
                self.j.push(var);
                self.v.push(sign * coef);
            }
        }
        self.b.push(rhs);
    }
}

pub(super) fn solve(p: &ConicProblem, tol: f64) -> ConicSolution {
    let n = p.n_vars();
    let mut rows = Rows {
        i: Vec::new(),
        j: Vec::new(),
        v: Vec::new(),
        b: Vec::new(),
    };
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    // a(x) = 0  ->  a'x + s = -c, s = 0
    for a in p.equalities() {
        rows.push(a, 1.0, -a.constant);
    }
    if !p.equalities().is_empty() {
        cones.push(SupportedConeT::ZeroConeT(p.equalities().len()));
    }
    // a(x) >= 0  ->  -a'x + s = c, s >= 0
    for a in p.nonneg() {
        rows.push(a, -1.0, a.constant);
    }
    if !p.nonneg().is_empty() {
        cones.push(SupportedConeT::NonnegativeConeT(p.nonneg().len()));
    }
    // svec(M(x)) = s
    for blk in p.psd_blocks() {
        let d = blk.dim();
        for c in 0..d {
            for r in 0..=c {
                let scale = if r == c { 1.0 } else { SQRT_2 };
                let a = blk.get(r, c);
                rows.push(a, -scale, scale * a.constant);
            }
        }
        cones.push(SupportedConeT::PSDTriangleConeT(d));
    }

    let m = rows.b.len();
    let a_mat = CscMatrix::new_from_triplets(m, n, rows.i, rows.j, rows.v);
    let (pi, pj, pv): (Vec<_>, Vec<_>, Vec<_>) = {
        let mut pi = Vec::new();
        let mut pj = Vec::new();
        let mut pv = Vec::new();
        for &(i, j, v) in p.quadratic() {
            pi.push(i);
            pj.push(j);
            pv.push(v);
        }
        (pi, pj, pv)
    };
    let p_mat = CscMatrix::new_from_triplets(n, n, pi, pj, pv);

    let requested = REQUESTED_GAP.min(tol);
    let settings = match DefaultSettingsBuilder::default()
        .verbose(std::env::var_os("GIDL_SOLVER_VERBOSE").is_some())
        .tol_gap_abs(requested)
        .tol_gap_rel(requested)
        .tol_feas(requested)
        .max_iter(400)
        .max_threads(1)
        .direct_solve_method("faer".into())
        .build()
    {
        Ok(s) => s,
        Err(e) => return ConicSolution::failure(format!("settings: {e}")),
    };
    let mut solver =
        match DefaultSolver::new(&p_mat, p.objective(), &a_mat, &rows.b, &cones, settings) {
            Ok(s) => s,
            Err(e) => return ConicSolution::failure(format!("setup: {e:?}")),
        };
    solver.solve();
    let sol = &solver.solution;

    let primal = sol.obj_val + p.offset;
    let dual = sol.obj_val_dual + p.offset;
    let gap = (primal - dual).abs() / primal.abs().max(1.0);
    let finite = primal.is_finite() && dual.is_finite() && sol.x.iter().all(|v| v.is_finite());
    let status = match sol.status {
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::Solved if finite && gap <= tol => SolveStatus::Optimal,
        SolverStatus::Solved
        | SolverStatus::AlmostSolved
        | SolverStatus::MaxIterations
        | SolverStatus::InsufficientProgress
            if finite && gap <= 100.0 * tol =>
        {
            SolveStatus::NearOptimal
        }
        _ => SolveStatus::Failure,
    };
    let x = sol.x.clone();
    let psd_values = p.psd_blocks().iter().map(|b| b.eval(&x)).collect();
    let eq_res = p
        .equalities()
        .iter()
        .map(|a| a.eval(&x).abs())
        .chain(p.nonneg().iter().map(|a| (-a.eval(&x)).max(0.0)))
        .fold(0.0, f64::max);
    ConicSolution {
        status,
        x,
        psd_values,
        duals: sol.z.clone(),
        primal_objective: primal,
        dual_objective: dual,
        gap,
        primal_residual: eq_res.max(sol.r_prim),
        iterations: sol.iterations,
        detail: format!("{:?} after {} iterations", sol.status, sol.iterations),
    }
}
