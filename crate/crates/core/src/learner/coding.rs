//! Convex sparse coding: `min sum_xi (dim/2) ||y_xi - sum_j phi_j,xi l_j,xi^*||_F^2
//! + lambda sum_j ||l_j||` with the orbitope gauge (SO(2), O(2)) or its
//! block-Toeplitz relaxation (SO(3)).

use super::dictionary::Dictionary;
use super::search::{maximize, weighted_trace, AngleGrid, RhoCache};
use crate::conic::{self, Affine, ConicProblem};
use crate::error::{Error, Result};
use crate::group::{plancherel_weight, BlockDiagOperator, FourierCoefficients, GroupId, IrrepTable};
use crate::linalg::{CMat, C64};
use crate::orbitope::{build_wigner_index_maps, HermitianToeplitz, OrbitopePair, So3RelaxedPair};

/// Default largest SO(3) bandwidth accepted by the relaxed coder.
pub const SO3_SDP_CAP: usize = 3;

const LAMBDA_GRID: AngleGrid = AngleGrid {
    n_alpha: 32,
    n_beta: 16,
    n_gamma: 32,
    halvings: 14,
};

/// Codes of one datapoint.
#[derive(Debug, Clone)]
pub struct CodingResult {
    /// One operator per atom.
    pub operators: Vec<BlockDiagOperator>,
    /// `(1/2) ||y - sum_j phi_j l_j^*||^2`.
    pub residual: f64,
    /// `sum_j ||l_j||` as certified by the program.
    pub penalty: f64,
    pub lambda: f64,
    /// Toeplitz certificates per atom: `[z+, z-]` for SO(2), `[r+, r-, l+, l-]` for O(2).
    pub certificates: Vec<Vec<HermitianToeplitz>>,
}

impl CodingResult {
    pub fn objective(&self) -> f64 {
        self.residual + self.lambda * self.penalty
    }

    fn zero(dict: &Dictionary, lambda: f64) -> Self {
        CodingResult {
            operators: vec![BlockDiagOperator::zeros(dict.table()); dict.q()],
            residual: 0.0,
            penalty: 0.0,
            lambda,
            certificates: vec![Vec::new(); dict.q()],
        }
    }
}

/// `sum_j phi_j l_j^*`.
pub fn reconstruct(dict: &Dictionary, ops: &[BlockDiagOperator]) -> Result<FourierCoefficients> {
    if ops.len() != dict.q() {
        return Err(Error::Shape(format!(
            "{} operators for {} atoms",
            ops.len(),
            dict.q()
        )));
    }
    let mut out = FourierCoefficients::zeros(dict.table());
    for (a, l) in dict.atoms().iter().zip(ops) {
        out.axpy(C64::new(1.0, 0.0), &a.apply_operator(l)?)?;
    }
    Ok(out)
}

/// `(1/2) ||y - sum_j phi_j l_j^*||^2` in the Plancherel norm.
pub fn residual_value(y: &FourierCoefficients, dict: &Dictionary, ops: &[BlockDiagOperator]) -> Result<f64> {
    Ok(0.5 * y.sub(&reconstruct(dict, ops)?)?.plancherel_norm_sq())
}

fn check_inputs(y: &FourierCoefficients, dict: &Dictionary, lambda: f64) -> Result<()> {
    if y.table() != dict.table() {
        return Err(Error::Shape("datapoint and dictionary tables differ".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda = {lambda}")));
    }
    Ok(())
}

/// Operator entries as affine `(re, im)` pairs: `[block][row * dim + col]`.
type OperatorExpr = Vec<Vec<(Affine, Affine)>>;

fn neg(a: &Affine) -> Affine {
    a.scaled(-1.0)
}

/// Adds the weighted squared residual of `y - sum_j phi_j l_j^*` to the objective.
fn add_residual(p: &mut ConicProblem, y: &FourierCoefficients, dict: &Dictionary, ops: &[OperatorExpr]) {
    for (xi, yb) in y.blocks().iter().enumerate() {
        let d = yb.nrows();
        let w = plancherel_weight(d);
        for a in 0..d {
            for b in 0..d {
                let mut re = Affine::constant(yb[(a, b)].re);
                let mut im = Affine::constant(yb[(a, b)].im);
                for (phi, op) in dict.atoms().iter().zip(ops) {
                    let f = &phi.blocks()[xi];
                    for c in 0..d {
                        // phi_ac conj(l_bc) = (p + iq)(u - iv)
                        let (pr, qi) = (f[(a, c)].re, f[(a, c)].im);
                        let (u, v) = &op[xi][b * d + c];
                        if pr != 0.0 {
                            re = re.plus(&u.scaled(-pr));
                            im = im.plus(&v.scaled(pr));
                        }
                        if qi != 0.0 {
                            re = re.plus(&v.scaled(-qi));
                            im = im.plus(&u.scaled(-qi));
                        }
                    }
                }
                p.add_square(&re, 0.5 * w);
                p.add_square(&im, 0.5 * w);
            }
        }
    }
}

fn operator_values(table: &IrrepTable, expr: &OperatorExpr, x: &[f64]) -> Result<BlockDiagOperator> {
    let blocks = table
        .dims()
        .zip(expr)
        .map(|(d, e)| CMat::from_fn(d, d, |r, c| {
            let (u, v) = &e[r * d + c];
            C64::new(u.eval(x), v.eval(x))
        }))
        .collect();
    BlockDiagOperator::new(table.clone(), blocks)
}

fn so2_expr(table: &IrrepTable, pair: &OrbitopePair) -> OperatorExpr {
    table
        .entries()
        .iter()
        .map(|xi| {
            let (re, im) = pair.difference(xi.label.unsigned_abs() as usize);
            if xi.label >= 0 {
                vec![(re, im)]
            } else {
                vec![(re, neg(&im))]
            }
        })
        .collect()
}

fn o2_expr(table: &IrrepTable, r: &OrbitopePair, l: &OrbitopePair) -> OperatorExpr {
    table
        .entries()
        .iter()
        .map(|xi| {
            let k = xi.label as usize;
            let (rr, ri) = r.difference(k);
            let (lr, li) = l.difference(k);
            if k == 0 {
                vec![(rr.plus(&lr), Affine::zero())]
            } else {
                // [[R, L], [conj L, conj R]]
                vec![
                    (rr.clone(), ri.clone()),
                    (lr.clone(), li.clone()),
                    (lr, neg(&li)),
                    (rr, neg(&ri)),
                ]
            }
        })
        .collect()
}

fn solve(p: &ConicProblem) -> Result<conic::ConicSolution> {
    conic::solve(p, conic::default_tolerance()).into_result()
}

/// Exact atomic-norm coding for SO(2) and O(2).
pub fn code_exact(y: &FourierCoefficients, dict: &Dictionary, lambda: f64) -> Result<CodingResult> {
    check_inputs(y, dict, lambda)?;
    let table = dict.table();
    let group = table.group();
    if group == GroupId::So3 {
        return Err(Error::InvalidArgument(
            "exact coding is available for SO(2) and O(2) only".into(),
        ));
    }
    if y.plancherel_norm() == 0.0 {
        return Ok(CodingResult::zero(dict, lambda));
    }
    let n = table.bandwidth();
    if group == GroupId::O2 && (table.len() != n + 1 || table.position(0) != Some(0)) {
        return Err(Error::Shape("O(2) coding needs the full table 0..N".into()));
    }
    let mut p = ConicProblem::new();
    let mut exprs = Vec::new();
    let mut pairs = Vec::new();
    let mut norm = Affine::zero();
    for _ in 0..dict.q() {
        match group {
            GroupId::So2 => {
                let pair = OrbitopePair::declare(&mut p, n);
                exprs.push(so2_expr(table, &pair));
                norm = norm.plus(&pair.norm_expr());
                pairs.push(vec![pair]);
            }
            _ => {
                let r = OrbitopePair::declare(&mut p, n);
                let l = OrbitopePair::declare(&mut p, n);
                exprs.push(o2_expr(table, &r, &l));
                norm = norm.plus(&r.norm_expr()).plus(&l.norm_expr());
                pairs.push(vec![r, l]);
            }
        }
    }
    add_residual(&mut p, y, dict, &exprs);
    for &(i, c) in &norm.compact().terms {
        p.add_objective(i, lambda * c);
    }
    let sol = solve(&p)?;
    let operators = exprs
        .iter()
        .map(|e| operator_values(table, e, &sol.x))
        .collect::<Result<Vec<_>>>()?;
    let mut certificates = Vec::new();
    for ps in &pairs {
        let mut c = Vec::new();
        for pair in ps {
            let (a, b) = pair.toeplitz_values(&sol.x)?;
            c.push(a);
            c.push(b);
        }
        certificates.push(c);
    }
    Ok(CodingResult {
        residual: residual_value(y, dict, &operators)?,
        penalty: norm.eval(&sol.x).max(0.0),
        operators,
        lambda,
        certificates,
    })
}

/// Relaxed coding for SO(3): `l_j = L(W+ - W-)` with PSD block-Toeplitz
/// `W+-` and penalty `w+_0 + w-_0`. Tables must use labels within `0..=N`,
/// `N <= cap`.
pub fn code_so3_sdp(y: &FourierCoefficients, dict: &Dictionary, lambda: f64, cap: usize) -> Result<CodingResult> {
    check_inputs(y, dict, lambda)?;
    let table = dict.table();
    if table.group() != GroupId::So3 {
        return Err(Error::GroupMismatch {
            expected: GroupId::So3,
            found: table.group(),
        });
    }
    let n = table.bandwidth();
    if n > cap {
        return Err(Error::TooLarge(format!(
            "relaxed SO(3) coding at bandwidth {n} exceeds the cap {cap}"
        )));
    }
    if y.plancherel_norm() == 0.0 {
        return Ok(CodingResult::zero(dict, lambda));
    }
    let map = build_wigner_index_maps(n)?;
    let mut p = ConicProblem::new();
    let mut exprs = Vec::new();
    let mut norm = Affine::zero();
    for _ in 0..dict.q() {
        let pair = So3RelaxedPair::declare(&mut p, n);
        let e: OperatorExpr = table
            .entries()
            .iter()
            .map(|xi| {
                let j = xi.label;
                let mut v = Vec::new();
                for m in -j..=j {
                    for mp in -j..=j {
                        v.push(pair.operator_entry(&map, j as usize, m, mp));
                    }
                }
                v
            })
            .collect();
        exprs.push(e);
        norm = norm.plus(&pair.norm_expr());
    }
    add_residual(&mut p, y, dict, &exprs);
    for &(i, c) in &norm.compact().terms {
        p.add_objective(i, lambda * c);
    }
    let sol = solve(&p)?;
    let operators = exprs
        .iter()
        .map(|e| operator_values(table, e, &sol.x))
        .collect::<Result<Vec<_>>>()?;
    Ok(CodingResult {
        residual: residual_value(y, dict, &operators)?,
        penalty: norm.eval(&sol.x).max(0.0),
        operators,
        lambda,
        certificates: vec![Vec::new(); dict.q()],
    })
}

/// Smallest `lambda` for which all-zero codes are optimal:
/// `max_j sup_g |Re <y, tau(g) phi_j>|`, the polar gauge of the gradient at zero.
/// Exact up to the search resolution for SO(2)/O(2); for SO(3) it is the
/// threshold of the exact orbit gauge, not of its relaxation.
pub fn lambda_max(y: &FourierCoefficients, dict: &Dictionary) -> Result<f64> {
    check_inputs(y, dict, 0.0)?;
    let cache = RhoCache::new(dict.table(), &LAMBDA_GRID);
    let mut best: f64 = 0.0;
    for phi in dict.atoms() {
        // <y, phi rho^*> = sum dim tr((phi^* y) rho)
        let p: Vec<CMat> = phi
            .blocks()
            .iter()
            .zip(y.blocks())
            .map(|(f, b)| f.adjoint() * b)
            .collect();
        let (v, _) = maximize(&cache, &LAMBDA_GRID, 4, |rho| weighted_trace(&p, rho).re.abs())?;
        best = best.max(v);
    }
    Ok(best)
}
