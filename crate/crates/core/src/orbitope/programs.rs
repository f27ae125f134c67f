//! Exact atomic norms for SO(2) and O(2) through Caratheodory orbitopes.
//!
//! A vector in the real span of the atoms `v(theta)` is split as
//! `x = z+ - z-` with `z+-` first columns of PSD Hermitian Toeplitz matrices;
//! the norm is the least `z+_0 + z-_0`.

use crate::conic::{self, Affine, ConicProblem};
use crate::error::{Error, Result};
use crate::group::{BlockDiagOperator, GroupId};
use crate::linalg::C64;

use super::cone::ToeplitzVars;
use super::toeplitz::{HermitianToeplitz, TrigMomentVector};

/// Signed pair of orbitope points `z+`, `z-` of a given order.
#[derive(Debug, Clone)]
pub struct OrbitopePair {
    pub plus: ToeplitzVars,
    pub minus: ToeplitzVars,
}

impl OrbitopePair {
    /// Declares both cones with their PSD constraints.
    pub fn declare(p: &mut ConicProblem, order: usize) -> Self {
        let plus = ToeplitzVars::declare(p, &[order + 1]);
        let minus = ToeplitzVars::declare(p, &[order + 1]);
        p.add_psd(plus.psd_block());
        p.add_psd(minus.psd_block());
        OrbitopePair { plus, minus }
    }

    /// `(re, im)` of `x_k = z+_k - z-_k`.
    pub fn difference(&self, k: usize) -> (Affine, Affine) {
        let (pr, pi) = self.plus.entry(&[k as i64]);
        let (mr, mi) = self.minus.entry(&[k as i64]);
        (pr.plus(&mr.scaled(-1.0)), pi.plus(&mi.scaled(-1.0)))
    }

    /// `z+_0 + z-_0`.
    pub fn norm_expr(&self) -> Affine {
        Affine::var(self.plus.diagonal_var()).term(self.minus.diagonal_var(), 1.0)
    }

    pub fn toeplitz_values(&self, x: &[f64]) -> Result<(HermitianToeplitz, HermitianToeplitz)> {
        let n = self.plus.dim();
        let col = |v: &ToeplitzVars| (0..n).map(|k| v.value(x, &[k as i64])).collect();
        Ok((
            HermitianToeplitz::new(col(&self.plus))?,
            HermitianToeplitz::new(col(&self.minus))?,
        ))
    }
}

fn add_complex_eq(p: &mut ConicProblem, (re, im): (Affine, Affine), value: C64) {
    p.add_eq(re.plus_constant(-value.re));
    p.add_eq(im.plus_constant(-value.im));
}

fn solved_value(p: &ConicProblem) -> Result<conic::ConicSolution> {
    let sol = conic::solve(p, conic::default_tolerance());
    match sol.status {
        conic::SolveStatus::Infeasible => Err(Error::OutsideSpan),
        _ => sol.into_result(),
    }
}

/// Result of the SO(2) norm program with its optimal split.
#[derive(Debug, Clone)]
pub struct So2NormSolution {
    pub value: f64,
    pub plus: HermitianToeplitz,
    pub minus: HermitianToeplitz,
}

pub fn minkowski_so2_solution(x: &TrigMomentVector) -> Result<So2NormSolution> {
    let n = x.order();
    let mut p = ConicProblem::new();
    let pair = OrbitopePair::declare(&mut p, n);
    let xs = x.folded();
    if xs[0].im.abs() > 1e-9 * xs.iter().map(|z| z.norm()).fold(1.0, f64::max) {
        return Err(Error::OutsideSpan);
    }
    p.add_eq(pair.difference(0).0.plus_constant(-xs[0].re));
    for (k, &v) in xs.iter().enumerate().skip(1) {
        add_complex_eq(&mut p, pair.difference(k), v);
    }
    let obj = pair.norm_expr();
    for &(i, c) in &obj.terms {
        p.add_objective(i, c);
    }
    let sol = solved_value(&p)?;
    let (plus, minus) = pair.toeplitz_values(&sol.x)?;
    Ok(So2NormSolution {
        value: sol.primal_objective.max(0.0),
        plus,
        minus,
    })
}

/// Atomic norm of a folded moment vector over `{ +-v(theta) }`.
pub fn minkowski_so2(x: &TrigMomentVector) -> Result<f64> {
    if x.folded().iter().all(|z| z.norm() == 0.0) {
        return Ok(0.0);
    }
    minkowski_so2_solution(x).map(|s| s.value)
}

/// Splits an O(2) operator into rotation and reflection moment vectors,
/// `z_R = (., Z_k[0][0])`, `z_L = (., Z_k[0][1])`, and the shared trivial entry.
pub fn o2_components(z: &BlockDiagOperator) -> Result<(C64, Vec<C64>, Vec<C64>)> {
    let table = z.table();
    if table.group() != GroupId::O2 {
        return Err(Error::GroupMismatch {
            expected: GroupId::O2,
            found: table.group(),
        });
    }
    let n = table.bandwidth();
    if table.len() != n + 1 || table.position(0) != Some(0) {
        return Err(Error::Shape(
            "O(2) operator needs the full table 0..N".into(),
        ));
    }
    let scale = z.frob_norm_sq().sqrt().max(1.0);
    let z0 = z.blocks()[0][(0, 0)];
    let mut dev = z0.im.abs();
    let mut rot = vec![C64::new(0.0, 0.0); n + 1];
    let mut refl = vec![C64::new(0.0, 0.0); n + 1];
    for k in 1..=n {
        let b = &z.blocks()[table.position(k as i64).expect("full table")];
        dev = dev.max((b[(1, 1)] - b[(0, 0)].conj()).norm());
        dev = dev.max((b[(1, 0)] - b[(0, 1)].conj()).norm());
        rot[k] = b[(0, 0)];
        refl[k] = b[(0, 1)];
    }
    if dev > 1e-9 * scale {
        return Err(Error::OutsideSpan);
    }
    Ok((C64::new(z0.re, 0.0), rot, refl))
}

/// Atomic norm over `{ +-rho(g) : g in O(2) }` with four orbitopes
/// (rotation and reflection branches, each signed).
pub fn minkowski_o2(z: &BlockDiagOperator) -> Result<f64> {
    let (z0, rot, refl) = o2_components(z)?;
    let n = rot.len() - 1;
    if z0.norm() == 0.0 && rot.iter().chain(&refl).all(|v| v.norm() == 0.0) {
        return Ok(0.0);
    }
    let mut p = ConicProblem::new();
    let r = OrbitopePair::declare(&mut p, n);
    let l = OrbitopePair::declare(&mut p, n);
    p.add_eq(
        r.difference(0)
            .0
            .plus(&l.difference(0).0)
            .plus_constant(-z0.re),
    );
    for k in 1..=n {
        add_complex_eq(&mut p, r.difference(k), rot[k]);
        add_complex_eq(&mut p, l.difference(k), refl[k]);
    }
    for &(i, c) in r.norm_expr().terms.iter().chain(&l.norm_expr().terms) {
        p.add_objective(i, c);
    }
    let sol = solved_value(&p)?;
    Ok(sol.primal_objective.max(0.0))
}

#[cfg(all(test, feature = "solver"))]
mod tests {
    use super::*;
    use crate::group::{enumerate_irreps, GroupElement};
    use crate::orbitope::vandermonde_decompose;

    #[test]
    fn so2_atom_has_unit_norm() {
        for &th in &[0.0, 1.1, 4.0] {
            let v = minkowski_so2(&TrigMomentVector::atom(4, th)).unwrap();
            assert!((v - 1.0).abs() < 1e-4, "{v}");
        }
        let zero = TrigMomentVector::new(vec![C64::new(0.0, 0.0); 3]).unwrap();
        assert_eq!(minkowski_so2(&zero).unwrap(), 0.0);
    }

    #[test]
    fn so2_signed_mixture() {
        let x = TrigMomentVector::atom(4, 0.5)
            .scaled(0.3)
            .add(&TrigMomentVector::atom(4, 3.0).scaled(-0.7))
            .unwrap();
        let s = minkowski_so2_solution(&x).unwrap();
        assert!((s.value - 1.0).abs() < 1e-3, "{}", s.value);
        // the split recovers the signed atoms
        let plus = vandermonde_decompose(&s.plus).unwrap();
        let minus = vandermonde_decompose(&s.minus).unwrap();
        assert_eq!((plus.len(), minus.len()), (1, 1));
        assert!((plus[0].0 - 0.5).abs() < 1e-3 && (minus[0].0 - 3.0).abs() < 1e-3);
    }

    #[test]
    fn so2_homogeneous() {
        let x = TrigMomentVector::atom(3, 0.2)
            .scaled(0.6)
            .add(&TrigMomentVector::atom(3, 2.5).scaled(0.4))
            .unwrap();
        let a = minkowski_so2(&x).unwrap();
        let b = minkowski_so2(&x.scaled(-2.5)).unwrap();
        assert!((b - 2.5 * a).abs() < 1e-6 * b.max(1.0));
    }

    #[test]
    fn o2_atoms() {
        let t = enumerate_irreps(GroupId::O2, 3);
        let rot = BlockDiagOperator::from_element(&t, &GroupElement::rotation(0.9)).unwrap();
        let refl = BlockDiagOperator::from_element(&t, &GroupElement::reflection(2.1)).unwrap();
        assert!((minkowski_o2(&rot).unwrap() - 1.0).abs() < 1e-4);
        assert!((minkowski_o2(&refl).unwrap() - 1.0).abs() < 1e-4);
        let mut avg = rot.scaled(C64::new(0.5, 0.0));
        avg.axpy(C64::new(0.5, 0.0), &refl).unwrap();
        assert!(minkowski_o2(&avg).unwrap() <= 1.0 + 1e-4);
        assert_eq!(minkowski_o2(&BlockDiagOperator::zeros(&t)).unwrap(), 0.0);
    }

    #[test]
    fn o2_outside_span() {
        let t = enumerate_irreps(GroupId::O2, 2);
        let mut z = BlockDiagOperator::zeros(&t);
        z.blocks_mut()[1][(0, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(minkowski_o2(&z), Err(Error::OutsideSpan)));
    }
}
