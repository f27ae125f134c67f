use super::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::group::{BlockDiagOperator, FourierCoefficients, IrrepTable};
use crate::linalg::{pinv, CMat};

/// Relative singular-value cutoff of the pseudoinverse.
pub const PINV_RCOND: f64 = 1e-10;

fn check(data: &[FourierCoefficients], codes: &[Vec<BlockDiagOperator>], table: &IrrepTable) -> Result<usize> {
    if data.len() != codes.len() || data.is_empty() {
        return Err(Error::Shape(format!(
            "{} datapoints, {} code sets",
            data.len(),
            codes.len()
        )));
    }
    let q = codes[0].len();
    if q == 0 {
        return Err(Error::InvalidArgument("dictionary needs q >= 1".into()));
    }
    for (y, c) in data.iter().zip(codes) {
        if y.table() != table || c.len() != q || c.iter().any(|l| l.table() != table) {
            return Err(Error::Shape("inconsistent tables or atom counts".into()));
        }
    }
    Ok(q)
}

/// `B_i = [l_i1^*; ...; l_iq^*]` for one irrep.
fn stacked(codes: &[BlockDiagOperator], xi: usize, d: usize) -> CMat {
    let mut b = CMat::zeros(codes.len() * d, d);
    for (j, l) in codes.iter().enumerate() {
        b.view_mut((j * d, 0), (d, d)).copy_from(&l.blocks()[xi].adjoint());
    }
    b
}

/// Least-squares atoms for fixed codes: per irrep,
/// `[phi_1 .. phi_q] = (sum_i y_i B_i^*) (sum_i B_i B_i^*)^+`.
pub fn update_dictionary(
    data: &[FourierCoefficients],
    codes: &[Vec<BlockDiagOperator>],
    table: &IrrepTable,
) -> Result<Dictionary> {
    let q = check(data, codes, table)?;
    let idx: Vec<usize> = (0..table.len()).collect();
    let blocks = crate::par::map(&idx, |_, &xi| {
        let d = table.entries()[xi].dim();
        let mut g = CMat::zeros(q * d, q * d);
        let mut h = CMat::zeros(d, q * d);
        // fixed summation order over i
        for (y, c) in data.iter().zip(codes) {
            let b = stacked(c, xi, d);
            let bh = b.adjoint();
            g += &b * &bh;
            h += &y.blocks()[xi] * &bh;
        }
        h * pinv(&g, PINV_RCOND)
    });
    let atoms = (0..q)
        .map(|j| {
            let per: Vec<CMat> = blocks
                .iter()
                .zip(table.dims())
                .map(|(phi, d)| phi.columns(j * d, d).into_owned())
                .collect();
            FourierCoefficients::new(table.clone(), per)
        })
        .collect::<Result<Vec<_>>>()?;
    Dictionary::unnormalized(atoms)
}

/// Largest first-order violation `||Phi G - H||_F` over the irreps.
pub fn update_optimality(
    data: &[FourierCoefficients],
    codes: &[Vec<BlockDiagOperator>],
    dict: &Dictionary,
) -> Result<f64> {
    let table = dict.table();
    let q = check(data, codes, table)?;
    let mut worst: f64 = 0.0;
    for (xi, d) in table.dims().enumerate() {
        let mut g = CMat::zeros(q * d, q * d);
        let mut h = CMat::zeros(d, q * d);
        for (y, c) in data.iter().zip(codes) {
            let b = stacked(c, xi, d);
            g += &b * b.adjoint();
            h += &y.blocks()[xi] * b.adjoint();
        }
        let mut phi = CMat::zeros(d, q * d);
        for (j, a) in dict.atoms().iter().enumerate() {
            phi.columns_mut(j * d, d).copy_from(&a.blocks()[xi]);
        }
        worst = worst.max((phi * g - h).norm());
    }
    Ok(worst)
}
