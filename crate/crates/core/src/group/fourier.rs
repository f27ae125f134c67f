use rand::Rng;
use rand_distr::StandardNormal;

use super::element::GroupElement;
use super::irreps::{irrep_matrix, IrrepTable};
use super::plancherel_weight;
use crate::error::{Error, Result};
use crate::linalg::{frob_norm_sq, inner, CMat, C64};

fn check_blocks(table: &IrrepTable, blocks: &[CMat]) -> Result<()> {
    if blocks.len() != table.len() {
        return Err(Error::Shape(format!(
            "{} blocks for a table with {} irreps",
            blocks.len(),
            table.len()
        )));
    }
    for (b, xi) in blocks.iter().zip(table.entries()) {
        let d = xi.dim();
        if b.shape() != (d, d) {
            return Err(Error::Shape(format!(
                "irrep {} expects {d}x{d}, got {:?}",
                xi.label,
                b.shape()
            )));
        }
    }
    Ok(())
}

fn check_same_table(a: &IrrepTable, b: &IrrepTable) -> Result<()> {
    if a.group() != b.group() {
        return Err(Error::GroupMismatch {
            expected: a.group(),
            found: b.group(),
        });
    }
    if a != b {
        return Err(Error::Shape("irrep tables differ".into()));
    }
    Ok(())
}

fn random_blocks<R: Rng + ?Sized>(table: &IrrepTable, rng: &mut R) -> Vec<CMat> {
    table
        .dims()
        .map(|d| {
            CMat::from_fn(d, d, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect()
}

/// Matrix-valued Fourier coefficients of a band-limited function on the group,
/// one `dim x dim` block per table entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    table: IrrepTable,
    blocks: Vec<CMat>,
}

impl FourierCoefficients {
    pub fn new(table: IrrepTable, blocks: Vec<CMat>) -> Result<Self> {
        check_blocks(&table, &blocks)?;
        Ok(FourierCoefficients { table, blocks })
    }

    pub fn zeros(table: &IrrepTable) -> Self {
        let blocks = table.dims().map(|d| CMat::zeros(d, d)).collect();
        FourierCoefficients {
            table: table.clone(),
            blocks,
        }
    }

    /// Independent standard complex Gaussian entries (not normalized).
    pub fn random<R: Rng + ?Sized>(table: &IrrepTable, rng: &mut R) -> Self {
        FourierCoefficients {
            table: table.clone(),
            blocks: random_blocks(table, rng),
        }
    }

    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CMat] {
        &mut self.blocks
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    pub fn block_for(&self, label: i64) -> Option<&CMat> {
        self.table.position(label).map(|p| &self.blocks[p])
    }

    /// Value of the band-limited function at `g`: `sum dim tr(f_hat rho(g))`.
    pub fn synthesize(&self, g: &GroupElement) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (b, xi) in self.blocks.iter().zip(self.table.entries()) {
            let rho = irrep_matrix(xi, g)?;
            // tr(B rho) = sum_{a,c} B_{ac} rho_{ca}
            let tr: C64 = (0..b.nrows())
                .flat_map(|a| (0..b.ncols()).map(move |c| (a, c)))
                .map(|(a, c)| b[(a, c)] * rho[(c, a)])
                .sum();
            acc += tr * xi.dim() as f64;
        }
        Ok(acc)
    }

    pub fn plancherel_norm_sq(&self) -> f64 {
        self.blocks
            .iter()
            .zip(self.table.dims())
            .map(|(b, d)| plancherel_weight(d) * frob_norm_sq(b))
            .sum()
    }

    /// L2 norm of the represented function.
    pub fn plancherel_norm(&self) -> f64 {
        self.plancherel_norm_sq().sqrt()
    }

    /// L2 inner product `<self, other>` of the represented functions.
    pub fn inner(&self, other: &FourierCoefficients) -> Result<C64> {
        check_same_table(&self.table, &other.table)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .zip(self.table.dims())
            .map(|((a, b), d)| inner(a, b) * plancherel_weight(d))
            .sum())
    }

    /// Left-regular action: every block right-multiplied by `rho(g)^*`.
    pub fn act_left_regular(&self, g: &GroupElement) -> Result<FourierCoefficients> {
        let blocks = self
            .blocks
            .iter()
            .zip(self.table.entries())
            .map(|(b, xi)| Ok(b * irrep_matrix(xi, g)?.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Ok(FourierCoefficients {
            table: self.table.clone(),
            blocks,
        })
    }

    /// Block-diagonal operator action: `phi_xi -> phi_xi l_xi^*`.
    pub fn apply_operator(&self, op: &BlockDiagOperator) -> Result<FourierCoefficients> {
        check_same_table(&self.table, &op.table)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&op.blocks)
            .map(|(b, l)| b * l.adjoint())
            .collect();
        Ok(FourierCoefficients {
            table: self.table.clone(),
            blocks,
        })
    }

    pub fn scaled(&self, s: C64) -> FourierCoefficients {
        FourierCoefficients {
            table: self.table.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C64, other: &FourierCoefficients) -> Result<()> {
        check_same_table(&self.table, &other.table)?;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn sub(&self, other: &FourierCoefficients) -> Result<FourierCoefficients> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// Restriction to (or zero-extension onto) another table of the same group.
    pub fn retabled(&self, table: &IrrepTable) -> Result<FourierCoefficients> {
        if table.group() != self.table.group() {
            return Err(Error::GroupMismatch {
                expected: table.group(),
                found: self.table.group(),
            });
        }
        let blocks = table
            .entries()
            .iter()
            .map(|xi| {
                self.block_for(xi.label)
                    .cloned()
                    .unwrap_or_else(|| CMat::zeros(xi.dim(), xi.dim()))
            })
            .collect();
        Ok(FourierCoefficients {
            table: table.clone(),
            blocks,
        })
    }
}

/// Block-diagonal operator on band-limited functions, one block per irrep.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagOperator {
    table: IrrepTable,
    blocks: Vec<CMat>,
}

impl BlockDiagOperator {
    pub fn new(table: IrrepTable, blocks: Vec<CMat>) -> Result<Self> {
        check_blocks(&table, &blocks)?;
        Ok(BlockDiagOperator { table, blocks })
    }

    pub fn zeros(table: &IrrepTable) -> Self {
        BlockDiagOperator {
            table: table.clone(),
            blocks: table.dims().map(|d| CMat::zeros(d, d)).collect(),
        }
    }

    pub fn identity(table: &IrrepTable) -> Self {
        BlockDiagOperator {
            table: table.clone(),
            blocks: table.dims().map(|d| CMat::identity(d, d)).collect(),
        }
    }

    /// The atom `(rho_xi(g))_xi`.
    pub fn from_element(table: &IrrepTable, g: &GroupElement) -> Result<Self> {
        let blocks = table
            .entries()
            .iter()
            .map(|xi| irrep_matrix(xi, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockDiagOperator {
            table: table.clone(),
            blocks,
        })
    }

    pub fn random<R: Rng + ?Sized>(table: &IrrepTable, rng: &mut R) -> Self {
        BlockDiagOperator {
            table: table.clone(),
            blocks: random_blocks(table, rng),
        }
    }

    pub fn table(&self) -> &IrrepTable {
        &self.table
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [CMat] {
        &mut self.blocks
    }

    pub fn scaled(&self, s: C64) -> BlockDiagOperator {
        BlockDiagOperator {
            table: self.table.clone(),
            blocks: self.blocks.iter().map(|b| b * s).collect(),
        }
    }

    pub fn axpy(&mut self, s: C64, other: &BlockDiagOperator) -> Result<()> {
        check_same_table(&self.table, &other.table)?;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn frob_norm_sq(&self) -> f64 {
        self.blocks.iter().map(frob_norm_sq).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::element::GroupId;
    use crate::group::irreps::enumerate_irreps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_element<R: Rng>(g: GroupId, rng: &mut R) -> GroupElement {
        let t = |rng: &mut R| rng.random_range(0.0..2.0 * PI);
        match g {
            GroupId::So2 => GroupElement::so2(t(rng)),
            GroupId::O2 => {
                if rng.random_bool(0.5) {
                    GroupElement::reflection(t(rng))
                } else {
                    GroupElement::rotation(t(rng))
                }
            }
            GroupId::So3 => GroupElement::euler(t(rng), rng.random_range(0.0..PI), t(rng)),
        }
    }

    #[test]
    fn synthesis_of_trivial_coefficients() {
        let t = enumerate_irreps(GroupId::So3, 2);
        let g = GroupElement::euler(0.3, 1.0, 2.0);
        assert_eq!(
            FourierCoefficients::zeros(&t).synthesize(&g).unwrap(),
            C64::new(0.0, 0.0)
        );
        let mut f = FourierCoefficients::zeros(&t);
        f.blocks_mut()[0][(0, 0)] = C64::new(1.5, -0.5);
        assert!((f.synthesize(&g).unwrap() - C64::new(1.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn plancherel_single_block() {
        let t = enumerate_irreps(GroupId::So3, 2);
        let mut f = FourierCoefficients::zeros(&t);
        assert_eq!(f.plancherel_norm(), 0.0);
        f.blocks_mut()[2][(1, 3)] = C64::new(3.0, 4.0);
        // weight dim = 5
        assert!((f.plancherel_norm() - 5f64.sqrt() * 5.0).abs() < 1e-12);
    }

    #[test]
    fn left_regular_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [GroupId::So2, GroupId::O2, GroupId::So3] {
            let t = enumerate_irreps(g, 4);
            let f = FourierCoefficients::random(&t, &mut rng);
            let id = GroupElement::identity(g);
            assert!(
                f.act_left_regular(&id)
                    .unwrap()
                    .sub(&f)
                    .unwrap()
                    .plancherel_norm()
                    < 1e-14
            );
            for _ in 0..10 {
                let (a, b) = (random_element(g, &mut rng), random_element(g, &mut rng));
                let ab = a.compose(&b).unwrap();
                let lhs = f
                    .act_left_regular(&b)
                    .unwrap()
                    .act_left_regular(&a)
                    .unwrap();
                let rhs = f.act_left_regular(&ab).unwrap();
                assert!(lhs.sub(&rhs).unwrap().plancherel_norm() < 1e-10);
                let n = f.act_left_regular(&a).unwrap().plancherel_norm();
                assert!((n - f.plancherel_norm()).abs() < 1e-12 * n.max(1.0));
            }
        }
    }

    #[test]
    fn left_regular_so2_phase() {
        let t = enumerate_irreps(GroupId::So2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = FourierCoefficients::random(&t, &mut rng);
        let a = 0.77;
        let g = f.act_left_regular(&GroupElement::so2(a)).unwrap();
        for (i, xi) in t.entries().iter().enumerate() {
            let want = f.blocks()[i][(0, 0)] * crate::linalg::cis(-(xi.label as f64) * a);
            assert!((g.blocks()[i][(0, 0)] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn left_regular_translates_function() {
        // [tau(g) f](x) = f(g^-1 x)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = enumerate_irreps(GroupId::So3, 3);
        let f = FourierCoefficients::random(&t, &mut rng);
        let g = GroupElement::euler(0.4, 1.2, 2.2);
        let x = GroupElement::euler(1.4, 0.7, 5.0);
        let lhs = f.act_left_regular(&g).unwrap().synthesize(&x).unwrap();
        let rhs = f.synthesize(&g.inverse().compose(&x).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn operator_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let t = enumerate_irreps(GroupId::O2, 3);
        let f = FourierCoefficients::random(&t, &mut rng);
        let id = BlockDiagOperator::identity(&t);
        assert_eq!(f.apply_operator(&id).unwrap(), f);
        let g = GroupElement::reflection(1.1);
        let op = BlockDiagOperator::from_element(&t, &g).unwrap();
        let d = f
            .apply_operator(&op)
            .unwrap()
            .sub(&f.act_left_regular(&g).unwrap())
            .unwrap();
        assert!(d.plancherel_norm() < 1e-15);

        let l1 = BlockDiagOperator::random(&t, &mut rng);
        let l2 = BlockDiagOperator::random(&t, &mut rng);
        let (a, b) = (C64::new(0.3, -1.2), C64::new(2.0, 0.5));
        let mut comb = l1.scaled(a);
        comb.axpy(b, &l2).unwrap();
        let lhs = f.apply_operator(&comb).unwrap();
        // the operator enters through its adjoint, so scalars conjugate
        let mut rhs = f.apply_operator(&l1).unwrap().scaled(a.conj());
        rhs.axpy(b.conj(), &f.apply_operator(&l2).unwrap()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().plancherel_norm() < 1e-12);
    }

    #[test]
    fn mismatched_tables() {
        let f = FourierCoefficients::zeros(&enumerate_irreps(GroupId::So3, 2));
        let op = BlockDiagOperator::identity(&enumerate_irreps(GroupId::So3, 3));
        assert!(matches!(f.apply_operator(&op), Err(Error::Shape(_))));
        let op = BlockDiagOperator::identity(&enumerate_irreps(GroupId::So2, 2));
        assert!(matches!(
            f.apply_operator(&op),
            Err(Error::GroupMismatch { .. })
        ));
        assert!(FourierCoefficients::new(
            enumerate_irreps(GroupId::So3, 1),
            vec![CMat::zeros(1, 1)]
        )
        .is_err());
    }
}
