use std::collections::HashSet;

use super::element::{GroupElement, GroupId};
use super::wigner::wigner_d_matrix;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMat, C64};

/// One irreducible representation: SO(2) frequency `n`, O(2) order `k >= 0`,
/// or SO(3) degree `j >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IrrepIndex {
    pub group: GroupId,
    pub label: i64,
}

impl IrrepIndex {
    pub fn new(group: GroupId, label: i64) -> Result<Self> {
        if group != GroupId::So2 && label < 0 {
            return Err(Error::InvalidArgument(format!(
                "{} irreps are labelled by nonnegative integers, got {label}",
                group.name()
            )));
        }
        Ok(IrrepIndex { group, label })
    }

    pub fn dim(&self) -> usize {
        match self.group {
            GroupId::So2 => 1,
            GroupId::O2 => {
                if self.label == 0 {
                    1
                } else {
                    2
                }
            }
            GroupId::So3 => 2 * self.label as usize + 1,
        }
    }
}

/// Ordered, duplicate-free set of irreps retained by a band limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepTable {
    group: GroupId,
    entries: Vec<IrrepIndex>,
}

/// Standard band-limited table: SO(2) frequencies `-N..=N`, O(2)/SO(3) labels `0..=N`.
pub fn enumerate_irreps(group: GroupId, bandwidth: usize) -> IrrepTable {
    let n = bandwidth as i64;
    let labels: Vec<i64> = match group {
        GroupId::So2 => (-n..=n).collect(),
        GroupId::O2 | GroupId::So3 => (0..=n).collect(),
    };
    IrrepTable {
        group,
        entries: labels
            .into_iter()
            .map(|label| IrrepIndex { group, label })
            .collect(),
    }
}

impl IrrepTable {
    /// Table over an explicit list of labels (e.g. a single SO(3) degree).
    pub fn from_labels(group: GroupId, labels: &[i64]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(labels.len());
        for &l in labels {
            if !seen.insert(l) {
                return Err(Error::InvalidArgument(format!("duplicate irrep label {l}")));
            }
            entries.push(IrrepIndex::new(group, l)?);
        }
        Ok(IrrepTable { group, entries })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn entries(&self) -> &[IrrepIndex] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|label|`.
    pub fn bandwidth(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.label.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn dims(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.dim())
    }

    /// Total number of complex coefficients, `sum dim^2`.
    pub fn total_dim_sq(&self) -> usize {
        self.dims().map(|d| d * d).sum()
    }

    pub fn position(&self, label: i64) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label)
    }
}

/// `rho_xi(g)`.
pub fn irrep_matrix(xi: &IrrepIndex, g: &GroupElement) -> Result<CMat> {
    if xi.group != g.group() {
        return Err(Error::GroupMismatch {
            expected: xi.group,
            found: g.group(),
        });
    }
    Ok(match *g {
        GroupElement::So2 { theta } => CMat::from_element(1, 1, cis(xi.label as f64 * theta)),
        GroupElement::O2 { theta, reflection } => {
            let k = xi.label as f64;
            if xi.label == 0 {
                CMat::from_element(1, 1, C64::new(1.0, 0.0))
            } else if !reflection {
                CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    cis(k * theta),
                    cis(-k * theta),
                ]))
            } else {
                let z = C64::new(0.0, 0.0);
                CMat::from_row_slice(2, 2, &[z, cis(k * theta), cis(-k * theta), z])
            }
        }
        GroupElement::So3 { alpha, beta, gamma } => {
            wigner_d_matrix(xi.label as usize, alpha, beta, gamma)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn enumerate_examples() {
        let t = enumerate_irreps(GroupId::So2, 2);
        assert_eq!(
            t.entries().iter().map(|e| e.label).collect::<Vec<_>>(),
            vec![-2, -1, 0, 1, 2]
        );
        assert!(t.dims().all(|d| d == 1));
        let t = enumerate_irreps(GroupId::So3, 1);
        assert_eq!(t.dims().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(t.total_dim_sq(), 10);
        let t = enumerate_irreps(GroupId::O2, 0);
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries()[0].dim(), 1);
        assert_eq!(
            enumerate_irreps(GroupId::O2, 3).dims().collect::<Vec<_>>(),
            vec![1, 2, 2, 2]
        );
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(IrrepTable::from_labels(GroupId::So3, &[1, 1]).is_err());
        assert!(IrrepTable::from_labels(GroupId::So3, &[-1]).is_err());
        assert_eq!(
            IrrepTable::from_labels(GroupId::So3, &[2])
                .unwrap()
                .bandwidth(),
            2
        );
    }

    #[test]
    fn so2_half_turn() {
        let xi = IrrepIndex::new(GroupId::So2, 1).unwrap();
        let m = irrep_matrix(&xi, &GroupElement::so2(PI)).unwrap();
        assert!((m[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn so3_identity() {
        for j in 0..5 {
            let xi = IrrepIndex::new(GroupId::So3, j).unwrap();
            let m = irrep_matrix(&xi, &GroupElement::identity(GroupId::So3)).unwrap();
            assert!((m - CMat::identity(xi.dim(), xi.dim())).norm() < 1e-15);
        }
    }

    #[test]
    fn group_mismatch_is_error() {
        let xi = IrrepIndex::new(GroupId::So3, 1).unwrap();
        assert!(irrep_matrix(&xi, &GroupElement::so2(0.0)).is_err());
    }
}
