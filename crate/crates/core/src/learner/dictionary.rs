use rand::Rng;

use super::search::{maximize, weighted_trace, AngleGrid, RhoCache};
use crate::error::{Error, Result};
use crate::group::{FourierCoefficients, IrrepTable};
use crate::linalg::{CMat, C64};

const NORM_TOL: f64 = 1e-9;
/// Atoms with Plancherel norm below this are treated as zero and re-seeded.
const ZERO_ATOM: f64 = 1e-12;
const MAX_EXHAUSTIVE: usize = 8;

/// `q` atoms on one irrep table, each of unit Plancherel norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: Vec<FourierCoefficients>,
}

impl Dictionary {
    /// Checks that the atoms share a table and have unit norm.
    pub fn new(atoms: Vec<FourierCoefficients>) -> Result<Self> {
        let d = Self::unnormalized(atoms)?;
        for (j, a) in d.atoms.iter().enumerate() {
            let n = a.plancherel_norm();
            if (n - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "atom {j} has norm {n}, expected 1"
                )));
            }
        }
        Ok(d)
    }

    /// Same table check without the norm constraint (dictionary-update output).
    pub fn unnormalized(atoms: Vec<FourierCoefficients>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(Error::InvalidArgument("dictionary needs q >= 1".into()));
        };
        let table = first.table().clone();
        if atoms.iter().any(|a| a.table() != &table) {
            return Err(Error::Shape("atoms use different irrep tables".into()));
        }
        Ok(Dictionary { atoms })
    }

    /// Standard complex Gaussian blocks, normalized.
    pub fn random<R: Rng + ?Sized>(table: &IrrepTable, q: usize, rng: &mut R) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("dictionary needs q >= 1".into()));
        }
        let atoms = (0..q)
            .map(|_| unit_random(table, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Dictionary { atoms })
    }

    pub fn atoms(&self) -> &[FourierCoefficients] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<FourierCoefficients> {
        self.atoms
    }

    pub fn q(&self) -> usize {
        self.atoms.len()
    }

    pub fn table(&self) -> &IrrepTable {
        self.atoms[0].table()
    }
}

fn unit_random<R: Rng + ?Sized>(table: &IrrepTable, rng: &mut R) -> Result<FourierCoefficients> {
    loop {
        let a = FourierCoefficients::random(table, rng);
        let n = a.plancherel_norm();
        if n > ZERO_ATOM {
            return Ok(a.scaled(C64::new(1.0 / n, 0.0)));
        }
    }
}

/// Scales every atom to unit norm. Zero atoms are replaced by fresh random
/// unit atoms; their indices are returned.
pub fn normalize<R: Rng + ?Sized>(dict: &Dictionary, rng: &mut R) -> Result<(Dictionary, Vec<usize>)> {
    let mut reseeded = Vec::new();
    let mut atoms = Vec::with_capacity(dict.q());
    for (j, a) in dict.atoms.iter().enumerate() {
        let n = a.plancherel_norm();
        if n > ZERO_ATOM && n.is_finite() {
            atoms.push(a.scaled(C64::new(1.0 / n, 0.0)));
        } else {
            reseeded.push(j);
            atoms.push(unit_random(dict.table(), rng)?);
        }
    }
    Ok((Dictionary { atoms }, reseeded))
}

/// `max_g |<a, tau(g) b>|` over the group, by grid search and refinement.
pub fn orbit_alignment(a: &FourierCoefficients, b: &FourierCoefficients, grid: &AngleGrid) -> Result<f64> {
    if a.table() != b.table() {
        return Err(Error::Shape("atoms use different irrep tables".into()));
    }
    // <a, b rho(g)^*> = sum dim tr(a rho(g) b^*) = sum dim tr((b^* a) rho(g))
    let p: Vec<CMat> = a
        .blocks()
        .iter()
        .zip(b.blocks())
        .map(|(x, y)| y.adjoint() * x)
        .collect();
    let cache = RhoCache::new(a.table(), grid);
    let (v, _) = maximize(&cache, grid, 3, |rho| weighted_trace(&p, rho).norm())?;
    Ok(v)
}

fn pair_distance(a: &FourierCoefficients, b: &FourierCoefficients, grid: &AngleGrid) -> Result<f64> {
    let s = orbit_alignment(a, b, grid)?;
    Ok((a.plancherel_norm_sq() + b.plancherel_norm_sq() - 2.0 * s)
        .max(0.0)
        .sqrt())
}

fn permutations(q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..q).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// `min_pi max_j min_{g, theta} ||phi_j - e^{i theta} tau(g) psi_pi(j)||`.
///
/// The phase is optimal in closed form; `g` comes from the grid search. The
/// assignment is exhaustive, so `q` is limited to 8.
pub fn dictionary_distance(a: &Dictionary, b: &Dictionary, grid: &AngleGrid) -> Result<f64> {
    if a.q() != b.q() {
        return Err(Error::Shape(format!(
            "dictionaries have {} and {} atoms",
            a.q(),
            b.q()
        )));
    }
    if a.q() > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge(format!(
            "exhaustive assignment supports q <= {MAX_EXHAUSTIVE}, got {}",
            a.q()
        )));
    }
    let q = a.q();
    let mut d = vec![vec![0.0; q]; q];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = pair_distance(&a.atoms[i], &b.atoms[j], grid)?;
        }
    }
    Ok(permutations(q)
        .into_iter()
        .map(|p| (0..q).map(|i| d[i][p[i]]).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate_irreps, GroupElement, GroupId};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn so3_dict(seed: u64, q: usize) -> Dictionary {
        let t = IrrepTable::from_labels(GroupId::So3, &[1]).unwrap();
        Dictionary::random(&t, q, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn random_atoms_have_unit_norm() {
        let d = so3_dict(1, 3);
        for a in d.atoms() {
            assert!((a.plancherel_norm() - 1.0).abs() < 1e-12);
        }
        assert!(Dictionary::new(d.atoms().to_vec()).is_ok());
        let bad = d.atoms()[0].scaled(C64::new(2.0, 0.0));
        assert!(Dictionary::new(vec![bad]).is_err());
    }

    #[test]
    fn normalize_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = so3_dict(3, 2);
        let (same, r) = normalize(&d, &mut rng).unwrap();
        assert!(r.is_empty());
        assert!((same.atoms()[0].sub(&d.atoms()[0]).unwrap()).plancherel_norm() < 1e-12);
        let seven = Dictionary::unnormalized(vec![d.atoms()[0].scaled(C64::new(7.0, 0.0))]).unwrap();
        let (back, _) = normalize(&seven, &mut rng).unwrap();
        assert!(back.atoms()[0].sub(&d.atoms()[0]).unwrap().plancherel_norm() < 1e-12);
        let zero = Dictionary::unnormalized(vec![
            d.atoms()[0].clone(),
            FourierCoefficients::zeros(d.table()),
        ])
        .unwrap();
        let (fixed, r) = normalize(&zero, &mut rng).unwrap();
        assert_eq!(r, vec![1]);
        assert!((fixed.atoms()[1].plancherel_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_zero_on_orbit() {
        let d = so3_dict(4, 2);
        assert!(dictionary_distance(&d, &d, &AngleGrid::DISTANCE).unwrap() < 1e-9);
        // orbit element on the grid, with a phase and swapped order
        let grid = AngleGrid::DISTANCE;
        let g = GroupElement::euler(grid.alphas()[5], grid.betas()[2], grid.gammas()[17]);
        let moved = Dictionary::new(vec![
            d.atoms()[1].act_left_regular(&g).unwrap(),
            d.atoms()[0]
                .act_left_regular(&g)
                .unwrap()
                .scaled(crate::linalg::cis(0.7)),
        ])
        .unwrap();
        assert!(dictionary_distance(&d, &moved, &grid).unwrap() < 1e-9);
        // off-grid element: bounded by the refined resolution
        let h = GroupElement::euler(0.123, 1.777, 2.468);
        let off = Dictionary::new(
            d.atoms()
                .iter()
                .map(|a| a.act_left_regular(&h).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(dictionary_distance(&d, &off, &grid).unwrap() < 5e-2);
    }

    #[test]
    fn independent_random_atoms_are_far() {
        for seed in 0..5 {
            let a = so3_dict(100 + seed, 1);
            let b = so3_dict(200 + seed, 1);
            let v = dictionary_distance(&a, &b, &AngleGrid::DISTANCE).unwrap();
            assert!((0.4..=1.4).contains(&v), "{v}");
        }
    }

    #[test]
    fn so2_distance_and_limits() {
        let t = enumerate_irreps(GroupId::So2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = Dictionary::random(&t, 1, &mut rng).unwrap();
        let moved = Dictionary::new(vec![d.atoms()[0]
            .act_left_regular(&GroupElement::so2(2.0))
            .unwrap()])
        .unwrap();
        assert!(dictionary_distance(&d, &moved, &AngleGrid::DISTANCE).unwrap() < 1e-3);
        let big = so3_dict(5, 9);
        assert!(matches!(
            dictionary_distance(&big, &big, &AngleGrid::DISTANCE),
            Err(Error::TooLarge(_))
        ));
    }
}
