//! One-sparse SO(3) coding: each atom enters as `c_j tau(g_j) phi_j` with a
//! real `c_j` and a single rotation `g_j`, fitted by cyclic coordinate descent
//! over `alpha, beta, gamma, c`.

use super::dictionary::Dictionary;
use super::search::{maximize, weighted_trace, AngleGrid, RhoCache};
use crate::error::{Error, Result};
use crate::group::{BlockDiagOperator, FourierCoefficients, GroupElement, GroupId, IrrepTable};
use crate::linalg::{CMat, C64};

/// Default number of coordinate-descent sweeps.
pub const DEFAULT_SWEEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneSparseAtom {
    pub c: f64,
    /// Unconstrained least-squares coefficient; `c` is its real part.
    pub c_complex: C64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl OneSparseAtom {
    pub fn element(&self) -> GroupElement {
        GroupElement::euler(self.alpha, self.beta, self.gamma)
    }

    /// `c rho(g)` as a block-diagonal operator.
    pub fn operator(&self, table: &IrrepTable) -> Result<BlockDiagOperator> {
        Ok(BlockDiagOperator::from_element(table, &self.element())?.scaled(C64::new(self.c, 0.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneSparseCode {
    pub atoms: Vec<OneSparseAtom>,
    /// Final `(1/2) ||y - sum_j c_j tau(g_j) phi_j||^2`.
    pub objective: f64,
    /// Objective after the initial placement and after every coordinate update.
    pub history: Vec<f64>,
}

impl OneSparseCode {
    pub fn operators(&self, table: &IrrepTable) -> Result<Vec<BlockDiagOperator>> {
        self.atoms.iter().map(|a| a.operator(table)).collect()
    }
}

/// `(1/2)||r - c phi rho^*||^2` from `(1/2)||r||^2`, `P = phi^* r` and `||phi||^2`.
fn partial_objective(half_r2: f64, p: &[CMat], rho: &[CMat], c: f64, phi2: f64) -> f64 {
    half_r2 - c * weighted_trace(p, rho).re + 0.5 * c * c * phi2
}

#[derive(Clone, Copy)]
enum Coord {
    Alpha,
    Beta,
    Gamma,
}

pub fn code_so3_one_sparse(
    y: &FourierCoefficients,
    dict: &Dictionary,
    grid: &AngleGrid,
    sweeps: usize,
) -> Result<OneSparseCode> {
    let table = dict.table();
    if table.group() != GroupId::So3 {
        return Err(Error::GroupMismatch {
            expected: GroupId::So3,
            found: table.group(),
        });
    }
    if y.table() != table {
        return Err(Error::Shape("datapoint and dictionary tables differ".into()));
    }
    if sweeps == 0 {
        return Err(Error::InvalidArgument("need at least one sweep".into()));
    }
    grid.validate()?;
    let on_grid = AngleGrid {
        halvings: 0,
        ..*grid
    };
    let cache = RhoCache::new(table, &on_grid);
    let (alphas, betas, gammas) = (grid.alphas(), grid.betas(), grid.gammas());
    let mut atoms = vec![
        OneSparseAtom {
            c: 0.0,
            c_complex: C64::new(0.0, 0.0),
            alpha: alphas[0],
            beta: betas[0],
            gamma: gammas[0],
        };
        dict.q()
    ];
    let mut contrib: Vec<FourierCoefficients> = vec![FourierCoefficients::zeros(table); dict.q()];
    let mut resid = y.clone();
    let mut history = vec![0.5 * resid.plancherel_norm_sq()];
    if y.plancherel_norm() == 0.0 {
        return Ok(OneSparseCode {
            atoms,
            objective: 0.0,
            history,
        });
    }
    let phi2: Vec<f64> = dict.atoms().iter().map(|a| a.plancherel_norm_sq()).collect();
    let weight_of = |phi: &FourierCoefficients, r: &FourierCoefficients| -> Vec<CMat> {
        phi.blocks()
            .iter()
            .zip(r.blocks())
            .map(|(f, b)| f.adjoint() * b)
            .collect()
    };

    // greedy placement on the grid, atom by atom
    for (j, phi) in dict.atoms().iter().enumerate() {
        let p = weight_of(phi, &resid);
        let (_, g) = maximize(&cache, &on_grid, 1, |rho| weighted_trace(&p, rho).re.abs())?;
        let GroupElement::So3 { alpha, beta, gamma } = g else {
            unreachable!("SO(3) grid")
        };
        let a = phi.act_left_regular(&g)?;
        let cc = resid.inner(&a)? / phi2[j];
        atoms[j] = OneSparseAtom {
            c: cc.re,
            c_complex: cc,
            alpha,
            beta,
            gamma,
        };
        resid.axpy(C64::new(-cc.re, 0.0), &a)?;
        contrib[j] = a;
        history.push(0.5 * resid.plancherel_norm_sq());
    }

    for _ in 0..sweeps {
        for (j, phi) in dict.atoms().iter().enumerate() {
            // residual without atom j
            let mut rj = resid.clone();
            rj.axpy(C64::new(atoms[j].c, 0.0), &contrib[j])?;
            let half_r2 = 0.5 * rj.plancherel_norm_sq();
            let p = weight_of(phi, &rj);
            let mut current = *history.last().expect("nonempty");
            for coord in [Coord::Alpha, Coord::Beta, Coord::Gamma] {
                let cands: &[f64] = match coord {
                    Coord::Alpha => &alphas,
                    Coord::Beta => &betas,
                    Coord::Gamma => &gammas,
                };
                let mut best = (current, None);
                for &v in cands {
                    let mut t = atoms[j];
                    match coord {
                        Coord::Alpha => t.alpha = v,
                        Coord::Beta => t.beta = v,
                        Coord::Gamma => t.gamma = v,
                    }
                    let rho = cache.rho(&t.element())?;
                    let f = partial_objective(half_r2, &p, &rho, t.c, phi2[j]);
                    if f < best.0 {
                        best = (f, Some(t));
                    }
                }
                if let (f, Some(t)) = best {
                    atoms[j] = t;
                    current = f;
                }
                history.push(current);
            }
            let a = phi.act_left_regular(&atoms[j].element())?;
            let cc = rj.inner(&a)? / phi2[j];
            let f = half_r2 - cc.re * rj.inner(&a)?.re + 0.5 * cc.re * cc.re * phi2[j];
            if f <= current {
                atoms[j].c = cc.re;
                atoms[j].c_complex = cc;
                current = f;
            }
            history.push(current);
            resid = rj;
            resid.axpy(C64::new(-atoms[j].c, 0.0), &a)?;
            contrib[j] = a;
        }
    }
    Ok(OneSparseCode {
        atoms,
        objective: 0.5 * resid.plancherel_norm_sq(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_irreps;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, q: usize, seed: u64) -> Dictionary {
        let t = enumerate_irreps(GroupId::So3, n);
        Dictionary::random(&t, q, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn monotone(h: &[f64]) -> bool {
        h.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
    }

    #[test]
    fn zero_data() {
        let d = setup(2, 2, 1);
        let r = code_so3_one_sparse(&FourierCoefficients::zeros(d.table()), &d, &AngleGrid::CODING, 5)
            .unwrap();
        assert!(r.atoms.iter().all(|a| a.c == 0.0));
        assert!(code_so3_one_sparse(&FourierCoefficients::zeros(d.table()), &d, &AngleGrid::CODING, 0)
            .is_err());
    }

    #[test]
    fn on_grid_recovery() {
        let d = setup(3, 1, 2);
        let g = AngleGrid::CODING;
        let gstar = GroupElement::euler(g.alphas()[7], g.betas()[2], g.gammas()[12]);
        let y = d.atoms()[0]
            .act_left_regular(&gstar)
            .unwrap()
            .scaled(C64::new(-1.7, 0.0));
        let r = code_so3_one_sparse(&y, &d, &g, 5).unwrap();
        assert!(r.objective < 1e-10, "{}", r.objective);
        assert!((r.atoms[0].c + 1.7).abs() < 1e-9);
        assert!(monotone(&r.history));
        assert_eq!(r.history.len(), 1 + 1 + 5 * 4);
    }

    #[test]
    fn off_grid_close_to_best_grid_point() {
        let d = setup(2, 1, 3);
        let g = AngleGrid::CODING;
        let y = d.atoms()[0]
            .act_left_regular(&GroupElement::euler(0.37, 1.23, 4.91))
            .unwrap();
        let r = code_so3_one_sparse(&y, &d, &g, 5).unwrap();
        // brute force over the whole grid with the optimal real coefficient
        let phi2 = d.atoms()[0].plancherel_norm_sq();
        let mut best = f64::INFINITY;
        for h in g.elements(GroupId::So3) {
            let a = d.atoms()[0].act_left_regular(&h).unwrap();
            let c = y.inner(&a).unwrap().re / phi2;
            best = best.min(0.5 * y.sub(&a.scaled(C64::new(c, 0.0))).unwrap().plancherel_norm_sq());
        }
        assert!(r.objective <= 10.0 * best + 1e-12, "{} vs {best}", r.objective);
        assert!(monotone(&r.history));
    }

    #[test]
    fn two_atoms_monotone() {
        let d = setup(2, 2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = FourierCoefficients::random(d.table(), &mut rng);
        let r = code_so3_one_sparse(&y, &d, &AngleGrid::CODING, 5).unwrap();
        assert!(monotone(&r.history));
        assert!(r.objective <= r.history[0]);
        let direct = 0.5
            * y.sub(&super::super::coding::reconstruct(&d, &r.operators(d.table()).unwrap()).unwrap())
                .unwrap()
                .plancherel_norm_sq();
        assert!((direct - r.objective).abs() < 1e-10);
        for a in &r.atoms {
            assert!((0.0..std::f64::consts::TAU).contains(&a.alpha));
            assert!((0.0..=std::f64::consts::PI).contains(&a.beta));
        }
    }
}
