//! Tightness of the block-Toeplitz relaxation on random tensors
//! `T = sum_i (1/r) e^{i theta_i} v(a_i) (x) v(b_i) (x) v(c_i)`.

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cis, C64};
use crate::orbitope::{tensor_minkowski_relaxed, BlockToeplitzTensor};

/// A trial succeeds when the relaxed norm reaches this value.
pub const SUCCESS_THRESHOLD: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub n: usize,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    /// Relaxed norm per trial; `None` when the solver failed.
    pub values: Vec<Option<f64>>,
}

impl TightnessReport {
    pub fn successes(&self) -> usize {
        self.values
            .iter()
            .filter(|v| v.is_some_and(|x| x >= SUCCESS_THRESHOLD))
            .count()
    }

    pub fn solver_failures(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "trial,value,success")?;
        for (i, v) in self.values.iter().enumerate() {
            match v {
                Some(x) => writeln!(w, "{i},{x:.12e},{}", *x >= SUCCESS_THRESHOLD)?,
                None => writeln!(w, "{i},,solver_failure")?,
            }
        }
        Ok(())
    }
}

/// Tensor of trial `k`; every trial draws from its own seeded stream.
pub fn random_tensor(n: usize, r: usize, seed: u64, trial: usize) -> Result<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let sizes = [n + 1; 3];
    let mut t = vec![C64::new(0.0, 0.0); (n + 1).pow(3)];
    for _ in 0..r {
        let phase = cis(rng.random::<f64>() * TAU);
        let th = [
            rng.random::<f64>() * TAU,
            rng.random::<f64>() * TAU,
            rng.random::<f64>() * TAU,
        ];
        let atom = BlockToeplitzTensor::atom(&sizes, &th)?.first_column();
        for (a, b) in t.iter_mut().zip(atom) {
            *a += phase * b / r as f64;
        }
    }
    Ok(t)
}

pub fn run_tightness(n: usize, r: usize, trials: usize, seed: u64) -> Result<TightnessReport> {
    if n == 0 || r == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "n, r and trials must be positive".into(),
        ));
    }
    let idx: Vec<usize> = (0..trials).collect();
    let values = crate::par::map(&idx, |_, &k| -> Result<Option<f64>> {
        let t = random_tensor(n, r, seed, k)?;
        Ok(match tensor_minkowski_relaxed(&t, n) {
            Ok(v) => Some(v),
            Err(Error::Solver { .. }) => None,
            Err(e) => return Err(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(TightnessReport {
        n,
        r,
        trials,
        seed,
        values,
    })
}
