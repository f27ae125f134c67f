//! Toeplitz orbitopes, exact atomic norms for SO(2)/O(2) and the
//! block-Toeplitz relaxation for SO(3).

mod cone;
mod programs;
mod tensor;
mod toeplitz;

pub use cone::{flatten, multi_indices, unflatten, ToeplitzVars};
pub use programs::{
    minkowski_o2, minkowski_so2, minkowski_so2_solution, o2_components, OrbitopePair,
    So2NormSolution,
};
pub use tensor::{
    build_wigner_index_maps, so3_free_entries, so3_operator_norm_relaxed, so3_span_deviation,
    tensor_minkowski_relaxed, BlockToeplitzTensor, So3RelaxedPair, WignerIndexMap, INDEX_MAP_TOL,
};
pub use toeplitz::{moment_atom, vandermonde_decompose, HermitianToeplitz, TrigMomentVector};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CMat};

/// Real symmetric `2n x 2n` embedding `[[A, B^T], [B, A]]` of `H = A + iB`.
/// Its eigenvalues are those of `H`, each doubled.
pub fn real_embedding(h: &CMat) -> Result<DMatrix<f64>> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "expected a square matrix, got {:?}",
            h.shape()
        )));
    }
    let dev = hermitian_deviation(h);
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.nrows();
    Ok(DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (a, b) = (i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => h[(a, b)].re,
            // B^T in the upper right block
            (true, false) => h[(b, a)].im,
            (false, true) => h[(a, b)].im,
        }
    }))
}
