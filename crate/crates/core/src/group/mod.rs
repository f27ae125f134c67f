//! Irreducible representations of SO(2), O(2), SO(3) and Fourier analysis on them.
//!
//! Conventions used throughout the crate:
//! - Fourier coefficient: `f_hat(xi) = \int f(g) rho_xi(g)^* dmu(g)` (normalized Haar).
//! - Synthesis: `f(x) = sum_xi dim(xi) tr(f_hat(xi) rho_xi(x))`.
//! - Plancherel: `||f||^2 = sum_xi dim(xi) ||f_hat(xi)||_F^2` (Schur orthogonality).
//! - Left-regular action `[tau(g) f](x) = f(g^-1 x)` acts by `f_hat(xi) -> f_hat(xi) rho_xi(g)^*`.

mod element;
mod fourier;
pub mod io;
mod irreps;
pub mod quadrature;
pub mod wigner;

pub use element::{GroupElement, GroupId};
pub use fourier::{BlockDiagOperator, FourierCoefficients};
pub use irreps::{enumerate_irreps, irrep_matrix, IrrepIndex, IrrepTable};
pub use quadrature::{fourier_transform, tabulate, QuadratureGrid, Samples};
pub use wigner::{wigner_d_matrix, wigner_little_d, wigner_little_d_matrix};

/// Weight of irrep block `xi` in the Plancherel sum.
#[inline]
pub fn plancherel_weight(dim: usize) -> f64 {
    dim as f64
}
