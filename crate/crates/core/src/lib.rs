//! Group-invariant dictionary learning over the compact groups SO(2), O(2)
//! and SO(3).
//!
//! Data are represented as functions on the group and handled through their
//! matrix-valued Fourier coefficients (one `dim x dim` complex block per
//! irreducible representation). Sparse coding penalizes the coding operators
//! with the atomic norm of the group orbit, which is exact for SO(2)/O(2)
//! (Hermitian-Toeplitz orbitopes) and relaxed to a block-Toeplitz
//! semidefinite program for SO(3).
//!
//! Module map:
//! - [`group`]: irreducible representations, Fourier transforms, Plancherel.
//! - [`lifting`]: homogeneous-space lifts, the image -> sphere -> SO(3) pipeline,
//!   atom rendering.
//! - [`orbitope`]: Toeplitz orbitopes, atomic norms and their SDP relaxations.
//! - [`conic`]: solver-neutral SDP assembly and the interior-point backend.
//! - [`learner`]: alternating-minimization dictionary learner and baseline.
//! - [`experiments`]: reproducible experiment drivers and data ingestion.

pub mod conic;
pub mod error;
pub mod experiments;
pub mod group;
pub mod learner;
pub mod lifting;
pub mod linalg;
pub mod orbitope;
pub(crate) mod par;

pub use error::{Error, Result};
pub use group::{
    BlockDiagOperator, FourierCoefficients, GroupElement, GroupId, IrrepIndex, IrrepTable,
};
