use thiserror::Error;

use crate::conic::SolveStatus;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: expected {expected:?}, found {found:?}")]
    GroupMismatch {
        expected: crate::group::GroupId,
        found: crate::group::GroupId,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("quadrature grid too coarse for bandwidth {bandwidth}: {detail}")]
    GridTooCoarse { bandwidth: usize, detail: String },

    #[error("input is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("Vandermonde decomposition residual {0:.3e} exceeds tolerance")]
    Decomposition(f64),

    #[error("Wigner index map residual {0:.3e} exceeds tolerance")]
    IndexMap(f64),

    #[error("operator lies outside the span of the atomic set")]
    OutsideSpan,

    #[error("solver returned {status:?}: {detail}")]
    Solver { status: SolveStatus, detail: String },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("homogeneous space sample is unreachable from the origin (residual {0:.3e})")]
    NotTransitive(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error("at iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        Error::Iteration {
            iteration,
            source: Box::new(self),
        }
    }
}
