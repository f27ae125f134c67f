//! Alternating-minimization dictionary learning with group-invariant sparse
//! coding, plus an L1 baseline on flattened coefficients.

mod baseline;
mod coding;
mod dictionary;
mod fit;
mod one_sparse;
mod search;
mod update;

pub use baseline::{code_l1, fit_baseline_l1, flatten, unflatten, BaselineOutput};
pub use coding::{
    code_exact, code_so3_sdp, lambda_max, reconstruct, residual_value, CodingResult, SO3_SDP_CAP,
};
pub use dictionary::{dictionary_distance, normalize, orbit_alignment, Dictionary};
pub use fit::{
    code_datapoint, fit, fit_from, write_trace_csv, CodingMode, FitConfig, FitOutput, TraceRow,
};
pub use one_sparse::{code_so3_one_sparse, OneSparseAtom, OneSparseCode, DEFAULT_SWEEPS};
pub use search::AngleGrid;
pub use update::{update_dictionary, update_optimality, PINV_RCOND};
