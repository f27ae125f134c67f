//! Reproducible experiment drivers: relaxation tightness, synthetic SO(3)
//! recovery with an L1 baseline, and the digit pipeline. Every driver is a
//! pure function of its arguments and seed.

mod config;
pub mod idx;
mod mnist;
mod synthetic;
mod tightness;

pub use config::ExperimentConfig;
pub use idx::{parse_idx, parse_idx_images, parse_idx_label_file, parse_idx_labels};
pub use mnist::{
    fit_images, load_digits, one_sparse_monotone, run_mnist, MnistOutput, IMAGES_FILE,
    LABELS_FILE, RENDER_RESOLUTION,
};
pub use synthetic::{
    run_synthetic_so3, run_synthetic_with, synthetic_data, SyntheticOptions, SyntheticReport,
};
pub use tightness::{random_tensor, run_tightness, TightnessReport, SUCCESS_THRESHOLD};
